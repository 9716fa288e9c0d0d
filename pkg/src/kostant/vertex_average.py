"""Vertices of flow polytopes and their averages.

Three enumerators are provided:

* positive netflow (N_i > 0 for i < n): every vertex sends all of a vertex's
  outflow along a single out-edge, giving n! vertices;
* (t, 0, ..., 0, -t): vertices are t times the unit paths from 0 to n, one per
  subset of interior vertices, 2^(n-1) in total;
* anything else: every vertex has forest support, so each spanning tree of the
  complete graph (via Pruefer codes) is solved by leaf peeling and the
  nonnegative solutions are collected.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Iterable, TextIO

from .errors import BadParams, NonPositiveEntry, ResourceLimit, Unsupported
from .flow_core import (
    FlowMatrix,
    NetflowVector,
    family,
    flow_from_embedded,
    flow_to_dict,
    make_flow,
)

MAX_SPECIAL_N = 8
MAX_GENERIC_N = 6


def average_positive(N: NetflowVector) -> FlowMatrix:
    """Uniform average of the n! vertices when every N_i (i < n) is positive."""
    n = N.n
    if any(x <= 0 for x in N.head):
        raise NonPositiveEntry("every N_i with i < n must be positive")
    s = N.partial_sums

    def c(k):
        return Fraction(N.entries[n - k], k + 1) + Fraction(s[n - k], k * (k + 1))

    upper = [[c(n - i)] * (n - i) for i in range(n)]
    f = make_flow(N, upper)
    for k in range(1, n):
        assert f.g(n - k) == Fraction(k * s[n - k - 1], k + 1)
    return f


def average_cry(n: int, t: int = 1) -> FlowMatrix:
    """Uniform average of the 2^(n-1) vertices of the (t, 0, ..., 0, -t) polytope."""
    if n < 2 or t < 1 or int(t) != t:
        raise BadParams("need n >= 2 and a positive integer t")
    half = Fraction(1, 2)
    A = [[Fraction(0)] * n for _ in range(n)]
    A[0][0] = half ** (n - 1)
    for c in range(1, n):
        A[0][c] = half ** (n - c)
    for i in range(1, n):
        A[i][0] = half ** (n - i)
        for c in range(1, n - i + 1):
            A[i][c] = half if i + c == n else half ** (n - i - c + 1)
    A = [[t * x for x in row] for row in A]
    return flow_from_embedded(family("cry", n, t=t), A)


def midpoint_2rho(n: int, t: int = 1) -> FlowMatrix:
    """All edge flows equal t; the slacks are then t*k*(n-k)."""
    if n < 2 or t < 1 or int(t) != t:
        raise BadParams("need n >= 2 and a positive integer t")
    N = family("two_rho", n, t=t)
    f = make_flow(N, [[Fraction(t)] * (n - i) for i in range(n)])
    assert all(f.g(k) == t * k * (n - k) for k in range(1, n))
    return f


def _is_cry(N: NetflowVector) -> bool:
    return N.n >= 1 and N.entries[0] > 0 and not any(N.entries[1:-1])


def positive_vertices(N: NetflowVector) -> list[FlowMatrix]:
    n = N.n
    out = []
    for choice in itertools.product(*[range(i + 1, n + 1) for i in range(n)]):
        inflow = [0] * (n + 1)
        upper = [[0] * (n - i) for i in range(n)]
        for i, j in enumerate(choice):
            amount = N.entries[i] + inflow[i]
            upper[i][j - i - 1] = amount
            inflow[j] += amount
        out.append(make_flow(N, upper))
    return out


def cry_vertices(N: NetflowVector) -> list[FlowMatrix]:
    n = N.n
    t = N.entries[0]
    out = []
    for bits in itertools.product((0, 1), repeat=n - 1):
        path = [0] + [k for k in range(1, n) if bits[k - 1]] + [n]
        upper = [[0] * (n - i) for i in range(n)]
        for a, b in zip(path, path[1:]):
            upper[a][b - a - 1] = t
        f = make_flow(N, upper)
        assert all(f.g(k) == t * (1 - bits[k - 1]) for k in range(1, n))
        out.append(f)
    return out


def _prufer_edges(code: tuple[int, ...], m: int) -> list[tuple[int, int]]:
    degree = [1] * m
    for x in code:
        degree[x] += 1
    edges = []
    for x in code:
        leaf = min(v for v in range(m) if degree[v] == 1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [v for v in range(m) if degree[v] == 1]
    edges.append((u, w))
    return edges


def _tree_flow(N: NetflowVector, edges: list[tuple[int, int]]) -> dict | None:
    m = N.n + 1
    residual = list(N.entries)
    adj = {v: set() for v in range(m)}
    for e in edges:
        adj[e[0]].add(e)
        adj[e[1]].add(e)
    flows = {}
    leaves = [v for v in range(m) if len(adj[v]) == 1]
    remaining = len(edges)
    while remaining:
        v = leaves.pop()
        if len(adj[v]) != 1:
            continue
        (e,) = adj[v]
        i, j = e
        w = j if v == i else i
        x = residual[v] if v == i else -residual[v]
        if x < 0:
            return None
        flows[e] = x
        residual[w] += residual[v]
        residual[v] = 0
        adj[v].discard(e)
        adj[w].discard(e)
        remaining -= 1
        if len(adj[w]) == 1:
            leaves.append(w)
    return flows


def generic_vertices(N: NetflowVector, max_n: int = MAX_GENERIC_N) -> list[FlowMatrix]:
    n = N.n
    if n > max_n:
        raise ResourceLimit(f"generic vertex enumeration is limited to n <= {max_n}")
    m = n + 1
    if m == 2:
        return [make_flow(N, [[N.entries[0]]])]
    seen = {}
    for code in itertools.product(range(m), repeat=m - 2):
        flows = _tree_flow(N, _prufer_edges(code, m))
        if flows is None:
            continue
        upper = [[0] * (n - i) for i in range(n)]
        for (i, j), x in flows.items():
            upper[i][j - i - 1] = x
        key = tuple(x for row in upper for x in row)
        if key not in seen:
            seen[key] = make_flow(N, upper)
    return list(seen.values())


def enumerate_vertices(N: NetflowVector, method: str = "auto") -> list[FlowMatrix]:
    """Duplicate-free vertex list in lexicographic order of the flattened edge flows."""
    n = N.n
    if method == "auto":
        if all(x > 0 for x in N.head):
            method = "positive"
        elif _is_cry(N):
            method = "cry"
        else:
            method = "generic"
    if method in ("positive", "cry") and n > MAX_SPECIAL_N:
        raise Unsupported(f"vertex enumeration is limited to n <= {MAX_SPECIAL_N}")
    if method == "positive":
        if any(x <= 0 for x in N.head):
            raise Unsupported("positive enumeration needs N_i > 0 for i < n")
        verts = positive_vertices(N)
    elif method == "cry":
        if not _is_cry(N):
            raise Unsupported("not of the form (t, 0, ..., 0, -t)")
        verts = cry_vertices(N)
    elif method == "generic":
        if not any(N.entries):
            verts = [make_flow(N, [[0] * (n - i) for i in range(n)])]
        else:
            verts = generic_vertices(N)
    else:
        raise Unsupported(f"unknown method {method!r}")
    return sorted(verts, key=lambda f: f.key())


def mean_flow(vertices: Iterable[FlowMatrix]) -> FlowMatrix:
    vertices = list(vertices)
    if not vertices:
        raise ValueError("no vertices to average")
    N = vertices[0].netflow
    n = N.n
    k = len(vertices)
    upper = [[sum((Fraction(v.upper[i][c]) for v in vertices), Fraction(0)) / k
              for c in range(n - i)] for i in range(n)]
    return make_flow(N, upper)


def write_jsonl(vertices: Iterable[FlowMatrix], out: TextIO) -> None:
    for v in vertices:
        out.write(json.dumps(flow_to_dict(v), separators=(",", ":")) + "\n")
