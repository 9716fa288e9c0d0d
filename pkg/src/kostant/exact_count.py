"""Exact lattice-point counts for flow polytopes of the complete DAG.

The main routine peels one endpoint vertex at a time. Removing the source
(vertex 0) and distributing its outflow f_1..f_m over the edges 0 -> i leaves
the same problem on vertices 1..m with netflow v_i + f_i. A sink peel is the
mirror image of a source peel under v -> -reversed(v), which preserves counts,
so every state is oriented to peel the endpoint with the smaller flow.
States whose prefix sums hit zero split into independent blocks.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import Disconnected, ResourceLimit
from .flow_core import NetflowVector, make_netflow

DEFAULT_MAX_STATES = int(os.environ.get("KOSTANT_MAX_STATES", 10**8))


def _as_netflow(N) -> NetflowVector:
    return N if isinstance(N, NetflowVector) else make_netflow(N)


class _Counter:
    def __init__(self, max_states: int):
        self.memo: dict[tuple, int] = {}
        self.max_states = max_states

    def count(self, v: tuple) -> int:
        blocks = _split(v)
        total = 1
        for b in blocks:
            total *= self._block(b)
            if total == 0:
                return 0
        return total

    def _block(self, v: tuple) -> int:
        # v has positive interior prefix sums; canonical orientation first
        m = len(v) - 1
        if m <= 1:
            return 1
        if m == 2:
            # source a, middle b, sink -(a+b): K = min(a, a+b) + 1
            return min(v[0], v[0] + v[1]) + 1
        w = tuple(-x for x in reversed(v))
        if (w[0], w) < (v[0], v):
            v = w
        hit = self.memo.get(v)
        if hit is not None:
            return hit
        total = 0
        for rest in _source_peels(v):
            total += self.count(rest)
        self.memo[v] = total
        if len(self.memo) > self.max_states:
            raise ResourceLimit(f"more than {self.max_states} DP states")
        return total


def _split(v: tuple) -> list[tuple]:
    """Cut at zero prefix sums and strip isolated zero endpoints."""
    blocks = []
    start = 0
    acc = 0
    for k in range(len(v) - 1):
        acc += v[k]
        if acc == 0:
            if k > start:
                blocks.append(v[start:k + 1])
            start = k + 1
    if len(v) - 1 > start:
        blocks.append(v[start:])
    return blocks


def _source_peels(v: tuple):
    """Residual vectors on vertices 1..m after routing the source's outflow.

    With f_i the flow on edge 0 -> i and T_k = f_k + ... + f_m, the residual is
    feasible iff T_{k+1} <= s_k for k = 1..m-1 and T_1 = v_0.
    """
    m = len(v) - 1
    s = list(itertools.accumulate(v))
    caps = [min(s[k - 1], v[0]) for k in range(m + 1)]  # caps[k] bounds T_k
    f = [0] * (m + 1)
    base = list(v[1:])

    def rec(k: int, tail: int):
        if k == 1:
            f[1] = v[0] - tail
            yield tuple(base[i - 1] + f[i] for i in range(1, m + 1))
            return
        for x in range(caps[k] - tail + 1):
            f[k] = x
            yield from rec(k - 1, tail + x)

    yield from rec(m, 0)


def count_exact(N, max_states: int | None = None) -> int:
    """K_n(N), the number of integer flows with netflow N."""
    N = _as_netflow(N)
    counter = _Counter(DEFAULT_MAX_STATES if max_states is None else max_states)
    return counter.count(N.entries)


def count_brute(N, cap: int = 10**7) -> int:
    """Independent enumeration of all integer flows, without memoization.

    Vertices 0..n-3 enumerate every split of their outflow; the last two
    interior vertices are counted in closed form. ``cap`` bounds the number of
    enumerated partial flows.
    """
    N = _as_netflow(N)
    v = list(N.entries)
    n = N.n
    if n <= 1:
        return 1
    visited = 0

    def splits(total: int, parts: int):
        if parts == 1:
            yield (total,)
            return
        for x in range(total + 1):
            for rest in splits(total - x, parts - 1):
                yield (x,) + rest

    def rec(i: int, inflow: list[int]) -> int:
        nonlocal visited
        visited += 1
        if visited > cap:
            raise ResourceLimit(f"brute force exceeded {cap} partial flows")
        if i == n - 1:
            out = v[i] + inflow[i]
            return 1 if out >= 0 else 0
        if i == n - 2:
            # out_a = v_a + in_a splits into (a->b, a->sink); vertex b then needs
            # v_b + in_b + x >= 0 where x is the a->b flow
            a, b = i, i + 1
            out_a = v[a] + inflow[a]
            if out_a < 0:
                return 0
            lo = max(0, -(v[b] + inflow[b]))
            return max(0, out_a - lo + 1)
        out = v[i] + inflow[i]
        if out < 0:
            return 0
        total = 0
        targets = n - i
        for split in splits(out, targets):
            new = inflow[:]
            for k, x in enumerate(split):
                new[i + 1 + k] += x
            total += rec(i + 1, new)
        return total

    return rec(0, [0] * (n + 1))


# --- unit flows on a general DAG --------------------------------------------

@dataclass(frozen=True)
class Dag:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted(set((int(i), int(j)) for i, j in self.edges)))
        for i, j in edges:
            if not 0 <= i < j < self.n_vertices:
                raise ValueError(f"edge {(i, j)} is not of the form i<j within range")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def complete(cls, n_vertices: int) -> "Dag":
        return cls(n_vertices, tuple(itertools.combinations(range(n_vertices), 2)))

    @classmethod
    def path(cls, n_vertices: int) -> "Dag":
        return cls(n_vertices, tuple((i, i + 1) for i in range(n_vertices - 1)))

    def is_connected(self) -> bool:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            parent[find(i)] = find(j)
        return len({find(x) for x in range(self.n_vertices)}) == 1


def unit_flow_matrix(G: Dag, sign: int = -1) -> sympy.Matrix:
    """The n x n matrix with -1 (or +1) below the diagonal and 1 where (i, j+1) is an edge.

    Rows and columns are indexed 0..n-1 for a DAG on vertices 0..n.
    """
    n = G.n_vertices - 1
    E = set(G.edges)
    M = sympy.zeros(n, n)
    for i in range(n):
        if i >= 1:
            M[i, i - 1] = sign
        for j in range(i, n):
            if (i, j + 1) in E:
                M[i, j] = 1
    return M


def count_unit_flows_det(G: Dag, cross_check: bool = True) -> int:
    """Number of unit flows from vertex 0 to vertex n as an exact determinant."""
    if not G.is_connected():
        raise Disconnected("the DAG is not connected")
    n = G.n_vertices - 1
    if n == 0:
        return 1
    det = int(unit_flow_matrix(G, -1).det(method="bareiss"))
    if cross_check and n <= 8:
        perm = int(unit_flow_matrix(G, 1).per())
        assert perm == det, f"permanent {perm} != determinant {det}"
    return det


def count_paths(G: Dag) -> int:
    """Number of directed paths 0 -> n by dynamic programming."""
    n = G.n_vertices - 1
    ways = [0] * (n + 1)
    ways[0] = 1
    for i, j in G.edges:  # sorted, so i is final before use
        ways[j] += ways[i]
    return ways[n]


# --- permutation statistics -------------------------------------------------

def inversion_numbers(n: int) -> list[int]:
    """Coefficients I_{n,0..C(n,2)} of the q-factorial [n]_q!."""
    coeffs = [1]
    for m in range(1, n + 1):
        new = [0] * (len(coeffs) + m - 1)
        for i, c in enumerate(coeffs):
            for k in range(m):
                new[i + k] += c
        coeffs = new
    return coeffs


def inversions_at_most(n: int, k: int) -> int:
    """J_{n,k}: permutations of n letters with at most k inversions."""
    if k < 0:
        return 0
    return sum(inversion_numbers(n)[:k + 1])


def partition_count(t: int) -> int:
    """Number of integer partitions of t via Euler's pentagonal recurrence."""
    if t < 0:
        return 0
    p = [1] + [0] * t
    for m in range(1, t + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p[t]


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    M = sympy.Matrix(rows)
    if M.det() == 0:
        return None
    sol = M.LUsolve(sympy.Matrix(rhs))
    return [Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in sol]


def fit_recurrence(seq: Sequence[int], max_order: int, holdout: int | None = None,
                   max_offset: int | None = None) -> list[Fraction] | None:
    """Smallest-order constant-coefficient recurrence a_k = sum_i c_i a_{k-i}.

    Coefficients are solved exactly from the earliest usable window and must
    reproduce every later term. A recurrence may start after an offset
    (initial terms that do not follow it) as long as at least ``holdout``
    terms beyond the fitted window validate it. Returns [c_1..c_d] or None.
    """
    seq = [Fraction(x) for x in seq]
    if len(seq) < 2 * max_order + 2:
        raise ValueError("sequence too short for the requested order")
    if holdout is None:
        holdout = 2
    for d in range(1, max_order + 1):
        offsets = range(0, (len(seq) - 2 * d - holdout) + 1 if max_offset is None
                        else min(max_offset, len(seq) - 2 * d - holdout) + 1)
        for off in offsets:
            rows = [[seq[k - i] for i in range(1, d + 1)] for k in range(off + d, off + 2 * d)]
            rhs = [seq[k] for k in range(off + d, off + 2 * d)]
            coeffs = _solve_exact(rows, rhs)
            if coeffs is None:
                continue
            ok = all(seq[k] == sum(c * seq[k - i] for i, c in enumerate(coeffs, start=1))
                     for k in range(off + 2 * d, len(seq)))
            if ok and len(seq) - (off + 2 * d) >= holdout:
                return coeffs
    return None


def double_factorial(m: int) -> int:
    return math.prod(range(m, 0, -2)) if m > 0 else 1
