"""Netflow vectors, flows on the complete DAG and their transportation-matrix embedding.

Vertices are 0..n. A flow assigns f[i][j] >= 0 to each edge i -> j (i < j), and
vertex i has netflow N_i = outflow - inflow. The embedding places f[i][j] in row i,
column n - j of an n x n matrix and puts the slack g_j = sum_{i<j} (N_i - f[i][j])
at row j, column n - j. Row sums are then alpha = (s_0..s_{n-1}) and column sums
beta = reversed(alpha), where s_k are the prefix sums of N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadParams,
    EmptyPolytope,
    InfeasibleFlow,
    LengthMismatch,
    NonZeroSum,
)

FLOAT_RTOL = 1e-12


@dataclass(frozen=True)
class NetflowVector:
    entries: tuple[int, ...]
    partial_sums: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        sums = []
        acc = 0
        for e in entries[:-1]:
            acc += e
            sums.append(acc)
        object.__setattr__(self, "partial_sums", tuple(sums))

    @property
    def n(self) -> int:
        return len(self.entries) - 1

    @property
    def alpha(self) -> tuple[int, ...]:
        return self.partial_sums

    @property
    def beta(self) -> tuple[int, ...]:
        return self.partial_sums[::-1]

    @property
    def head(self) -> tuple[int, ...]:
        """The first n entries (everything except the sink)."""
        return self.entries[:-1]

    def __str__(self) -> str:
        return ",".join(str(e) for e in self.entries)


def make_netflow(entries: Iterable[int]) -> NetflowVector:
    entries = [int(e) for e in entries]
    if len(entries) < 2:
        raise BadParams("a netflow vector needs at least two entries")
    if sum(entries) != 0:
        raise NonZeroSum(f"entries sum to {sum(entries)}, expected 0")
    N = NetflowVector(tuple(entries))
    for k, s in enumerate(N.partial_sums):
        if s < 0:
            raise EmptyPolytope(f"s_{k} = {s} < 0, the flow polytope is empty")
    return N


def parse_netflow(text: str) -> NetflowVector:
    """Parse a comma-separated list such as ``1,1,1,-3``."""
    try:
        entries = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise BadParams(f"cannot parse netflow {text!r}") from exc
    return make_netflow(entries)


def netflow_from_head(head: Sequence[int]) -> NetflowVector:
    """Append the sink entry -sum(head)."""
    head = [int(x) for x in head]
    return make_netflow(head + [-sum(head)])


# --- named families -------------------------------------------------------

FAMILY_TAGS = ("cry", "tesler", "dilated_tesler", "staircase", "two_rho",
               "linear", "constant_an", "power")

_DEFAULTS = {"t": 1, "a": 1, "p": 1}


@dataclass(frozen=True)
class NamedFamily:
    tag: str
    params: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def make(cls, tag: str, **params) -> "NamedFamily":
        if tag not in FAMILY_TAGS:
            raise BadParams(f"unknown family {tag!r}; choose from {', '.join(FAMILY_TAGS)}")
        clean = {}
        for key, value in params.items():
            if value is None:
                continue
            if key not in _DEFAULTS:
                raise BadParams(f"unknown parameter {key!r}")
            clean[key] = Fraction(value) if not isinstance(value, float) else Fraction(value).limit_denominator(10**6)
        return cls(tag, tuple(sorted(clean.items())))

    def get(self, key: str) -> Fraction:
        return dict(self.params).get(key, Fraction(_DEFAULTS[key]))

    def label(self) -> str:
        used = _USED_PARAMS[self.tag]
        return ";".join(f"{k}={self.get(k)}" for k in used)


_USED_PARAMS = {
    "cry": ("t",), "tesler": (), "dilated_tesler": ("t",), "staircase": ("t",),
    "two_rho": ("t",), "linear": ("a",), "constant_an": ("a",), "power": ("a", "p"),
}


def _as_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise BadParams(f"{what} = {x} is not an integer")
    return int(x)


def family(f: NamedFamily | str, n: int, **params) -> NetflowVector:
    """Netflow vector of a named family on n+1 vertices."""
    if isinstance(f, str):
        f = NamedFamily.make(f, **params)
    if n < 1:
        raise BadParams("n must be positive")
    tag = f.tag
    t, a, p = f.get("t"), f.get("a"), f.get("p")
    if tag in ("cry", "dilated_tesler", "two_rho"):
        t = _as_int(t, "t")
        if t < 1:
            raise BadParams("t must be a positive integer")
    if tag == "staircase":
        t = _as_int(t, "t")
        if t < 0:
            raise BadParams("t must be a nonnegative integer")
    if tag in ("linear", "constant_an", "power") and a <= 0:
        raise BadParams("a must be positive")
    if tag == "power" and p < 0:
        raise BadParams("p must be nonnegative")

    if tag == "cry":
        head = [t] + [0] * (n - 1)
    elif tag == "tesler":
        head = [1] * n
    elif tag == "dilated_tesler":
        head = [t] * n
    elif tag == "staircase":
        head = [t + i for i in range(n)]
    elif tag == "two_rho":
        head = [t * (n - 2 * i) for i in range(n)]
    elif tag == "linear":
        head = [_as_int(a * n + i, "a*n+i") for i in range(n)]
    elif tag == "constant_an":
        head = [_as_int(a * n, "a*n")] * n
    else:  # power
        if p.denominator != 1:
            head = [math.ceil(float(a) * k ** float(p)) for k in range(n)]
        else:
            head = [math.ceil(a * Fraction(k) ** int(p)) for k in range(n)]
    return netflow_from_head(head)


# --- flows ----------------------------------------------------------------

def _is_exact(x) -> bool:
    return isinstance(x, (int, Rational)) and not isinstance(x, bool)


@dataclass(frozen=True)
class FlowMatrix:
    """A point of the flow polytope of ``netflow``.

    ``upper[i][j - i - 1]`` is the flow on edge i -> j for 0 <= i < j <= n and
    ``subdiag[j - 1]`` is the slack g_j for 1 <= j <= n - 1.
    """

    netflow: NetflowVector
    upper: tuple[tuple, ...]
    subdiag: tuple

    @property
    def n(self) -> int:
        return self.netflow.n

    @property
    def exact(self) -> bool:
        return all(_is_exact(x) for row in self.upper for x in row)

    @property
    def integral(self) -> bool:
        return self.exact and all(Fraction(x).denominator == 1 for row in self.upper for x in row)

    def flow(self, i: int, j: int):
        return self.upper[i][j - i - 1]

    def g(self, j: int):
        return self.subdiag[j - 1]

    def entries(self) -> list:
        """All support entries of the embedding (flows then slacks)."""
        return [x for row in self.upper for x in row] + list(self.subdiag)

    def to_float(self) -> "FlowMatrix":
        return FlowMatrix(self.netflow,
                          tuple(tuple(float(x) for x in row) for row in self.upper),
                          tuple(float(x) for x in self.subdiag))

    def key(self) -> tuple:
        return tuple(x for row in self.upper for x in row)


def _coerce(x):
    if isinstance(x, bool):
        raise InfeasibleFlow("boolean is not a flow value")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    return float(x)


def make_flow(N: NetflowVector, upper: Sequence[Sequence], check: bool = True) -> FlowMatrix:
    """Build a FlowMatrix from the edge flows, deriving the slacks g_j.

    ``upper`` may be given either ragged (row i lists f[i][i+1..n]) or as a full
    (n+1) x (n+1) array indexed by vertex pairs.
    """
    n = N.n
    rows = []
    if len(upper) == n + 1 and all(len(r) == n + 1 for r in upper):
        for i in range(n):
            rows.append(tuple(_coerce(upper[i][j]) for j in range(i + 1, n + 1)))
    else:
        if len(upper) != n or any(len(upper[i]) != n - i for i in range(n)):
            raise LengthMismatch("upper must have rows of lengths n, n-1, ..., 1")
        for i in range(n):
            rows.append(tuple(_coerce(x) for x in upper[i]))
    if any(isinstance(x, float) for r in rows for x in r):
        rows = [tuple(float(x) for x in r) for r in rows]
    rows = tuple(rows)
    inflow = [0] * (n + 1)
    for i in range(n):
        for j in range(i + 1, n + 1):
            inflow[j] = inflow[j] + rows[i][j - i - 1]
    subdiag = tuple(N.partial_sums[j - 1] - inflow[j] for j in range(1, n))
    f = FlowMatrix(N, rows, subdiag)
    if check:
        check_flow(f)
    return f


def check_flow(f: FlowMatrix) -> None:
    """Raise InfeasibleFlow unless f is a point of the flow polytope."""
    N = f.netflow
    n = N.n
    exact = f.exact
    scale = max([1] + list(N.partial_sums))
    tol = 0 if exact else FLOAT_RTOL * scale
    for i, row in enumerate(f.upper):
        for x in row:
            if x < -tol:
                raise InfeasibleFlow(f"negative flow {x} leaving vertex {i}")
    for j, g in enumerate(f.subdiag, start=1):
        if g < -tol:
            raise InfeasibleFlow(f"slack g_{j} = {g} < 0")
    inflow = [0] * (n + 1)
    for i in range(n):
        for j in range(i + 1, n + 1):
            inflow[j] += f.upper[i][j - i - 1]
    for i in range(n):
        net = sum(f.upper[i]) - inflow[i]
        if abs(net - N.entries[i]) > tol:
            raise InfeasibleFlow(f"vertex {i} has netflow {net}, expected {N.entries[i]}")


def flow_from_embedded(N: NetflowVector, A: Sequence[Sequence], check: bool = True) -> FlowMatrix:
    """Inverse of :func:`embed`: read f[i][j] from row i, column n - j."""
    n = N.n
    upper = [[A[i][n - j] for j in range(i + 1, n + 1)] for i in range(n)]
    return make_flow(N, upper, check=check)


def zero_flow(N: NetflowVector) -> FlowMatrix:
    if any(N.entries):
        raise InfeasibleFlow("the zero flow only exists for the zero netflow")
    n = N.n
    return make_flow(N, [[0] * (n - i) for i in range(n)])


def support(n: int) -> list[tuple[int, int]]:
    """Matrix positions (row, column) that may be nonzero in an embedding."""
    return [(i, c) for i in range(n) for c in range(n) if i + c <= n]


def embed(f: FlowMatrix, N: NetflowVector | None = None) -> list[list]:
    """The n x n transportation matrix of a flow (zeros off the support)."""
    if N is not None and N != f.netflow:
        raise InfeasibleFlow("flow belongs to a different netflow vector")
    n = f.n
    tol = 0 if f.exact else FLOAT_RTOL * max([1] + list(f.netflow.partial_sums))
    for j, g in enumerate(f.subdiag, start=1):
        if g < -tol:
            raise InfeasibleFlow(f"slack g_{j} = {g} < 0")
    zero = Fraction(0) if f.exact else 0.0
    A = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n + 1):
            A[i][n - j] = f.upper[i][j - i - 1]
    for j in range(1, n):
        A[j][n - j] = f.subdiag[j - 1]
    return A


def embed_array(f: FlowMatrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in embed(f)], dtype=float)


def dominates(Np: Sequence[int], Mp: Sequence[int]) -> bool:
    """Prefix-sum (dominance) order: True iff every prefix of Np is >= that of Mp."""
    if len(Np) != len(Mp):
        raise LengthMismatch(f"lengths {len(Np)} and {len(Mp)} differ")
    a = b = 0
    for x, y in zip(Np, Mp):
        a += x
        b += y
        if a < b:
            return False
    return True


def project_ps(f: FlowMatrix) -> list:
    """Flows into the sink from vertices 0..n-2."""
    n = f.n
    y = [f.flow(i, n) for i in range(n - 1)]
    acc = 0
    tol = 0 if f.exact else FLOAT_RTOL * max([1] + list(f.netflow.partial_sums))
    for k in range(n - 1):
        acc += y[k]
        assert acc <= f.netflow.partial_sums[k] + tol, "projection left the Pitman-Stanley polytope"
    return y


def project_box(f: FlowMatrix) -> list:
    """Outflow x_i of each vertex 0..n-1; always N_i <= x_i <= s_i."""
    N = f.netflow
    x = [sum(row) for row in f.upper]
    tol = 0 if f.exact else FLOAT_RTOL * max([1] + list(N.partial_sums))
    for i, xi in enumerate(x):
        assert N.entries[i] - tol <= xi <= N.partial_sums[i] + tol, "outflow outside its box"
    return x


def box_bounds(N: NetflowVector) -> list[tuple[int, int]]:
    return [(N.entries[i], N.partial_sums[i]) for i in range(N.n)]


# --- serialization --------------------------------------------------------

def _json_value(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def _parse_value(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def flow_to_dict(f: FlowMatrix) -> dict:
    return {
        "n": f.n,
        "upper": [_json_value(x) for row in f.upper for x in row],
        "subdiag": [_json_value(x) for x in f.subdiag],
    }


def flow_to_json(f: FlowMatrix) -> str:
    return json.dumps(flow_to_dict(f), separators=(",", ":"))


def flow_from_dict(d: dict) -> FlowMatrix:
    n = int(d["n"])
    flat = [_parse_value(x) for x in d["upper"]]
    if len(flat) != n * (n + 1) // 2:
        raise LengthMismatch("upper has the wrong number of entries")
    rows, pos = [], 0
    for i in range(n):
        rows.append(flat[pos:pos + n - i])
        pos += n - i
    inflow = [0] * (n + 1)
    for i in range(n):
        for j in range(i + 1, n + 1):
            inflow[j] += rows[i][j - i - 1]
    head = [sum(rows[i]) - inflow[i] for i in range(n)]
    if any(isinstance(h, float) for h in head):
        head = [round(h) for h in head]
    N = netflow_from_head([int(h) for h in head])
    f = make_flow(N, rows)
    given = [_parse_value(x) for x in d.get("subdiag", [])]
    if given and any(abs(a - b) > (0 if f.exact else 1e-9) for a, b in zip(given, f.subdiag)):
        raise InfeasibleFlow("subdiag does not match the flow")
    return f


def flow_from_json(text: str) -> FlowMatrix:
    return flow_from_dict(json.loads(text))
