"""Flow entropy and the lattice-point bounds it certifies.

For any point f of the flow polytope,

    log K(N) >= correction_log(N) + H(f),

and log K(N) <= sup_f H(f). All sums go through math.fsum, so two sums over the
same multiset of float terms agree to the last bit regardless of order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InfeasibleFlow, NegativeArg, ZeroMarginal
from .flow_core import (
    FlowMatrix,
    NetflowVector,
    check_flow,
    embed,
    make_flow,
)

METHODS = ("entropy_at_flow", "entropy_opt", "lidskii", "closed_form", "asymptotic", "volume")
RATIONAL_DENOMINATOR = 10**9


def h(t) -> float:
    """(t+1) log(t+1) - t log t, with h(0) = 0."""
    t = float(t)
    if t < 0:
        raise NegativeArg(f"h is undefined at {t}")
    if t == 0:
        return 0.0
    if t < 1:
        # 1/t overflows for subnormal t
        return math.log1p(t) + t * (math.log1p(t) - math.log(t))
    return math.log1p(t) + t * math.log1p(1.0 / t)


def xlogx(x) -> float:
    x = float(x)
    return 0.0 if x == 0 else x * math.log(x)


@dataclass(frozen=True)
class BoundReport:
    log_lower: float
    log_upper: float | None
    method: str
    certified: bool

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if (self.certified and self.log_upper is not None
                and self.log_lower > self.log_upper):
            raise ValueError("certified lower bound exceeds certified upper bound")

    def to_dict(self) -> dict:
        return {"log_lower": self.log_lower, "log_upper": self.log_upper,
                "method": self.method, "certified": self.certified}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _owned(f: FlowMatrix, N: NetflowVector | None) -> NetflowVector:
    if N is not None and N != f.netflow:
        raise InfeasibleFlow("flow belongs to a different netflow vector")
    return f.netflow


def entropy_terms(f: FlowMatrix) -> list[float]:
    return [h(x) for x in f.entries()]


def flow_entropy(f: FlowMatrix, N: NetflowVector | None = None) -> float:
    """Sum of h over the flows and the slacks g_j."""
    _owned(f, N)
    check_flow(f)
    return math.fsum(entropy_terms(f))


def correction_terms(N: NetflowVector) -> list[float]:
    hs = [h(s) for s in N.partial_sums]
    return [max(hs, default=0.0)] + [-2.0 * x for x in hs]


def correction_log(N: NetflowVector) -> float:
    """max_k h(s_k) - 2 sum_k h(s_k); always <= 0."""
    return math.fsum(correction_terms(N))


def rationalize_flow(f: FlowMatrix, max_denominator: int = RATIONAL_DENOMINATOR) -> FlowMatrix:
    """Round a float flow to nearby rationals and restore exact conservation.

    Every edge except the edges into the sink is rounded; the sink edges form a
    spanning tree of the DAG and are solved from conservation at each vertex.
    Raises InfeasibleFlow if the repaired point leaves the polytope.
    """
    if f.exact:
        check_flow(f)
        return f
    N = f.netflow
    n = N.n
    rows = [[Fraction(x).limit_denominator(max_denominator) for x in row] for row in f.upper]
    for i in range(n):
        for k in range(len(rows[i])):
            if rows[i][k] < 0:
                rows[i][k] = Fraction(0)
    inflow = [Fraction(0)] * (n + 1)
    for i in range(n):
        inflow_i = inflow[i]
        out_other = sum(rows[i][:-1], Fraction(0))
        rows[i][-1] = N.entries[i] + inflow_i - out_other
        for j in range(i + 1, n + 1):
            inflow[j] += rows[i][j - i - 1]
    repaired = make_flow(N, rows, check=False)
    check_flow(repaired)
    return repaired


def lower_terms(f: FlowMatrix) -> list[float]:
    return correction_terms(f.netflow) + entropy_terms(f)


def lower_bound_at(f: FlowMatrix, N: NetflowVector | None = None) -> BoundReport:
    """Certified lower bound on log K from any point of the polytope."""
    _owned(f, N)
    f = rationalize_flow(f)
    return BoundReport(math.fsum(lower_terms(f)), None, "entropy_at_flow", True)


def upper_bound_at(f_star: FlowMatrix, N: NetflowVector | None = None,
                   opt_gap: float = 0.0, gap_certified: bool = False) -> BoundReport:
    """Upper bound on log K from a near-maximizer of the entropy.

    ``opt_gap`` must bound sup H - H(f_star) from above; the report is
    certified only when the caller vouches for that gap (``gap_certified``).
    """
    _owned(f_star, N)
    f_star = rationalize_flow(f_star)
    if opt_gap < 0:
        raise ValueError("optimality gap must be nonnegative")
    H = math.fsum(entropy_terms(f_star))
    lower = math.fsum(lower_terms(f_star))
    return BoundReport(lower, H + opt_gap, "entropy_opt", bool(gap_certified))


def volume_log_terms(f: FlowMatrix) -> list[float]:
    N = f.netflow
    n = N.n
    if any(s <= 0 for s in N.partial_sums):
        raise ZeroMarginal("every s_k must be positive for the volume bound")
    A = embed(f)
    entries = [A[i][c] for i in range(n) for c in range(n) if i + c <= n]
    if any(a <= 0 for a in entries):
        raise ZeroMarginal("the flow has a zero entry on the support")
    terms = [float(n * (n - 1) // 2), math.lgamma(n + 1), math.log(max(N.partial_sums))]
    terms += [-2.0 * math.log(s) for s in N.partial_sums]
    terms += [math.log(float(a)) for a in entries]
    return terms


def volume_lower_bound(f: FlowMatrix, N: NetflowVector | None = None) -> float:
    """Log of a lower bound on the relative Euclidean volume of the embedded polytope."""
    _owned(f, N)
    check_flow(f)
    return math.fsum(volume_log_terms(f))


def log_sum(values: Iterable[float]) -> float:
    return math.fsum(values)
