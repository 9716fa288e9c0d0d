"""Capacity of the flow generating function and the entropy supremum.

With x_i = e^{u_i}, y_c = e^{v_c} and w = u_i + v_c < 0 on the support
S = {(i, c): i + c <= n}, the log-capacity is the convex dual

    D(u, v) = sum_S phi(u_i + v_c) - <u, alpha> - <v, beta>,

minimized by alternating row/column scaling. The entropic kernel uses
phi(w) = -log(1 - e^w), whose stationary matrix a = e^w / (1 - e^w) is the
entropy maximizer. The volume kernel uses phi(w) = -log(-w) and a = -1/w.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, TextIO

import numpy as np

from .entropy_bounds import entropy_terms, rationalize_flow
from .errors import NoConvergence, ZeroMarginal
from .flow_core import FlowMatrix, NetflowVector, make_flow, make_netflow, support

DEFAULT_TOL = 1e-9
DEFAULT_MAX_SWEEPS = 100_000
EPS = 1e-15


@dataclass(frozen=True)
class Kernel:
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    a: Callable[[np.ndarray], np.ndarray]
    da: Callable[[np.ndarray], np.ndarray]


def _ent_a(w):
    return 1.0 / np.expm1(-w)


def _ent_da(w):
    a = 1.0 / np.expm1(-w)
    return a * (1.0 + a)


ENTROPIC = Kernel("entropic", lambda w: -np.log(-np.expm1(w)), _ent_a, _ent_da)
VOLUME = Kernel("volume", lambda w: -np.log(-w), lambda w: -1.0 / w, lambda w: 1.0 / (w * w))


@dataclass(frozen=True)
class ScalingPoint:
    """Dual point; x_i y_c < 1 on the support."""

    x: tuple[float, ...]
    y: tuple[float, ...]

    @property
    def u(self) -> np.ndarray:
        return np.log(np.array(self.x))

    @property
    def v(self) -> np.ndarray:
        return np.log(np.array(self.y))


@dataclass
class ScalingResult:
    flow: FlowMatrix
    primal: float  # objective at the repaired rational flow
    dual: float  # dual objective at the final scaling point
    gap: float  # rigorous dual - primal, nonnegative
    residual: float
    sweeps: int
    point: ScalingPoint
    used_fallback: bool = False
    trace: list[tuple[int, float, float]] = field(default_factory=list)


class _Problem:
    def __init__(self, N: NetflowVector, kernel: Kernel):
        n = N.n
        self.N = N
        self.n = n
        self.kernel = kernel
        alpha = np.array(N.alpha, dtype=float)
        beta = np.array(N.beta, dtype=float)
        self.rows = [i for i in range(n) if alpha[i] > 0]
        self.cols = [c for c in range(n) if beta[c] > 0]
        self.alpha = alpha[self.rows]
        self.beta = beta[self.cols]
        mask = np.zeros((len(self.rows), len(self.cols)), dtype=bool)
        for r, i in enumerate(self.rows):
            for k, c in enumerate(self.cols):
                mask[r, k] = i + c <= n
        self.mask = mask
        if len(self.rows) and (not mask.any(axis=1).all() or not mask.any(axis=0).all()):
            raise ZeroMarginal("a positive marginal has no support entries")

    def w(self, u, v):
        return np.where(self.mask, u[:, None] + v[None, :], -np.inf)

    def dual(self, u, v) -> float:
        w = (u[:, None] + v[None, :])[self.mask]
        if np.any(w >= 0):
            return math.inf
        return math.fsum(self.kernel.phi(w).tolist()) - math.fsum((self.alpha * u).tolist()) \
            - math.fsum((self.beta * v).tolist())

    def matrix(self, u, v) -> np.ndarray:
        w = u[:, None] + v[None, :]
        out = np.zeros_like(w)
        out[self.mask] = self.kernel.a(w[self.mask])
        return out

    def residual(self, u, v) -> float:
        A = self.matrix(u, v)
        return float(max(np.max(np.abs(A.sum(axis=1) - self.alpha)),
                         np.max(np.abs(A.sum(axis=0) - self.beta))))


def _scale_side(other: np.ndarray, mask: np.ndarray, target: np.ndarray, kernel: Kernel,
                start: np.ndarray) -> np.ndarray:
    """Solve sum_c a(x_r + other_c) = target_r for every r (mask picks the c's).

    The left side increases from 0 to infinity as x_r approaches
    -max_c other_c, and a(w) <= -1/w gives a point where it is below target.
    """
    big = np.where(mask, other[None, :], -np.inf)
    hi = -big.max(axis=1)
    m = mask.sum(axis=1)
    lo = hi - m / target
    x = np.clip(start, lo, hi - EPS * np.maximum(1.0, np.abs(hi)))
    x = np.where(np.isfinite(x), x, lo)
    for _ in range(300):
        w = np.where(mask, x[:, None] + other[None, :], -np.inf)
        wm = w[mask]
        a = np.zeros_like(w)
        da = np.zeros_like(w)
        a[mask] = kernel.a(wm)
        da[mask] = kernel.da(wm)
        F = a.sum(axis=1) - target
        dF = da.sum(axis=1)
        done = np.abs(F) <= 1e-14 * target
        if done.all():
            break
        lo = np.where(F < 0, x, lo)
        hi = np.where(F > 0, x, hi)
        newton = x - F / dF
        mid = 0.5 * (lo + hi)
        ok = (newton > lo) & (newton < hi) & np.isfinite(newton)
        step = np.where(ok, newton, mid)
        x = np.where(done, x, step)
        if np.all(((hi - lo) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(hi))) | done):
            break
    return x


def _gauge(u, v):
    if len(u) == 0:
        return u, v
    c = 0.5 * (v.mean() - u.mean())
    return u + c, v - c


def _gradient_fallback(P: _Problem, u, v, tol, max_iter, trace, it0):
    """Damped gradient descent with Armijo backtracking on the dual."""
    D = P.dual(u, v)
    step = 1.0
    for it in range(max_iter):
        A = P.matrix(u, v)
        gu = A.sum(axis=1) - P.alpha
        gv = A.sum(axis=0) - P.beta
        res = float(max(np.abs(gu).max(), np.abs(gv).max()))
        if trace is not None:
            trace.append((it0 + it, res, D))
        if res <= tol:
            return u, v, True
        g2 = float(gu @ gu + gv @ gv)
        step = min(step * 2.0, 1e6)
        while True:
            nu, nv = u - step * gu, v - step * gv
            nD = P.dual(nu, nv)
            if nD <= D - 0.5 * step * g2:
                break
            step *= 0.5
            if step < 1e-300:
                return u, v, False
        u, v = _gauge(nu, nv)
        D = nD
    return u, v, False


def _solve(N: NetflowVector, kernel: Kernel, tol: float, max_sweeps: int,
           stall_window: int = 2000) -> tuple[_Problem, np.ndarray, np.ndarray, int, float, bool, list]:
    if tol <= 0:
        raise ValueError("tol must be positive")
    P = _Problem(N, kernel)
    trace: list[tuple[int, float, float]] = []
    if not P.rows:
        return P, np.zeros(0), np.zeros(0), 0, 0.0, False, trace
    u = np.full(len(P.rows), -1.0)
    v = np.zeros(len(P.cols))
    D = P.dual(u, v)
    best_res = math.inf
    best_at = 0
    res = math.inf
    sweep = 0
    for sweep in range(1, max_sweeps + 1):
        u = _scale_side(v, P.mask, P.alpha, kernel, u)
        v = _scale_side(u, P.mask.T, P.beta, kernel, v)
        u, v = _gauge(u, v)
        newD = P.dual(u, v)
        assert newD <= D + 1e-11 * (1.0 + abs(D)), "dual objective increased during scaling"
        D = newD
        res = P.residual(u, v)
        trace.append((sweep, res, D))
        if res <= tol:
            return P, u, v, sweep, res, False, trace
        if res < 0.5 * best_res:
            best_res, best_at = res, sweep
        elif sweep - best_at > stall_window:
            break
    u, v, ok = _gradient_fallback(P, u, v, tol, max(1000, max_sweeps - sweep), trace, sweep)
    if not ok:
        raise NoConvergence(f"marginal residual {P.residual(u, v):.3e} after {sweep} sweeps")
    return P, u, v, sweep, P.residual(u, v), True, trace


def _flow_from_matrix(P: _Problem, A: np.ndarray) -> FlowMatrix:
    N, n = P.N, P.n
    full = np.zeros((n, n))
    for r, i in enumerate(P.rows):
        for k, c in enumerate(P.cols):
            full[i, c] = A[r, k]
    upper = [[float(full[i, n - j]) for j in range(i + 1, n + 1)] for i in range(n)]
    f = make_flow(N, upper, check=False)
    return rationalize_flow(f)


def _point(P: _Problem, u, v) -> ScalingPoint:
    n = P.n
    x = [0.0] * n
    y = [0.0] * n
    for r, i in enumerate(P.rows):
        x[i] = float(math.exp(u[r]))
    for k, c in enumerate(P.cols):
        y[c] = float(math.exp(v[k]))
    return ScalingPoint(tuple(x), tuple(y))


def _certified_gap(dual: float, primal: float) -> float:
    # both sides are fsum-accurate; a relative slack absorbs kernel rounding
    return max(dual - primal, 0.0) + 1e-12 * max(1.0, abs(dual))


def zero_cut_blocks(N: NetflowVector) -> list[tuple[int, int]]:
    """Vertex ranges [start, end] between cuts with s_k = 0; no flow crosses such a cut."""
    blocks = []
    start = 0
    for k, s in enumerate(N.partial_sums):
        if s == 0:
            if k > start:
                blocks.append((start, k))
            start = k + 1
    if N.n > start:
        blocks.append((start, N.n))
    return blocks


def _assemble(N: NetflowVector, pieces: list[tuple[int, FlowMatrix]]) -> FlowMatrix:
    n = N.n
    upper = [[Fraction(0)] * (n - i) for i in range(n)]
    for start, f in pieces:
        m = f.n
        for i in range(m):
            for j in range(i + 1, m + 1):
                upper[start + i][start + j - (start + i) - 1] = f.flow(i, j)
    return make_flow(N, upper)


def solve_entropy(N: NetflowVector, tol: float = DEFAULT_TOL,
                  max_sweeps: int = DEFAULT_MAX_SWEEPS) -> ScalingResult:
    """Maximize the flow entropy blockwise and certify with the capacity dual."""
    blocks = zero_cut_blocks(N)
    pieces = []
    dual = 0.0
    res_max = 0.0
    sweeps = 0
    fallback = False
    trace: list[tuple[int, float, float]] = []
    x = [0.0] * N.n
    y = [0.0] * N.n
    for start, end in blocks:
        B = make_netflow(N.entries[start:end + 1])
        P, u, v, sw, res, fb, tr = _solve(B, ENTROPIC, tol, max_sweeps)
        pieces.append((start, _flow_from_matrix(P, P.matrix(u, v))))
        dual += P.dual(u, v)
        res_max = max(res_max, res)
        sweeps += sw
        fallback = fallback or fb
        trace.extend(tr)
        pt = _point(P, u, v)
        for i in range(B.n):
            x[start + i] = pt.x[i]
            y[N.n - end + i] = pt.y[i]
    f = _assemble(N, pieces)
    primal = math.fsum(entropy_terms(f))
    return ScalingResult(f, primal, dual, _certified_gap(dual, primal), res_max, sweeps,
                         ScalingPoint(tuple(x), tuple(y)), fallback, trace)


def log_product_terms(f: FlowMatrix, rows: list[int], cols: list[int]) -> list[float]:
    from .flow_core import embed
    A = embed(f)
    n = f.n
    return [math.log(float(A[i][c])) for i in rows for c in cols if i + c <= n]


def solve_volume(N: NetflowVector, tol: float = DEFAULT_TOL,
                 max_sweeps: int = DEFAULT_MAX_SWEEPS) -> ScalingResult:
    if any(s <= 0 for s in N.partial_sums):
        raise ZeroMarginal("the volume problem needs every s_k > 0")
    P, u, v, sweeps, res, fb, trace = _solve(N, VOLUME, tol, max_sweeps)
    f = _flow_from_matrix(P, P.matrix(u, v))
    primal = math.fsum(log_product_terms(f, P.rows, P.cols))
    dual = P.dual(u, v)
    size = int(P.mask.sum())
    return ScalingResult(f, primal, dual, _certified_gap(dual - size, primal), res, sweeps,
                         _point(P, u, v), fb, trace)


def maximize_entropy(N: NetflowVector, tol: float = DEFAULT_TOL,
                     max_sweeps: int = DEFAULT_MAX_SWEEPS,
                     trace: TextIO | None = None) -> tuple[FlowMatrix, float, float]:
    """Entropy maximizer (repaired to an exact rational flow), its entropy and the duality gap."""
    r = solve_entropy(N, tol, max_sweeps)
    if trace is not None:
        write_trace(r.trace, trace)
    return r.flow, r.primal, r.gap


def capacity_log(N: NetflowVector, tol: float = DEFAULT_TOL,
                 max_sweeps: int = DEFAULT_MAX_SWEEPS) -> float:
    """log of the capacity, i.e. the dual objective at the final scaling point."""
    return solve_entropy(N, tol, max_sweeps).dual


def duality_gap(N: NetflowVector, tol: float = DEFAULT_TOL) -> float:
    r = solve_entropy(N, tol)
    return abs(r.dual - r.primal)


def maximize_log_product(N: NetflowVector, tol: float = DEFAULT_TOL) -> tuple[FlowMatrix, float]:
    """Maximizer of sum log a_ic over the embedded polytope and the maximum."""
    r = solve_volume(N, tol)
    return r.flow, r.primal


def volume_duality_check(N: NetflowVector, tol: float = DEFAULT_TOL) -> float:
    """|log volume-capacity - |S| - sup sum log a|, zero up to solver accuracy."""
    r = solve_volume(N, tol)
    n = N.n
    size = n * (n - 1) // 2 + 2 * n - 1
    return abs(r.dual - size - r.primal)


def dual_objective(N: NetflowVector, point: ScalingPoint, kernel: Kernel = ENTROPIC) -> float:
    """Dual objective at an arbitrary point, in multiplicative coordinates."""
    P = _Problem(N, kernel)
    u = np.log(np.array([point.x[i] for i in P.rows], dtype=float))
    v = np.log(np.array([point.y[c] for c in P.cols], dtype=float))
    return P.dual(u, v)


def write_trace(rows: list[tuple[int, float, float]], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["iteration", "residual", "dual"])
    for it, res, D in rows:
        w.writerow([it, f"{res:.12g}", f"{D:.12g}"])


def trace_csv(rows: list[tuple[int, float, float]]) -> str:
    buf = io.StringIO()
    write_trace(rows, buf)
    return buf.getvalue()


def support_size(n: int) -> int:
    return len(support(n))
