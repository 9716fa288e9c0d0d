"""Product formulas, explicit and asymptotic lower bounds, and numeric lemmas.

Everything named ``*_product_log`` evaluates the entropy lower bound at a
specific closed-form flow as a sum of h-terms, with repeated factors kept as
repeated terms so the float multiset matches :func:`lower_bound_at` exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
import sympy
from scipy import integrate, optimize, special

from .entropy_bounds import BoundReport, h
from .errors import DomainViolation, HypothesisViolation, NonPositiveEntry
from .flow_core import NamedFamily, NetflowVector

LN2 = math.log(2.0)


# --- exact products -----------------------------------------------------------

def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def catalan_product(n: int) -> int:
    """C_1 C_2 ... C_{n-1}."""
    return math.prod(catalan(i) for i in range(1, n))


def big_f(t: int, n: int) -> Fraction:
    """prod_{1 <= i < j <= n} (2t + i + j - 1) / (i + j - 1)."""
    out = Fraction(1)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out *= Fraction(2 * t + i + j - 1, i + j - 1)
    return out


def staircase_count(t: int, n: int) -> int:
    """K_n(t, t+1, ..., t+n-1, -nt - C(n,2)) from the product formula."""
    value = catalan_product(n) * big_f(t, n)
    assert value.denominator == 1, "product formula gave a non-integer"
    return int(value)


def log_big_f(t: float, n: int) -> float:
    return math.fsum(math.log(2 * t + i + j - 1) - math.log(i + j - 1)
                     for i in range(1, n + 1) for j in range(i + 1, n + 1))


def f_func(x: float) -> float:
    """x^2 log x - (1-x)^2 log(1-x)/2 - (1+x)^2 log(1+x)/2 + 2x log 2, with 0 log 0 = 0."""
    def xl(y, z):
        return 0.0 if z == 0 else y * math.log(z)
    return xl(x * x, x) - 0.5 * xl((1 - x) ** 2, 1 - x) - 0.5 * (1 + x) ** 2 * math.log1p(x) + 2 * x * LN2


def f_bound_check(t: int, n: int) -> tuple[float, float, bool]:
    """(log F(t,n), (n+t)^2 f(t/(n+t)), whether 0 >= difference >= -2(t+n))."""
    logF = log_big_f(t, n)
    approx = (n + t) ** 2 * f_func(t / (n + t))
    diff = logF - approx
    slack = 1e-12 * max(1.0, abs(approx))
    return logF, approx, (-2 * (t + n) - slack <= diff <= slack)


# --- product expressions at closed-form flows -------------------------------------

def _correction_terms(s: Sequence) -> list[float]:
    hs = [h(x) for x in s]
    return [max(hs, default=0.0)] + [-2.0 * x for x in hs]


def positive_average_terms(N: NetflowVector) -> list[float]:
    """Terms of the bound at the average of the vertices, positive netflow."""
    n = N.n
    if any(x <= 0 for x in N.head):
        raise NonPositiveEntry("every N_i with i < n must be positive")
    s = N.partial_sums
    c = {k: Fraction(N.entries[n - k], k + 1) + Fraction(s[n - k], k * (k + 1)) for k in range(1, n + 1)}
    b = {k: Fraction(k * s[n - k - 1], k + 1) for k in range(1, n)}
    terms = _correction_terms(s)
    terms += [h(b[k]) for k in range(1, n)]
    for k in range(1, n + 1):
        terms += [h(c[k])] * k
    return terms


def positive_average_product_log(N: NetflowVector) -> float:
    return math.fsum(positive_average_terms(N))


def tesler_product_log(n: int) -> float:
    """Same bound for (1, ..., 1, -n) with c_k = (n+1)/(k(k+1)), b_k = k^2/(k+1), s_k = k+1."""
    terms = _correction_terms([k + 1 for k in range(n)])
    terms += [h(Fraction(k * (n - k), k + 1)) for k in range(1, n)]
    for k in range(1, n + 1):
        terms += [h(Fraction(n + 1, k * (k + 1)))] * k
    return math.fsum(terms)


def cry_product_log(n: int, t: int) -> float:
    """Bound at the average of the (t, 0, ..., 0, -t) vertices."""
    terms = [-h(t)] * (2 * n - 1)
    terms.append(h(Fraction(t, 2 ** (n - 1))))
    for k in range(1, n):
        terms += [h(Fraction(t, 2 ** k))] * (n + 2 - k)
    return math.fsum(terms)


def two_rho_product_log(n: int, t: int) -> float:
    """Bound at the all-t flow of t * 2rho."""
    s = [t * (k + 1) * (n - k) for k in range(n)]
    terms = _correction_terms(s)
    terms += [h(t)] * (n * (n + 1) // 2)
    terms += [h(t * k * (n - k)) for k in range(1, n)]
    return math.fsum(terms)


def _c_values(N: NetflowVector) -> dict[int, Fraction]:
    n = N.n
    s = N.partial_sums
    return {k: Fraction(N.entries[n - k], k + 1) + Fraction(s[n - k], k * (k + 1)) for k in range(1, n + 1)}


def _general_hypothesis(N: NetflowVector) -> None:
    n = N.n
    for k in range(n):
        if N.partial_sums[k] < max(0, -(n - k) * N.entries[k]):
            raise HypothesisViolation(f"s_{k} < max(0, -(n-k) N_{k})")
    if any(c < 0 for c in _c_values(N).values()):
        raise HypothesisViolation("some c_k is negative")


def general_lower_bound_1(N: NetflowVector) -> BoundReport:
    """-2 log n - sum h(s_k) + sum_k k h(c_k)."""
    _general_hypothesis(N)
    n = N.n
    terms = [-2.0 * math.log(n)] + [-h(s) for s in N.partial_sums]
    for k, c in _c_values(N).items():
        terms += [h(c)] * k
    return BoundReport(math.fsum(terms), None, "closed_form", True)


def general_lower_bound_2(N: NetflowVector) -> BoundReport:
    """-2 log n - n - 2 log n! + sum_k (k-1) h(c_k)."""
    _general_hypothesis(N)
    n = N.n
    for k in range(n):
        if N.entries[k] < Fraction(1, n - k) - (n - k + 1):
            raise HypothesisViolation(f"N_{k} is below 1/(n-k) - (n-k+1)")
    terms = [-2.0 * math.log(n), -float(n), -2.0 * math.lgamma(n + 1)]
    for k, c in _c_values(N).items():
        terms += [h(c)] * (k - 1)
    return BoundReport(math.fsum(terms), None, "closed_form", True)


def tesler_explicit_lower(n: int) -> float:
    """Fully explicit lower bound on log K_n(1, ..., 1, -n)."""
    if n < 1:
        raise HypothesisViolation("n must be positive")
    m = n + 1
    return (m / 4 * math.log(m) ** 2 - m * math.log(m) + n - 2 / math.e * math.sqrt(m)
            - 2.5 * math.log(n) - 1)


def cry_explicit_lower(n: int, t: int) -> float:
    """Explicit lower bound on log K_n(t, 0, ..., 0, -t), valid when log2(e t) <= n - 1."""
    L = math.log2(math.e * t)
    if t < 1 or L > n - 1:
        raise HypothesisViolation("needs t >= 1 and log2(e t) <= n - 1")
    bits = (n + 2) / 2 * L * math.log2(math.e * t / 128) - 3 * n / t - 0.5 * L ** 3 - 0.5 * L ** 2
    return bits * LN2


def classical_bounds(f: NamedFamily, n: int) -> BoundReport:
    """Earlier elementary bounds: CRY and dilated Tesler families only."""
    t = int(f.get("t"))
    if f.tag == "cry":
        return BoundReport((n - 1) * math.log(t + 1), float(math.log(big_f(t, n))), "closed_form", True)
    if f.tag in ("dilated_tesler", "tesler"):
        if f.tag == "tesler":
            t = 1
        lo = math.fsum(math.log(i * t + 1) for i in range(1, n))
        if t >= n - 1:
            lo = max(lo, math.log(catalan_product(n) * big_f(t - n + 1, n)))
        hi = min(math.comb(n, 2) * math.log(t + 1), math.log(catalan_product(n) * big_f(t, n)))
        return BoundReport(lo, hi, "closed_form", True)
    raise HypothesisViolation(f"no classical bound for family {f.tag}")


def oneill_tesler(n: int) -> BoundReport:
    """(2n-3)!! <= K_n(1,...,1,-n) <= 2^(C(n-2,2)-1) 3^n."""
    if n < 2:
        raise HypothesisViolation("n must be at least 2")
    lo = math.fsum(math.log(m) for m in range(2 * n - 3, 0, -2))
    hi = (math.comb(n - 2, 2) - 1) * LN2 + n * math.log(3)
    return BoundReport(lo, hi, "closed_form", True)


def oneill_two_rho(n: int, t: int = 1) -> BoundReport:
    """Lower bounds for odd n = 2k+1: 3^(k^2-k-1) at t = 1 and (t+1/2)^(k^2) for t > 1."""
    if n % 2 == 0 or n < 1:
        raise HypothesisViolation("n must be odd")
    k = (n - 1) // 2
    if t == 1:
        return BoundReport((k * k - k - 1) * math.log(3), None, "closed_form", True)
    if t > 1:
        return BoundReport(k * k * math.log(t + 0.5), None, "closed_form", True)
    raise HypothesisViolation("t must be a positive integer")


# --- asymptotic leading terms ---------------------------------------------------

def power_leading(a: float, p: float, n: float) -> float:
    a, p = float(a), float(p)
    if a <= 0 or p < 0:
        raise HypothesisViolation("need a > 0 and p >= 0")
    ln = math.log(n)
    if p > 1:
        return n * n * ln * (p - 1) / 2 + n * n / 2 * (math.log(a * p) - 1.5 * (p - 1))
    if p == 1:
        if a > 2:
            return n * n * (a / (2 * (a - 2)) * math.log(a / 2) + 1.5 - 2 * LN2)
        return n * n * (a - a * LN2)
    return n ** (p + 1) * ln ** 2 * a * (1 - p) ** 2 / (4 * (p + 1))


def n_plus_i_coefficient() -> float:
    g = 1 / 6
    return 0.5 * (math.log(1.5) + math.log(1 - g * g) + math.log((1 + g) / (1 - g)) / g)


def asymptotic_bound(f: NamedFamily, n: float) -> BoundReport:
    """Leading term of the asymptotic lower bound for a family (never certified)."""
    if n <= 1:
        raise HypothesisViolation("n must exceed 1")
    tag = f.tag
    t, a, p = f.get("t"), f.get("a"), f.get("p")
    if tag in ("cry", "two_rho", "dilated_tesler") and (t < 1 or t.denominator != 1):
        raise HypothesisViolation("t must be a positive integer")
    if tag == "tesler":
        value = n / 4 * math.log(n) ** 2
    elif tag == "cry":
        value = LN2 * n / 2 * math.log2(float(t)) ** 2
    elif tag == "two_rho":
        value = n * n / 2 * h(t)
    elif tag == "dilated_tesler":
        value = power_leading(float(t), 0.0, n)
    elif tag == "staircase":
        if t < 0:
            raise HypothesisViolation("t must be nonnegative")
        value = power_leading(1.0, 1.0, n)
    elif tag == "constant_an":
        if a < Fraction(1, 12):
            raise HypothesisViolation("needs a >= 1/12")
        value = n * n / 2 * (2 + math.log(a))
    elif tag == "linear":
        if a < 0:
            raise HypothesisViolation("needs a >= 0")
        value = n * n * n_plus_i_coefficient() if a == 1 else n * n / 2 * (1 + math.log(2 * a + 1))
    elif tag == "power":
        value = power_leading(float(a), float(p), n)
    else:
        raise HypothesisViolation(f"unknown family {tag}")
    return BoundReport(float(value), None, "asymptotic", False)


# --- appendix toolkit -----------------------------------------------------------

def _abs_integral(g: Callable[[float], float], a: float, b: float) -> float:
    """Integral of |g| over [a, b], split at the sign changes of g found on a grid."""
    xs = np.linspace(a, b, int(min(20000, 40 * (b - a) + 2)))
    ys = np.array([g(x) for x in xs])
    cuts = [a]
    for k in np.nonzero(np.sign(ys[:-1]) * np.sign(ys[1:]) < 0)[0]:
        cuts.append(optimize.brentq(g, xs[k], xs[k + 1]))
    cuts.append(b)
    return math.fsum(abs(integrate.quad(g, lo, hi, limit=200, epsabs=1e-13)[0])
                     for lo, hi in zip(cuts, cuts[1:]))


def euler_maclaurin(derivs: Sequence[Callable[[float], float]], a: int, b: int,
                    p: int) -> tuple[float, float]:
    """Euler-Maclaurin approximation of sum_{k=a}^b f(k) and a bound on its error.

    ``derivs[m]`` must evaluate the m-th derivative of f for m = 0..p. For p = 1
    the sup of the periodic Bernoulli function, 1/2, is used as the constant.
    """
    if not a < b:
        raise DomainViolation("need a < b")
    if p < 1 or p % 2 == 0:
        raise DomainViolation("p must be a positive odd integer")
    if len(derivs) < p + 1:
        raise DomainViolation(f"need derivatives up to order {p}")
    f = derivs[0]
    integral, _ = integrate.quad(f, a, b, limit=200, epsabs=1e-12, epsrel=1e-12)
    approx = integral + (f(a) + f(b)) / 2
    B = special.bernoulli(p)
    for k in range(1, (p - 1) // 2 + 1):
        approx += B[2 * k] / math.factorial(2 * k) * (derivs[2 * k - 1](b) - derivs[2 * k - 1](a))
    abs_int = _abs_integral(derivs[p], a, b)
    const = 0.5 if p == 1 else 2 * special.zeta(p) / (2 * math.pi) ** p
    return float(approx), float(const * abs_int)


def _klogk_check(a: int, b: int, c: float, d: float) -> float:
    if c == 0:
        raise DomainViolation("c must be nonzero")
    if not (c * a + d > 0 and c * b + d > 0) or a >= b:
        raise DomainViolation("need a < b and ct + d > 0 on [a, b]")
    return -d / c


def klogk_approx(a: int, b: int, c: float, d: float) -> float:
    """Main terms for sum_{k=a}^b k log(ck + d)."""
    r = _klogk_check(a, b, c, d)
    la, lb, lc = math.log(abs(a - r)), math.log(abs(b - r)), math.log(abs(c))
    return (b * b / 2 * lb - a * a / 2 * la + r * r / 2 * (la - lb)
            + b * b * lc / 2 - a * a * lc / 2 - (b + r) ** 2 / 4 + (a + r) ** 2 / 4
            + b / 2 * lb + a / 2 * la + (a + b) * lc / 2 - (la - lb) / 12)


def klogk_derivs(c: float, d: float) -> list[Callable[[float], float]]:
    return [
        lambda t: t * math.log(c * t + d),
        lambda t: math.log(c * t + d) + c * t / (c * t + d),
        lambda t: c / (c * t + d) + c * d / (c * t + d) ** 2,
        lambda t: -c * c / (c * t + d) ** 2 - 2 * c * c * d / (c * t + d) ** 3,
    ]


def klogk_error_bound(a: int, b: int, c: float, d: float) -> float:
    """Explicit bound on |sum - klogk_approx| (Euler-Maclaurin with p = 3)."""
    r = _klogk_check(a, b, c, d)
    _, rem = euler_maclaurin(klogk_derivs(c, d), a, b, 3)
    return abs(r / (12 * (b - r)) - r / (12 * (a - r))) + rem


def quadratic_klogk_coefficient(xi: float) -> float:
    """(1/xi^2 - 1) log(1/(1 - xi^2)), extended by its limit 1 at xi = 0."""
    if not 0 <= xi < 1:
        raise DomainViolation("xi must lie in [0, 1)")
    if xi == 0:
        return 1.0
    x2 = xi * xi
    return (1 / x2 - 1) * -math.log1p(-x2)


def quadratic_klogk(xi: float, n: int) -> float:
    """Main terms for sum_{k=1}^n k log((n^2 - xi^2 k^2) / k^2)."""
    return (n * n / 2 * quadratic_klogk_coefficient(xi) + n / 2 * math.log1p(-xi * xi)
            - math.log(n) / 6)


def unimodal_sum_lb(f: Callable[[float], float], a: float, b: float,
                    grid: int = 2001) -> float:
    """Integral of f over (a, b) minus max f; a lower bound on sum over (a, b) of f(k)."""
    if not a < b:
        raise DomainViolation("need a < b")
    xs = np.linspace(a, b, grid)[1:-1]
    ys = np.array([f(x) for x in xs])
    diffs = np.sign(np.diff(ys))
    diffs = diffs[diffs != 0]
    if np.any(np.diff(diffs) > 0):
        raise DomainViolation("f does not look unimodal on (a, b)")
    k = int(np.argmax(ys))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, len(xs) - 1)]
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    fmax = max(float(-res.fun), float(ys.max()))
    integral, _ = integrate.quad(f, a, b, limit=400)
    return float(integral - fmax)


def entropy_ineq_check(t: float) -> bool:
    """e(t+1/2) >= (t+1)^(t+1)/t^t >= max(e(t+1/2-1/(24t)), (e/t)^t) and >= et + 1."""
    if t <= 0:
        raise DomainViolation("t must be positive")
    with mpmath.workdps(60):
        T = mpmath.mpf(t)
        logE = (T + 1) * mpmath.log(T + 1) - T * mpmath.log(T)
        e = mpmath.e
        up = mpmath.log(e * (T + mpmath.mpf(1) / 2))
        ok = up >= logE
        low1 = e * (T + mpmath.mpf(1) / 2 - 1 / (24 * T))
        if low1 > 0:
            ok = ok and logE >= mpmath.log(low1)
        ok = ok and logE >= T * (1 - mpmath.log(T))
        ok = ok and logE >= mpmath.log(e * T + 1)
    return bool(ok)


def staircase_support_laplacian(n: int) -> sympy.Matrix:
    """Laplacian of the bipartite graph on rows and columns with an edge when i + c <= n."""
    m = 2 * n
    L = sympy.zeros(m, m)
    for i in range(n):
        for c in range(n):
            if i + c <= n:
                r, col = i, n + c
                L[r, col] -= 1
                L[col, r] -= 1
                L[r, r] += 1
                L[col, col] += 1
    return L


def spanning_trees_kirchhoff(n: int) -> int:
    L = staircase_support_laplacian(n)
    return int(L[1:, 1:].det(method="bareiss"))


def spanning_trees_staircase(n: int, cross_check: bool = True) -> int:
    """(n!)^2, checked against the matrix-tree theorem when n <= 7."""
    value = math.factorial(n) ** 2
    if cross_check and n <= 7:
        assert spanning_trees_kirchhoff(n) == value
    return value


# --- elementary estimates -----------------------------------------

def _close_le(x, y, rtol=1e-10):
    return x <= y + rtol * np.maximum(1.0, np.abs(y))


def appendix_checks(n_max: int, powers: Sequence[float] = (0.0, 0.5, 1.0, 2.0, 3.5)) -> dict[str, bool]:
    """Evaluate the elementary sandwiches for every n = 1..n_max (vectorized).

    Equality holds at a few small n, so comparisons allow a 1e-10 relative slack.
    """
    n = np.arange(1, n_max + 1, dtype=float)
    out = {}
    # (x/(x+1))^x >= 1/e and ((x+1)/x)^(x+1) >= e on a log grid of x
    x = np.logspace(-6, 6, 2000)
    out["e_limits"] = bool(np.all(_close_le(-1.0, x * np.log(x / (x + 1))))
                     and np.all(_close_le(1.0, (x + 1) * np.log1p(1 / x))))
    # log prod C_i against n^2 log 2 - 3/2 n log n, error within one multiple of n
    logC = np.array([0.0] + [math.lgamma(2 * i + 1) - 2 * math.lgamma(i + 1) - math.log(i + 1)
                             for i in range(1, n_max)])
    logprod = np.cumsum(logC)  # entry n-1 is sum_{i<n} log C_i
    main = n * n * LN2 - 1.5 * n * np.log(n)
    out["catalan_product"] = bool(np.all(np.abs(logprod - main) <= n + 1))
    # Stirling sandwich
    lf = special.gammaln(n + 1)
    out["stirling"] = bool(np.all(_close_le(0.5 * np.log(2 * np.pi * n) + n * np.log(n) - n, lf))
                     and np.all(_close_le(lf, 1 + 0.5 * np.log(n) + n * np.log(n) - n)))
    # power sums, k = n
    ok = True
    for p in powers:
        terms = np.concatenate([[1.0 if p == 0 else 0.0], n ** p])
        S = np.cumsum(terms)[1:]
        ok &= bool(np.all(_close_le(n ** (p + 1) / (p + 1), S))
                   and np.all(_close_le(S, (n + 1) ** (p + 1) / (p + 1))))
    out["power_sums"] = ok
    # harmonic numbers
    H = np.cumsum(1 / n)
    out["harmonic"] = bool(np.all(_close_le(np.log(n + 1), H)) and np.all(_close_le(H, 1 + np.log(n))))
    # sum k log k
    S = np.cumsum(n * np.log(n))
    lo = n * n * np.log(n) / 2 - n * n / 4 + 0.25
    hi = (n + 1) ** 2 * np.log(n + 1) / 2 - (n + 1) ** 2 / 4 + 0.25
    out["sum_klogk"] = bool(np.all(_close_le(lo, S)) and np.all(_close_le(S, hi)))
    # sum log k / k
    S = np.cumsum(np.log(n) / n)
    l3 = math.log(3) ** 2
    lo = LN2 / 2 + (np.log(n + 1) ** 2 - l3) / 2
    hi = LN2 / 2 + math.log(3) / 3 + (np.log(n) ** 2 - l3) / 2
    out["sum_logk_over_k"] = bool(np.all(_close_le(lo, S)) and np.all(_close_le(S, hi)))
    return out
