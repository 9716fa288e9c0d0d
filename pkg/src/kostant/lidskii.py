"""Lidskii-type positive formula for K_n(N) when N_0, ..., N_{n-1} >= 0.

    K_n(N) = sum_j  prod_i binom(N_i + n - 1 - i, j_i) * K(j - delta)

over weak compositions j of C(n, 2) into n parts, with delta = (n-1, ..., 1, 0).
The inner count K(j - delta) is taken on the complete DAG with n vertices
(j - delta has n entries summing to zero), one vertex fewer than the outer
problem. A term is nonzero exactly when j_i <= N_i + n - 1 - i for all i and j
dominates delta.
"""

from __future__ import annotations

import csv
import math
from functools import lru_cache
from typing import Iterator, TextIO

from .entropy_bounds import BoundReport
from .errors import NegativeEntry, RegimeViolation, ResourceLimit
from .exact_count import count_exact, inversions_at_most
from .flow_core import NetflowVector, make_netflow

DEFAULT_MAX_TERMS = 10**7


def delta(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


def _check(N: NetflowVector) -> None:
    if any(x < 0 for x in N.head):
        raise NegativeEntry("the positive formula needs N_i >= 0 for i < n")


def all_compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Every weak composition, descending lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in all_compositions(total - first, parts - 1):
            yield (first,) + rest


def positive_compositions(N: NetflowVector) -> Iterator[tuple[int, ...]]:
    """Compositions with j_i <= N_i + n - 1 - i that dominate delta, descending in j_0."""
    _check(N)
    n = N.n
    total = n * (n - 1) // 2
    caps = [N.entries[i] + n - 1 - i for i in range(n)]
    dprefix = [0] * n
    acc = 0
    for i, d in enumerate(delta(n)):
        acc += d
        dprefix[i] = acc
    suffix_cap = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_cap[i] = suffix_cap[i + 1] + caps[i]

    def rec(i: int, prefix: int, parts: tuple):
        if i == n - 1:
            last = total - prefix
            if 0 <= last <= caps[i]:
                yield parts + (last,)
            return
        remaining = total - prefix
        hi = min(caps[i], remaining)
        lo = max(0, dprefix[i] - prefix, remaining - suffix_cap[i + 1])
        for x in range(hi, lo - 1, -1):
            yield from rec(i + 1, prefix + x, parts + (x,))

    if n == 1:
        yield (0,)
        return
    yield from rec(0, 0, ())


@lru_cache(maxsize=None)
def _inner(v: tuple[int, ...]) -> int:
    if len(v) == 1:
        return int(v[0] == 0)
    acc = 0
    for x in v[:-1]:
        acc += x
        if acc < 0:
            return 0
    return count_exact(make_netflow(v))


def binomial_factor(N: NetflowVector, j) -> int:
    n = N.n
    return math.prod(math.comb(N.entries[i] + n - 1 - i, j[i]) for i in range(n))


def kostant_factor(j) -> int:
    n = len(j)
    return _inner(tuple(a - b for a, b in zip(j, delta(n))))


def lidskii_term(N: NetflowVector, j) -> int:
    _check(N)
    j = tuple(int(x) for x in j)
    n = N.n
    if len(j) != n or sum(j) != n * (n - 1) // 2 or min(j) < 0:
        raise ValueError(f"{j} is not a weak composition of {n * (n - 1) // 2} into {n} parts")
    b = binomial_factor(N, j)
    return b * kostant_factor(j) if b else 0


def _terms(N: NetflowVector, max_terms: int):
    for count, j in enumerate(positive_compositions(N), start=1):
        if count > max_terms:
            raise ResourceLimit(f"more than {max_terms} compositions")
        yield j, lidskii_term(N, j)


def lidskii_count(N: NetflowVector, max_terms: int = DEFAULT_MAX_TERMS) -> int:
    return sum(t for _, t in _terms(N, max_terms))


def lidskii_summary(N: NetflowVector, max_terms: int = DEFAULT_MAX_TERMS) -> tuple[int, int, int]:
    """(total, number of nonzero terms, largest term) in one pass."""
    total = nonzero = best = 0
    for _, t in _terms(N, max_terms):
        total += t
        if t:
            nonzero += 1
            best = max(best, t)
    return total, nonzero, best


def s_plus(N: NetflowVector, max_terms: int = DEFAULT_MAX_TERMS) -> int:
    """Number of nonzero terms."""
    return lidskii_summary(N, max_terms)[1]


def s_plus_cry(n: int, t: int) -> int:
    """Closed form for (t, 0, ..., 0, -t): permutations of n-1 letters with at most t inversions."""
    return inversions_at_most(n - 1, t)


def m_n(N: NetflowVector, max_terms: int = DEFAULT_MAX_TERMS) -> int:
    """Largest term."""
    return lidskii_summary(N, max_terms)[2]


def lidskii_bounds(N: NetflowVector, max_terms: int = DEFAULT_MAX_TERMS) -> BoundReport:
    """max term <= K <= (number of nonzero terms) * max term, in natural logs."""
    _, sp, m = lidskii_summary(N, max_terms)
    return BoundReport(math.log(m), math.log(sp) + math.log(m), "lidskii", True)


def cry_large_t_counts(n: int, t: int, check_regime: bool = True) -> tuple[int, int]:
    """Exact integer bounds (lower, upper) on K_n(t, 0, ..., 0, -t) for t >= n^3/2."""
    if check_regime and 2 * t < n ** 3:
        raise RegimeViolation(f"t = {t} is below n^3/2 = {n ** 3 / 2}")
    lower = math.comb(t + n - 1, n * (n - 1) // 2) * math.prod(
        math.comb(2 * i, i) // (i + 1) for i in range(n - 1))
    return lower, math.factorial(n - 1) * lower


def cry_large_t_bounds(n: int, t: int, check_regime: bool = True) -> BoundReport:
    lo, hi = cry_large_t_counts(n, t, check_regime)
    return BoundReport(math.log(lo), math.log(hi), "lidskii", True)


def write_terms_csv(N: NetflowVector, out: TextIO, max_terms: int = DEFAULT_MAX_TERMS) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["j", "binomial", "kostant", "term"])
    for j in positive_compositions(N):
        b = binomial_factor(N, j)
        k = kostant_factor(j)
        w.writerow([" ".join(map(str, j)), b, k, b * k])
