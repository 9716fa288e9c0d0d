import io
import itertools
import math

import pytest

from kostant.errors import NegativeEntry, RegimeViolation
from kostant.exact_count import count_exact, inversions_at_most
from kostant.flow_core import family, netflow_from_head, parse_netflow
from kostant.lidskii import (
    all_compositions,
    cry_large_t_counts,
    lidskii_bounds,
    lidskii_count,
    lidskii_term,
    m_n,
    positive_compositions,
    s_plus,
    s_plus_cry,
    write_terms_csv,
)


def test_worked_examples():
    N = parse_netflow("1,0,0,-1")
    assert [lidskii_term(N, j) for j in positive_compositions(N)] == [1, 3]
    N = parse_netflow("1,1,1,-3")
    assert list(positive_compositions(N)) == [(3, 0, 0), (2, 1, 0)]
    assert [lidskii_term(N, j) for j in positive_compositions(N)] == [1, 6]


def test_nonzero_terms_are_exactly_the_filtered_compositions():
    N = parse_netflow("1,0,2,-3")
    nz = {j for j in all_compositions(3, 3) if lidskii_term(N, j)}
    assert nz == set(positive_compositions(N))


def test_identity_on_all_small_heads():
    for head in itertools.product(range(4), repeat=3):
        N = netflow_from_head(head)
        K = count_exact(N)
        assert lidskii_count(N) == K
        b = lidskii_bounds(N)
        assert m_n(N) <= K <= s_plus(N) * m_n(N)
        assert b.log_lower <= math.log(K) <= b.log_upper + 1e-12


@pytest.mark.parametrize("n", range(2, 7))
def test_s_plus_cry(n):
    for t in range(1, math.comb(n - 1, 2) + 3):
        assert s_plus(family("cry", n, t=t)) == s_plus_cry(n, t) == inversions_at_most(n - 1, t)
    assert s_plus_cry(n, math.comb(n - 1, 2)) == math.factorial(n - 1)


def test_large_t_bounds():
    lo, hi = cry_large_t_counts(3, 14)
    assert (lo, hi) == (560, 1120)
    assert lo <= count_exact(family("cry", 3, t=14)) == 680 <= hi
    for t in range(4, 21):
        lo, hi = cry_large_t_counts(2, t)
        assert lo == hi == count_exact(family("cry", 2, t=t)) == t + 1
    with pytest.raises(RegimeViolation):
        cry_large_t_counts(3, 10)


def test_negative_entries_rejected():
    with pytest.raises(NegativeEntry):
        lidskii_count(family("two_rho", 3))


def test_terms_csv():
    buf = io.StringIO()
    write_terms_csv(parse_netflow("1,1,1,-3"), buf)
    assert buf.getvalue().splitlines() == ["j,binomial,kostant,term", "3 0 0,1,1,1", "2 1 0,6,1,6"]
