import math
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from kostant.entropy_bounds import h, lower_bound_at
from kostant.exact_count import count_brute, count_exact
from kostant.flow_core import dominates, embed, flow_from_json, flow_to_json, make_flow, netflow_from_head
from kostant.lidskii import lidskii_count
from kostant.scaling_opt import solve_entropy
from kostant.vertex_average import enumerate_vertices, mean_flow

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def heads(draw, max_n=5, bound=3, nonneg=False):
    n = draw(st.integers(1, max_n))
    lo = 0 if nonneg else -bound
    head = draw(st.lists(st.integers(lo, bound), min_size=n, max_size=n))
    acc = 0
    for i, x in enumerate(head):
        if acc + x < 0:
            head[i] = -acc
        acc += head[i]
    return head


@SETTINGS
@given(heads())
def test_exact_equals_brute(head):
    N = netflow_from_head(head)
    assert count_exact(N) == count_brute(N)


@SETTINGS
@given(heads(max_n=4, nonneg=True))
def test_lidskii_equals_exact(head):
    N = netflow_from_head(head)
    assert lidskii_count(N) == count_exact(N)


@SETTINGS
@given(heads(max_n=5), st.lists(st.tuples(st.integers(0, 4), st.integers(1, 5)), max_size=4))
def test_dominance_monotone(head, moves):
    M = netflow_from_head(head)
    entries = list(head)
    for i, j in moves:
        i, j = sorted((i % len(entries), (i + j) % len(entries)))
        if i < j:
            entries[i] += 1
            entries[j] -= 1
    N = netflow_from_head(entries)
    assert dominates(N.entries, M.entries)
    assert count_exact(N) >= count_exact(M)


@SETTINGS
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3).map(lambda v: v + [-sum(v)]),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3).map(lambda v: v + [-sum(v)]),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3).map(lambda v: v + [-sum(v)]))
def test_dominance_partial_order(a, b, c):
    assert dominates(a, a)
    if dominates(a, b) and dominates(b, a):
        assert a == b
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


@SETTINGS
@given(heads(max_n=4), st.fractions(0, 1), st.data())
def test_embed_is_affine(head, lam, data):
    N = netflow_from_head(head)
    V = enumerate_vertices(N)
    f = V[data.draw(st.integers(0, len(V) - 1))]
    g = V[data.draw(st.integers(0, len(V) - 1))]
    n = N.n
    mix = make_flow(N, [[lam * f.upper[i][k] + (1 - lam) * g.upper[i][k] for k in range(n - i)]
                        for i in range(n)])
    A, B, C = embed(f), embed(g), embed(mix)
    assert all(C[i][c] == lam * A[i][c] + (1 - lam) * B[i][c] for i in range(n) for c in range(n))


@SETTINGS
@given(heads(max_n=4))
def test_vertices_roundtrip_and_integral(head):
    N = netflow_from_head(head)
    for v in enumerate_vertices(N):
        assert v.integral
        assert flow_from_json(flow_to_json(v)) == v
        A = embed(v)
        assert all(x >= 0 and Fraction(x).denominator == 1 for row in A for x in row)


@settings(max_examples=25, deadline=None)
@given(heads(max_n=5))
def test_entropy_sandwich(head):
    N = netflow_from_head(head)
    logK = math.log(count_exact(N))
    r = solve_entropy(N)
    assert logK <= r.primal + r.gap
    assert lower_bound_at(mean_flow(enumerate_vertices(N))).log_lower <= logK
    assert lower_bound_at(r.flow).log_lower <= logK


@SETTINGS
@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_h_monotone(a, b):
    if a <= b:
        assert h(a) <= h(b)
