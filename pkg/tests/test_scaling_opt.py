import math

import numpy as np
import pytest

from kostant.entropy_bounds import flow_entropy, h
from kostant.errors import ZeroMarginal
from kostant.flow_core import family, parse_netflow
from kostant.scaling_opt import (
    ENTROPIC,
    ScalingPoint,
    capacity_log,
    dual_objective,
    duality_gap,
    maximize_entropy,
    maximize_log_product,
    solve_entropy,
    support_size,
    trace_csv,
    volume_duality_check,
    zero_cut_blocks,
)
from kostant.vertex_average import enumerate_vertices

SUITE = [family("tesler", n) for n in range(2, 9)] + [family("cry", n, t=2) for n in range(2, 9)] + [
    family("two_rho", n) for n in range(2, 9)] + [parse_netflow("1,-1,1,-1"), parse_netflow("2,0,1,-3")]


@pytest.mark.parametrize("N", SUITE, ids=str)
def test_strong_duality(N):
    r = solve_entropy(N)
    assert r.gap >= 0
    assert abs(r.dual - r.primal) <= 1e-6
    assert r.primal == pytest.approx(flow_entropy(r.flow))


def test_two_vertex_case_is_trivial():
    N = parse_netflow("3,-3")
    f, H, gap = maximize_entropy(N)
    assert f.upper == ((3,),)
    assert H == h(3)
    assert capacity_log(N) == pytest.approx(h(3), abs=1e-9)


def test_one_edge_entropy_value():
    N = parse_netflow("1,1,-2")
    f, H, _ = maximize_entropy(N)
    # one free edge: grid search over f_01 = x
    best = max(flow_entropy(type(f)(N, ((x, 1 - x), (1 + x,)), (1 - x,)))
               for x in np.linspace(0, 1, 1001).tolist())
    assert H >= best - 1e-9


def test_maximizer_beats_vertices():
    N = parse_netflow("2,0,1,-3")
    _, H, _ = maximize_entropy(N)
    assert all(flow_entropy(v) <= H + 1e-9 for v in enumerate_vertices(N))


def test_dual_is_an_upper_bound_anywhere():
    N = family("tesler", 4)
    _, H, _ = maximize_entropy(N)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = tuple(rng.uniform(0.05, 0.6, N.n))
        y = tuple(rng.uniform(0.05, 0.6, N.n))
        assert dual_objective(N, ScalingPoint(x, y), ENTROPIC) >= H - 1e-9


def test_zero_cut_blocks():
    assert zero_cut_blocks(parse_netflow("1,-1,1,-1")) == [(0, 1), (2, 3)]
    assert zero_cut_blocks(family("tesler", 3)) == [(0, 3)]


def test_volume_duality():
    for N in (family("tesler", 3), family("two_rho", 4), parse_netflow("1,1,-2")):
        assert volume_duality_check(N) <= 1e-5
    f, val = maximize_log_product(parse_netflow("1,1,-2"))
    assert math.isfinite(val)
    with pytest.raises(ZeroMarginal):
        maximize_log_product(parse_netflow("1,-1,1,-1"))


def test_gap_and_trace():
    N = family("cry", 5, t=3)
    assert duality_gap(N) <= 1e-6
    r = solve_entropy(N)
    text = trace_csv(r.trace)
    assert text.splitlines()[0] == "iteration,residual,dual"
    duals = [float(line.split(",")[2]) for line in text.splitlines()[1:]]
    assert all(b <= a + 1e-9 * max(1, abs(a)) for a, b in zip(duals, duals[1:]))


def test_support_size():
    assert support_size(4) == 6 + 8 - 1
