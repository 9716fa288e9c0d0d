import io
import json
from fractions import Fraction

import pytest

from kostant.errors import NonPositiveEntry, Unsupported
from kostant.flow_core import embed, family, parse_netflow
from kostant.vertex_average import (
    average_cry,
    average_positive,
    enumerate_vertices,
    generic_vertices,
    mean_flow,
    midpoint_2rho,
    write_jsonl,
)


@pytest.mark.parametrize("n", range(1, 6))
def test_positive_average_matches_vertices(n):
    for N in (family("tesler", n), family("staircase", n, t=2)):
        V = enumerate_vertices(N)
        assert len(V) == __import__("math").factorial(n)
        assert mean_flow(V) == average_positive(N)


def test_generic_agrees_with_positive():
    N = parse_netflow("2,1,3,-6")
    a = sorted(generic_vertices(N), key=lambda f: f.key())
    assert a == enumerate_vertices(N, "positive")


@pytest.mark.parametrize("n", range(2, 7))
def test_cry_average(n):
    V = enumerate_vertices(family("cry", n, t=3))
    assert len(V) == 2 ** (n - 1)
    assert mean_flow(V) == average_cry(n, 3)


def test_two_rho_vertices_and_means():
    counts = [len(enumerate_vertices(family("two_rho", n))) for n in range(2, 6)]
    assert counts == [2, 7, 26, 219]
    A = embed(mean_flow(enumerate_vertices(family("two_rho", 3))))
    F = Fraction
    assert A == [[F(5, 7), F(8, 7), F(8, 7)], [F(8, 7), F(1), F(13, 7)], [F(8, 7), F(13, 7), F(0)]]


def test_midpoint_slacks():
    f = midpoint_2rho(5, 2)
    assert list(f.subdiag) == [2 * k * (5 - k) for k in range(1, 5)]


def test_errors():
    with pytest.raises(NonPositiveEntry):
        average_positive(family("cry", 3))
    with pytest.raises(Unsupported):
        enumerate_vertices(family("tesler", 9))
    with pytest.raises(Unsupported):
        enumerate_vertices(family("cry", 3), "positive")


def test_jsonl_output():
    buf = io.StringIO()
    write_jsonl(enumerate_vertices(family("cry", 3)), buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 4
    assert json.loads(lines[0]) == {"n": 3, "upper": [0, 0, 1, 0, 0, 0], "subdiag": [1, 1]}
