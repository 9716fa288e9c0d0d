import random

import pytest

from kostant.flow_core import family, make_netflow, parse_netflow


def random_netflow(rng: random.Random, n: int, bound: int = 3):
    """Random netflow with |N_i| <= bound and a nonempty polytope."""
    while True:
        head = [rng.randint(-bound, bound) for _ in range(n)]
        acc, ok = 0, True
        for x in head:
            acc += x
            if acc < 0:
                ok = False
                break
        if ok:
            return make_netflow(head + [-sum(head)])


def small_suite():
    out = [parse_netflow(s) for s in ("1,0,0,-1", "1,1,1,-3", "2,0,1,-3", "1,2,0,1,-4",
                                      "3,-1,2,0,-4", "2,1,-1,-2")]
    for n in range(2, 7):
        out += [family("tesler", n), family("cry", n, t=2), family("two_rho", n),
                family("staircase", n, t=1), family("dilated_tesler", n, t=2)]
    return out


@pytest.fixture
def rng():
    return random.Random(20240611)
