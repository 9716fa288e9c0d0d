"""Exact Tesler counts next to every lower and upper bound, n = 2..9."""

import math

from kostant import closed_forms as cf
from kostant.entropy_bounds import lower_bound_at
from kostant.exact_count import count_exact
from kostant.flow_core import family
from kostant.lidskii import lidskii_bounds
from kostant.scaling_opt import solve_entropy
from kostant.vertex_average import average_positive

print(f"{'n':>2} {'K':>10} {'ln K':>8} {'avg':>8} {'lidskii':>8} {'oneill':>8} {'H*':>8} {'ratio':>6}")
for n in range(2, 10):
    N = family("tesler", n)
    K = count_exact(N)
    lo = lower_bound_at(average_positive(N)).log_lower
    lid = lidskii_bounds(N).log_lower
    one = cf.oneill_tesler(n).log_lower
    H = solve_entropy(N).primal
    print(f"{n:>2} {K:>10} {math.log(K):8.3f} {lo:8.3f} {lid:8.3f} {one:8.3f} {H:8.3f} {math.log(K) / H:6.3f}")
