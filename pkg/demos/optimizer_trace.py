"""Convergence of the scaling iteration for 2rho, written as CSV to stdout."""

import sys

from kostant.flow_core import family
from kostant.scaling_opt import solve_entropy, write_trace

n = int(sys.argv[1]) if len(sys.argv) > 1 else 7
r = solve_entropy(family("two_rho", n))
print(f"# n={n} entropy={r.primal:.12g} dual={r.dual:.12g} gap={r.gap:.3g} sweeps={r.sweeps}",
      file=sys.stderr)
write_trace(r.trace, sys.stdout)
