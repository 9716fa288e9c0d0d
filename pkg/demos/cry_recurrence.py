"""Counts for (t, 0, ..., 0, -t) and the shortest linear recurrence they satisfy."""

from kostant.exact_count import count_exact, fit_recurrence, partition_count
from kostant.flow_core import family

for t in (1, 2, 3):
    seq = [count_exact(family("cry", n, t=t)) for n in range(1, 15)]
    rec = fit_recurrence(seq, partition_count(t), holdout=3)
    coeffs = "none found" if rec is None else ", ".join(str(c) for c in rec)
    print(f"t={t}: {seq[:8]} ...")
    print(f"     recurrence coefficients: {coeffs}")
