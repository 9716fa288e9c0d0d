"""Command-line front end.

Every subcommand prints JSON (sorted keys, floats at 12 significant digits,
counts as decimal strings) unless ``--out`` names a .csv file. Exit codes:
2 for bad input, 3 when a resource limit is hit, 4 when the optimizer fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import closed_forms as cf
from .entropy_bounds import lower_bound_at, upper_bound_at
from .errors import KostantError, NoConvergence, ResourceLimit
from .exact_count import count_brute, count_exact
from .flow_core import FAMILY_TAGS, NamedFamily, NetflowVector, family, parse_netflow
from .lidskii import lidskii_bounds, lidskii_count
from .scaling_opt import DEFAULT_TOL, solve_entropy, volume_duality_check, write_trace
from .vertex_average import (
    average_cry,
    average_positive,
    enumerate_vertices,
    midpoint_2rho,
    write_jsonl,
)

THREADS_ENV = "KOSTANT_THREADS"
SWEEP_COLUMNS = ["n", "family", "params", "K", "log_lower_avg", "log_lower_lidskii",
                 "log_upper", "gap"]


def _fmt(x):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return None
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    return x


def _dump(obj, out=None) -> None:
    out = out or sys.stdout
    out.write(json.dumps(_fmt(obj), sort_keys=True) + "\n")


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _family_from(args) -> NamedFamily:
    return NamedFamily.make(args.family, t=args.t, a=args.a, p=args.p)


def _netflow_from(args) -> NetflowVector:
    if args.netflow:
        return parse_netflow(args.netflow)
    if args.family and args.n is not None:
        return family(_family_from(args), int(args.n))
    raise KostantError("give --netflow or --family with --n")


def _add_input(p, need_n=True):
    p.add_argument("--netflow", help="comma-separated netflow, e.g. 1,1,1,-3")
    p.add_argument("--family", choices=FAMILY_TAGS)
    p.add_argument("--n", type=int if need_n else float)
    p.add_argument("--t", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--p", type=float)


def _average_flow(N: NetflowVector, fam: NamedFamily | None):
    if fam is not None and fam.tag == "two_rho":
        return midpoint_2rho(N.n, int(fam.get("t")))
    if all(x > 0 for x in N.head):
        return average_positive(N)
    if N.entries[0] > 0 and not any(N.entries[1:-1]):
        return average_cry(N.n, N.entries[0])
    return None


# --- subcommands --------------------------------------------------------------

def cmd_count(args) -> int:
    N = _netflow_from(args)
    if args.method == "exact":
        K = count_exact(N)
    elif args.method == "lidskii":
        K = lidskii_count(N)
    else:
        K = count_brute(N)
    _dump({"K": str(K)})
    return 0


def cmd_bound(args) -> int:
    N = _netflow_from(args)
    fam = _family_from(args) if args.family else None
    if args.flow == "optimizer":
        r = solve_entropy(N, args.tol)
        rep = upper_bound_at(r.flow, N, r.gap, gap_certified=True)
        out = rep.to_dict()
        out["gap"] = r.gap
    else:
        if args.flow == "midpoint":
            if fam is None or fam.tag != "two_rho":
                raise KostantError("the midpoint flow exists for the two_rho family only")
            f = midpoint_2rho(N.n, int(fam.get("t")))
        else:
            f = _average_flow(N, fam)
            if f is None:
                raise KostantError("no closed-form average flow for this netflow")
        out = lower_bound_at(f, N).to_dict()
    out["flow"] = args.flow
    out["netflow"] = str(N)
    _dump(out)
    return 0


def cmd_capacity(args) -> int:
    N = _netflow_from(args)
    r = solve_entropy(N, args.tol)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            write_trace(r.trace, fh)
    _dump({"log_capacity": r.dual, "entropy": r.primal, "gap": r.gap,
           "x": list(r.point.x), "y": list(r.point.y), "sweeps": r.sweeps,
           "netflow": str(N)})
    return 0


def cmd_vertices(args) -> int:
    N = _netflow_from(args)
    verts = enumerate_vertices(N, args.method)
    if args.out:
        with open(args.out, "w") as fh:
            write_jsonl(verts, fh)
    else:
        write_jsonl(verts, sys.stdout)
    return 0


def cmd_asymptotic(args) -> int:
    fam = _family_from(args)
    n = args.n
    rep = cf.asymptotic_bound(fam, n)
    out = rep.to_dict()
    out["family"] = fam.tag
    out["params"] = fam.label()
    out["n"] = n
    comps = {}
    if float(n).is_integer():
        m = int(n)
        if fam.tag == "tesler" and m >= 2:
            comps["oneill"] = cf.oneill_tesler(m).to_dict()
        if fam.tag == "two_rho" and m % 2 == 1:
            comps["oneill"] = cf.oneill_two_rho(m, int(fam.get("t"))).to_dict()
        if fam.tag == "tesler" and m >= 1:
            comps["explicit"] = cf.tesler_explicit_lower(m)
        if fam.tag == "cry":
            try:
                comps["explicit"] = cf.cry_explicit_lower(m, int(fam.get("t")))
            except KostantError:
                pass
    out["comparators"] = comps
    _dump(out)
    return 0


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def sweep_row(fam: NamedFamily, n: int, tol: float = DEFAULT_TOL) -> dict:
    """Exact count and every bound for one member of a family."""
    N = family(fam, n)
    row = {"n": n, "family": fam.tag, "params": fam.label()}
    row["K"] = str(count_exact(N))
    f = _average_flow(N, fam)
    row["log_lower_avg"] = lower_bound_at(f, N).log_lower if f is not None else None
    if all(x >= 0 for x in N.head):
        row["log_lower_lidskii"] = lidskii_bounds(N).log_lower
    else:
        row["log_lower_lidskii"] = None
    r = solve_entropy(N, tol)
    row["log_upper"] = r.primal + r.gap
    row["gap"] = r.gap
    return row


def _sweep_task(job):
    tag, params, n, tol = job
    return sweep_row(NamedFamily(tag, params), n, tol)


def cmd_sweep(args) -> int:
    fam = _family_from(args)
    ns = _parse_range(args.n)
    jobs = [(fam.tag, fam.params, n, args.tol) for n in ns]
    workers = max(1, int(os.environ.get(THREADS_ENV, "1")))
    to_csv = bool(args.out and args.out.endswith(".csv"))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    rows = []
    writer = None
    if to_csv:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        fh.flush()
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    results = pool.map(_sweep_task, jobs) if pool else map(_sweep_task, jobs)
    try:
        for row in results:
            if writer:
                writer.writerow([_cell(row[c]) for c in SWEEP_COLUMNS])
                fh.flush()
            else:
                rows.append(row)
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
        if not to_csv:
            _dump(rows, fh)
        if fh is not sys.stdout:
            fh.close()
    return 0


def _suite_appendix(rng: random.Random) -> dict[str, bool]:
    res = cf.appendix_checks(10**5)
    res["entropy_ineq"] = all(cf.entropy_ineq_check(rng.uniform(1e-6, 1e6)) for _ in range(200))
    res["f_bound"] = all(cf.f_bound_check(t, n)[2] for t in range(1, 51) for n in range(1, 51))
    res["spanning_trees"] = all(cf.spanning_trees_staircase(n) for n in range(1, 8))
    return res


def _small_suite():
    out = [parse_netflow(s) for s in ("1,0,0,-1", "1,1,1,-3", "2,0,1,-3", "1,2,0,1,-4")]
    for n in range(2, 6):
        out += [family("tesler", n), family("cry", n, t=2), family("two_rho", n)]
    return out


def _suite_duality() -> dict[str, bool]:
    res = {}
    for N in _small_suite():
        r = solve_entropy(N)
        res[f"entropy {N}"] = abs(r.dual - r.primal) <= 1e-6
        if all(s > 0 for s in N.partial_sums) and N.n <= 5:
            res[f"volume {N}"] = volume_duality_check(N) <= 1e-5
    return res


def _suite_lidskii() -> dict[str, bool]:
    res = {}
    for N in _small_suite():
        if all(x >= 0 for x in N.head):
            K = count_exact(N)
            b = lidskii_bounds(N)
            res[str(N)] = (lidskii_count(N) == K
                           and b.log_lower <= math.log(K) + 1e-12
                           and math.log(K) <= b.log_upper + 1e-12)
    return res


def cmd_check(args) -> int:
    rng = random.Random(args.seed)
    if args.suite == "appendix":
        res = _suite_appendix(rng)
    elif args.suite == "duality":
        res = _suite_duality()
    else:
        res = _suite_lidskii()
    ok = all(res.values())
    _dump({"suite": args.suite, "ok": ok, "results": res})
    return 0 if ok else 1


# --- entry points ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kostant", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact lattice-point count")
    _add_input(p)
    p.add_argument("--method", choices=("exact", "lidskii", "brute"), default="exact")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bound", help="entropy lower or upper bound")
    _add_input(p)
    p.add_argument("--flow", choices=("average", "optimizer", "midpoint"), default="average")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("capacity", help="log capacity, maximum entropy and gap")
    _add_input(p)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--trace", help="write the iteration trace as CSV")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("vertices", help="vertices as JSON lines")
    _add_input(p)
    p.add_argument("--method", choices=("auto", "positive", "cry", "generic"), default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("asymptotic", help="leading asymptotic lower bound")
    _add_input(p, need_n=False)
    p.set_defaults(func=cmd_asymptotic)

    p = sub.add_parser("sweep", help="exact counts against all bounds over a range of n")
    p.add_argument("--family", choices=FAMILY_TAGS, required=True)
    p.add_argument("--n", required=True, help="range lo..hi or a comma list")
    p.add_argument("--t", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="run a property suite")
    p.add_argument("--suite", choices=("appendix", "duality", "lidskii"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "asymptotic" and (args.family is None or args.n is None):
        parser.print_usage(sys.stderr)
        print("kostant: asymptotic needs --family and --n", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"kostant: resource limit: {exc}", file=sys.stderr)
        return 3
    except NoConvergence as exc:
        print(f"kostant: no convergence: {exc}", file=sys.stderr)
        return 4
    except (KostantError, ValueError) as exc:
        print(f"kostant: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
