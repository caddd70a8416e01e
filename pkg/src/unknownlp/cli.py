"""Command-line front end: gen, solve, chambers, lowerbound, bench."""

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .geometry import ResourceBudgetError
from .lp import LPInstance, lp_feasible_strict, rat

EXIT_OK, EXIT_MISMATCH, EXIT_BUDGET, EXIT_NONCONFORMANT = 0, 2, 3, 4


@dataclass
class RunConfig:
    mode: str
    oracle: str = "worst"
    policy: str = "first"
    m: int = 0
    n: int = 0
    L: int = 0
    seed: int = 0
    paths: tuple = ()


def fmt(q):
    q = Fraction(q)
    return "%d/%d" % (q.numerator, q.denominator)


def instance_to_json(inst):
    return {"m": inst.m, "n": inst.n, "L": inst.L,
            "A": [[fmt(v) for v in row] for row in inst.A],
            "b": [fmt(v) for v in inst.b]}


def instance_from_json(data):
    inst = LPInstance([[rat(v) for v in row] for row in data["A"]],
                      [rat(v) for v in data["b"]], data.get("L", 0))
    if inst.m != data["m"] or inst.n != data["n"]:
        raise ValueError("shape fields disagree with the matrix")
    return inst


def verdict_path(path):
    return path + ".verdict.json"


def random_instance(m, n, bits, rng):
    """Integer entries with |v| < 2^(bits-1); rows of A are never zero."""
    top = 2 ** (bits - 1) - 1
    A = []
    while len(A) < m:
        row = [rng.randint(-top, top) for _ in range(n)]
        if any(row):
            A.append(row)
    b = [rng.randint(-top, top) for _ in range(m)]
    return LPInstance(A, b)


def generate(m, n, bits, seed, feasible_only=False, max_tries=10000):
    rng = random.Random(seed)
    for _ in range(max_tries):
        inst = random_instance(m, n, bits, rng)
        if not feasible_only or lp_feasible_strict(inst.constraints()):
            return inst
    raise ResourceBudgetError("no feasible instance after %d tries" % max_tries)


def ground_truth(inst):
    res = lp_feasible_strict(inst.constraints())
    out = {"feasible": bool(res)}
    if res:
        out["witness"] = [fmt(v) for v in res.x]
    return out


# ------------------------------------------------------------ solve

@dataclass
class SolveReport:
    status: str
    x: tuple = None
    queries: int = 0
    wall_time: float = 0.0
    verified: bool = True
    nonconformant: bool = False
    note: str = ""

    def lines(self):
        yield "status=%s" % self.status
        if self.x is not None:
            yield "x=" + " ".join(fmt(v) for v in self.x)
        yield "queries=%d" % self.queries
        yield "time=%.2fs" % self.wall_time
        if self.nonconformant:
            yield "NONCONFORMANT " + self.note


def make_oracle(inst, kind, policy="first", seed=0):
    from .oracle import FirstIndex, FurthestOracle, RandomSeeded, WorstCaseOracle

    pol = FirstIndex() if policy == "first" else RandomSeeded(seed)
    cls = WorstCaseOracle if kind == "worst" else FurthestOracle
    return cls(inst, pol, seed)


def run_solver(inst, oracle, solver, max_seconds=None, max_queries=None):
    """Run one solver; budget overruns propagate as ResourceBudgetError."""
    t0 = time.perf_counter()
    nonconf, note = False, ""
    if solver == "covering":
        from .worstcase import solve_worstcase

        res, _ = solve_worstcase(oracle, max_seconds=max_seconds, max_queries=max_queries)
        x = res.x if res else None
    elif solver == "furthest":
        from .furthest import solve_furthest, solve_small_m

        run = solve_small_m if inst.m <= inst.n else solve_furthest
        res = run(oracle, max_seconds=max_seconds, max_queries=max_queries)
        x = res.x if res.feasible else None
        nonconf, note = res.report.nonconformant, res.report.note
    else:
        raise ValueError("unknown solver %r" % solver)
    status = "Feasible" if x is not None else "Infeasible"
    verified = x is None or inst.satisfied_strictly(x)
    return SolveReport(status, x, oracle.queries, time.perf_counter() - t0,
                       verified, nonconf, note)


def cmd_gen(args):
    if args.family == "adversary":
        from .lowerbound import build_adversarial_family

        data = build_adversarial_family(args.n, args.m).to_json()
        _write_json(args.out, data)
        return EXIT_OK
    inst = generate(args.m, args.n, args.bits, args.seed, args.feasible_only)
    _write_json(args.out, instance_to_json(inst))
    if args.out != "-":
        _write_json(verdict_path(args.out), ground_truth(inst))
    return EXIT_OK


def cmd_solve(args):
    with open(args.instance) as fh:
        inst = instance_from_json(json.load(fh))
    oracle = make_oracle(inst, args.oracle, args.policy, args.seed)
    try:
        rep = run_solver(inst, oracle, args.solver, args.max_seconds, args.max_queries)
    except ResourceBudgetError as err:
        print("status=Budget %s" % err)
        print("queries=%d" % oracle.queries)
        return EXIT_BUDGET
    finally:
        if args.transcript:
            oracle.transcript.dump(args.transcript)
    for line in rep.lines():
        print(line)
    if args.transcript:
        print("transcript=%s" % args.transcript)
    if not rep.verified:
        print("solution fails Ax > b", file=sys.stderr)
        return EXIT_MISMATCH
    side = verdict_path(args.instance)
    if os.path.exists(side):
        with open(side) as fh:
            truth = json.load(fh)["feasible"]
        if truth != (rep.x is not None):
            print("verdict mismatch: ground truth feasible=%s" % truth, file=sys.stderr)
            return EXIT_MISMATCH
    if rep.nonconformant:
        return EXIT_NONCONFORMANT
    return EXIT_OK


# ------------------------------------------------------------ chambers

def chamber_rows(sweep=200, max_m=6, lines=(3, 4, 5), grid=(3, 4), resolution=16, seed=0):
    """Rows (label, m, n, count, bound, tight) for the chamber experiments."""
    import math

    from . import chambers as ch

    rows = []
    for s in range(sweep):
        polys = ch.random_configuration(seed + s, max_m=max_m)
        c = ch.count_chambers_2d(polys)
        rows.append(("random%d" % (seed + s), len(polys), 2, c, ch.chamber_bound(len(polys), 2)))
    for m in lines:
        c = ch.count_chambers_2d(ch.generic_lines(m, seed + m), ch.LINE_WINDOW)
        rows.append(("lines", m, 2, c, ch.chamber_bound(m, 2)))
    for m in grid:
        sets = grid_slabs(m)
        g = ch.count_chambers_grid(sets, 3, resolution)
        label = "grid@%d%s" % (g.resolution, "" if g.stable else "(unstable)")
        rows.append((label, m, 3, g.count, ch.chamber_bound(m, 3)))
    return [r + (r[3] == r[4],) for r in rows]


def grid_slabs(m):
    """Slabs along planes in general position whose vertices sit inside [-1, 1]^3."""
    import math

    from .chambers import slab3

    planes = [((1, 0, 0), 0.1), ((0, 1, 0), -0.13), ((0, 0, 1), 0.07),
              ((1, 1, 1), 0.6 / math.sqrt(3)), ((1, -1, 1), -0.5 / math.sqrt(3))]
    if m > len(planes):
        raise ValueError("at most %d grid slabs" % len(planes))
    return [slab3(nrm, off) for nrm, off in planes[:m]]


def cmd_chambers(args):
    rows = chamber_rows(args.sweep, args.max_m, args.lines, args.grid, args.resolution, args.seed)
    print("\t".join(("case", "m", "n", "count", "bound", "tight")))
    over = 0
    for r in rows:
        print("\t".join(map(str, r)))
        over += r[3] > r[4]
    return 1 if over else EXIT_OK


# ------------------------------------------------------------ lower bound

def cmd_lowerbound(args):
    from .lowerbound import (build_adversarial_family, covering_solver,
                             pocket_sweep_solver, run_lowerbound_experiment)

    if args.solver == "covering":
        solver = covering_solver(max_seconds=args.max_seconds)
    else:
        solver = pocket_sweep_solver
    print("\t".join(("n", "m", "k", "min", "mean")))
    try:
        for m in args.m:
            fam = build_adversarial_family(args.n, m)
            row = run_lowerbound_experiment(solver, args.n, m, range(args.seeds), fam)
            print(row.line())
    except ResourceBudgetError as err:
        print("budget: %s" % err)
        return EXIT_BUDGET
    except AssertionError as err:
        print("floor violated: %s" % err, file=sys.stderr)
        return 1
    return EXIT_OK


# ------------------------------------------------------------ bench

def _bench_one(job):
    seed, m, n, bits, solver, oracle_kind, max_seconds = job
    inst = generate(m, n, bits, seed)
    truth = bool(lp_feasible_strict(inst.constraints()))
    oracle = make_oracle(inst, oracle_kind, "first", seed)
    try:
        rep = run_solver(inst, oracle, solver, max_seconds=max_seconds)
        status = rep.status
        ok = rep.verified and truth == (rep.x is not None)
        t = rep.wall_time
    except ResourceBudgetError:
        status, ok, t = "Budget", None, max_seconds
    return (seed, m, n, inst.L, solver, status, oracle.queries, "%.2f" % t,
            {True: "ok", False: "MISMATCH", None: "-"}[ok])


def cmd_bench(args):
    jobs = []
    for seed in range(args.seeds):
        rng = random.Random(seed)
        m, n = rng.randint(1, args.max_m), rng.randint(1, args.max_n)
        for solver in args.solvers:
            kind = "worst" if solver == "covering" else "furthest"
            jobs.append((seed, m, n, args.bits, solver, kind, args.max_seconds))
    print("\t".join(("seed", "m", "n", "L", "solver", "status", "queries", "time", "check")))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    for r in rows:
        print("\t".join(map(str, r)))
    return EXIT_MISMATCH if any(r[-1] == "MISMATCH" for r in rows) else EXIT_OK


# ------------------------------------------------------------ entry

def _write_json(path, data):
    text = json.dumps(data, indent=1)
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def build_parser():
    p = argparse.ArgumentParser(prog="unknownlp", description=__doc__)
    sub = p.add_subparsers(dest="mode", required=True)

    g = sub.add_parser("gen", help="write a random hidden instance and its verdict sidecar")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--bits", type=int, default=8)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--feasible-only", action="store_true")
    g.add_argument("--family", choices=("random", "adversary"), default="random")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a solver against a simulated oracle")
    s.add_argument("instance")
    s.add_argument("--oracle", choices=("worst", "furthest"), default="worst")
    s.add_argument("--solver", choices=("covering", "furthest"), default="covering")
    s.add_argument("--policy", choices=("first", "random"), default="first")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--transcript")
    s.add_argument("--max-seconds", type=float, default=60.0)
    s.add_argument("--max-queries", type=int)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("chambers", help="chamber counts against the bound")
    c.add_argument("--sweep", type=int, default=200)
    c.add_argument("--max-m", type=int, default=6)
    c.add_argument("--lines", type=int, nargs="*", default=[3, 4, 5])
    c.add_argument("--grid", type=int, nargs="*", default=[3, 4])
    c.add_argument("--resolution", type=int, default=16)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_chambers)

    lb = sub.add_parser("lowerbound", help="query counts forced by the adversary")
    lb.add_argument("--n", type=int, default=2)
    lb.add_argument("--m", type=int, nargs="+", default=[6])
    lb.add_argument("--solver", choices=("sweep", "covering"), default="sweep")
    lb.add_argument("--seeds", type=int, default=3)
    lb.add_argument("--max-seconds", type=float, default=60.0)
    lb.set_defaults(func=cmd_lowerbound)

    b = sub.add_parser("bench", help="table of solver runs on random instances")
    b.add_argument("--seeds", type=int, default=10)
    b.add_argument("--max-m", type=int, default=4)
    b.add_argument("--max-n", type=int, default=2)
    b.add_argument("--bits", type=int, default=8)
    b.add_argument("--solvers", nargs="+", choices=("covering", "furthest"),
                   default=["covering", "furthest"])
    b.add_argument("--max-seconds", type=float, default=30.0)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
