"""Command-line front end.

    qcc gen --hardware N8 --u 0.9 --p 1 --seed 3 -o prob.json
    qcc compile prob.json --planner anytime --budget 5s -o prob.plan --report rep.json
    qcc emit-pddl prob.json --variant positive --out-dir pddl/
    qcc check prob.json other.plan --report rep.json
    qcc score 8 10
    qcc gantt prob.json prob.plan --format svg -o chart.svg
    qcc bench --sizes 8 --u 0.9 1.0 --p 1 --seeds 50 --budget 200 -o bench.csv

Exit status is 0 iff every plan the command produced or read validates.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .hardware import PRESETS, HardwareError, resolve_hardware
from .pddl import PDDLError, emit_domain, emit_problem, parse_plan, render_plan
from .planner import anytime_compile, greedy_compile, optimal_compile
from .problem import (ProblemError, build_problem, generate_instance, load_problem, random_instance,
                      save_problem)
from .report import BenchConfig, bench, gantt, rows_to_csv
from .validator import ipc_score, ipc_table, validate


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit_report(report, path: str | None):
    if path:
        _write(report.to_json(), path)


def _summary(report) -> str:
    if report.valid:
        return f"valid makespan={report.makespan}\n"
    lines = [f"INVALID ({len(report.violations)} violations)"]
    lines += [f"  {v.kind.value} action={v.action} t={v.time}: {v.message}" for v in report.violations]
    return "\n".join(lines) + "\n"


# -- subcommands ----------------------------------------------------------------

def cmd_gen(args) -> int:
    hw = resolve_hardware(args.hardware)
    n = len(hw.qubits)
    if args.states is not None:
        inst = random_instance(args.states, args.edges if args.edges is not None else n, args.seed, args.u)
    else:
        inst = generate_instance(n, args.u, args.seed)
    problem = build_problem(inst, hw, args.p, args.assignment, args.seed)
    # presets are referenced by name; custom files are embedded so the problem is self-contained
    ref = args.hardware if args.hardware in PRESETS and not args.inline else None
    _write(save_problem(problem, ref), args.output)
    return 0


def _compile(problem, args):
    if args.planner == "greedy":
        return greedy_compile(problem, args.seed), None
    if args.planner == "optimal":
        plan, proved = optimal_compile(problem)
        return plan, proved
    result = anytime_compile(problem, args.seed, args.budget)
    return result.plan, result.makespan <= result.lower_bound


def cmd_compile(args) -> int:
    problem = load_problem(args.problem)
    if args.p is not None:
        problem = problem.with_p(args.p)
    plan, proved = _compile(problem, args)
    header = f"planner={args.planner} seed={args.seed} makespan={plan.makespan}"
    if proved is not None:
        header += f" proved_optimal={str(proved).lower()}"
    _write(render_plan(plan, problem, header), args.output)
    report = validate(plan, problem)
    _emit_report(report, args.report)
    sys.stderr.write(_summary(report))
    return 0 if report.valid else 1


def cmd_emit_pddl(args) -> int:
    problem = load_problem(args.problem)
    if args.p is not None:
        problem = problem.with_p(args.p)
    domain = emit_domain(problem, args.variant)
    prob = emit_problem(problem, args.variant)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        _write(domain, os.path.join(args.out_dir, "domain.pddl"))
        _write(prob, os.path.join(args.out_dir, "problem.pddl"))
    else:
        _write(domain + "\n" + prob, None)
    return 0


def cmd_check(args) -> int:
    problem = load_problem(args.problem)
    plan = parse_plan(_read(args.plan), problem)
    report = validate(plan, problem)
    _emit_report(report, args.report)
    _write(report.to_json() if args.format == "json" else _summary(report), args.output)
    return 0 if report.valid else 1


def cmd_score(args) -> int:
    if args.table:
        rows = []
        for r in csv.DictReader(io.StringIO(_read(args.table))):
            ms = r.get("makespan", "")
            rows.append(dict(cls=r["cls"], instance=r["instance"], planner=r["planner"],
                             makespan=float(ms) if ms not in ("", None) else None))
        table = ipc_table(rows)
        if args.format == "json":
            _write(json.dumps(table, indent=1, sort_keys=True) + "\n", args.output)
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["cls", "planner", "ipc_mean"])
            for cls in sorted(table):
                for planner in sorted(table[cls]):
                    w.writerow([cls, planner, f"{table[cls][planner]:.6f}"])
            _write(buf.getvalue(), args.output)
        return 0
    if args.best is None or args.candidate is None:
        raise SystemExit("score needs BEST CANDIDATE or --table")
    _write(f"{ipc_score(args.best, args.candidate):.6g}\n", args.output)
    return 0


def cmd_gantt(args) -> int:
    problem = load_problem(args.problem)
    plan = parse_plan(_read(args.plan), problem)
    report = validate(plan, problem)
    if not report.valid:
        sys.stderr.write(_summary(report))
        return 1
    _write(gantt(plan, problem, args.format), args.output)
    return 0


def cmd_bench(args) -> int:
    seeds = tuple(range(args.seed, args.seed + args.seeds))
    config = BenchConfig(tuple(args.sizes), tuple(args.u), tuple(args.p), seeds, args.budget,
                         args.planner, args.assignment, args.workers)
    rows = bench(config)
    if args.format == "json":
        _write(json.dumps(rows, indent=1) + "\n", args.output)
    else:
        _write(rows_to_csv(rows), args.output)
    return 0 if all(r["valid"] for r in rows) else 1


# -- parser -------------------------------------------------------------------

def _float_or_int(text: str):
    f = float(text)
    return int(f) if f.is_integer() else f


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcc", description="Compile QAOA MaxCut circuits onto qubit hardware.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random compilation problem")
    g.add_argument("--hardware", default="N8", help="preset name or hardware JSON file")
    g.add_argument("--u", type=float, default=1.0, choices=[0.9, 1.0], help="utilization")
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--assignment", choices=["identity", "random"], default="random")
    g.add_argument("--states", type=int, help="qstate count for custom hardware (overrides --u)")
    g.add_argument("--edges", type=int, help="edge count with --states (default: qubit count)")
    g.add_argument("--inline", action="store_true", help="embed the hardware instead of referencing it")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("compile", help="compile a problem file to an IPC plan")
    c.add_argument("problem")
    c.add_argument("--planner", choices=["greedy", "anytime", "optimal"], default="anytime")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--budget", default="200", help="iterations (200, 200it) or seconds (5s)")
    c.add_argument("--p", type=int, help="override the problem's level count")
    c.add_argument("--report", help="write the validation report as JSON")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compile)

    e = sub.add_parser("emit-pddl", help="write PDDL domain and problem files")
    e.add_argument("problem")
    e.add_argument("--variant", choices=["negative", "positive"], default="negative")
    e.add_argument("--p", type=int)
    e.add_argument("--out-dir")
    e.set_defaults(func=cmd_emit_pddl)

    k = sub.add_parser("check", help="validate an IPC plan file")
    k.add_argument("problem")
    k.add_argument("plan")
    k.add_argument("--format", choices=["text", "json"], default="text")
    k.add_argument("--report")
    k.add_argument("-o", "--output")
    k.set_defaults(func=cmd_check)

    s = sub.add_parser("score", help="IPC quality score")
    s.add_argument("best", nargs="?", type=_float_or_int)
    s.add_argument("candidate", nargs="?", type=_float_or_int)
    s.add_argument("--table", help="CSV with cls,instance,planner,makespan columns")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_score)

    t = sub.add_parser("gantt", help="render a plan as a Gantt chart")
    t.add_argument("problem")
    t.add_argument("plan")
    t.add_argument("--format", choices=["text", "svg"], default="text")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_gantt)

    b = sub.add_parser("bench", help="run a benchmark grid")
    b.add_argument("--sizes", type=int, nargs="+", default=[8], choices=[8, 21, 40])
    b.add_argument("--u", type=float, nargs="+", default=[0.9, 1.0])
    b.add_argument("--p", type=int, nargs="+", default=[1])
    b.add_argument("--seeds", type=int, default=50, help="instances per cell")
    b.add_argument("--seed", type=int, default=0, help="first seed")
    b.add_argument("--budget", default="200")
    b.add_argument("--planner", choices=["greedy", "anytime", "optimal"], default="anytime")
    b.add_argument("--assignment", choices=["identity", "random"], default="random")
    b.add_argument("--workers", type=int, help="worker processes (capped by QCC_THREADS)")
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HardwareError, ProblemError, PDDLError, ValueError, OSError) as exc:
        sys.stderr.write(f"qcc {args.command}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
