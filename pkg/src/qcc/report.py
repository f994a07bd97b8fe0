"""Gantt charts and benchmark tables."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from html import escape

from .hardware import GateKind, preset
from .plan import ScheduledAction, TemporalPlan
from .planner import anytime_compile, greedy_compile, optimal_compile
from .problem import CompilationProblem, build_problem, generate_instance, qstate_name
from .validator import InvalidPlanError, remove_superfluous, validate

# -- Gantt --------------------------------------------------------------------

_PALETTE = ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6",
            "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#fffac8", "#800000",
            "#aaffc3", "#808000", "#ffd8b1", "#000075", "#808080"]


def _superfluous(plan: TemporalPlan, problem: CompilationProblem) -> set[int]:
    """Indices of actions that superfluous-gate removal would drop."""
    kept = remove_superfluous(plan, problem)
    remaining = [(a.start, a.kind, a.qubits, a.level) for a in kept]
    extra = set()
    for i, a in enumerate(plan):
        key = (a.start, a.kind, a.qubits, a.level)
        if key in remaining:
            remaining.remove(key)
        else:
            extra.add(i)
    return extra


def _label(a: ScheduledAction, states) -> str:
    names = ",".join(str(s + 1) for s in states)
    if a.kind is GateKind.MIX:
        return names
    return ("S" if a.kind is GateKind.SWAP else "P") + names


def gantt(plan: TemporalPlan, problem: CompilationProblem, format: str = "text") -> str:
    """Chart with time on the x-axis and one row per qubit.

    SWAP blocks are white, MIX blocks black with the qstate number, PS blocks
    coloured by goal pair. Gates the superfluous-gate removal would delete
    carry a ``+``. Invalid plans are refused.
    """
    report = validate(plan, problem)
    if not report.valid:
        raise InvalidPlanError(report)
    extra = _superfluous(plan, problem)
    states = report.resolved_qstates
    if format == "text":
        return _gantt_text(plan, problem, states, extra)
    if format == "svg":
        return _gantt_svg(plan, problem, states, extra)
    raise ValueError(f"unknown gantt format {format!r}")


def _gantt_text(plan, problem, states, extra) -> str:
    width = int(math.ceil(plan.makespan))
    qubits = list(problem.hardware.qubits)
    pad = max(len(q) for q in qubits)
    rows = {q: ["."] * width for q in qubits}
    for i, a in enumerate(plan):
        lo, hi = int(math.floor(a.start)), int(math.ceil(a.end))
        fill = {GateKind.SWAP: "s", GateKind.PS: "P", GateKind.MIX: "M"}[a.kind]
        for q, s in zip(a.qubits, states[i]):
            cells = rows[q]
            for c in range(lo, hi):
                cells[c] = fill
            tag = ("+" if i in extra else "") + (str(s + 1) if s is not None else "")
            for k, ch in enumerate(tag[: hi - lo]):
                cells[lo + k] = ch
    lines = [" " * pad + " |" + "".join(str(c % 10) for c in range(width))]
    lines += [f"{q:>{pad}} |" + "".join(rows[q]) for q in qubits]
    return "\n".join(lines) + "\n"


def _gantt_svg(plan, problem, states, extra) -> str:
    cell, row_h, left, top = 24, 26, 48, 24
    qubits = list(problem.hardware.qubits)
    width = int(math.ceil(plan.makespan))
    w = left + cell * max(width, 1) + 12
    h = top + row_h * len(qubits) + 12
    colours = {pair: _PALETTE[i % len(_PALETTE)] for i, pair in enumerate(problem.instance.sorted_edges)}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           f'viewBox="0 0 {w} {h}" font-family="monospace" font-size="11">',
           f'<rect x="0" y="0" width="{w}" height="{h}" style="fill:#ffffff"/>']
    for c in range(width + 1):
        x = left + c * cell
        out.append(f'<line x1="{x}" y1="{top}" x2="{x}" y2="{h - 12}" style="stroke:#dddddd;stroke-width:1"/>')
        out.append(f'<text x="{x}" y="{top - 8}" text-anchor="middle" style="fill:#333333">{c}</text>')
    ys = {q: top + r * row_h for r, q in enumerate(qubits)}
    for q, y in ys.items():
        out.append(f'<text x="{left - 6}" y="{y + row_h / 2 + 4}" text-anchor="end" style="fill:#000000">{escape(q)}</text>')
    for i, a in enumerate(plan):
        s = states[i]
        x = left + float(a.start) * cell
        bw = float(a.duration) * cell
        if a.kind is GateKind.SWAP:
            fill, ink = "#ffffff", "#000000"
        elif a.kind is GateKind.MIX:
            fill, ink = "#000000", "#ffffff"
        else:
            pair = tuple(sorted(s))
            fill, ink = colours.get(pair, "#cccccc"), "#000000"
        label = ("+" if i in extra else "") + _label(a, s)
        for q in a.qubits:
            y = ys[q] + 3
            out.append(f'<g><title>{escape(a.kind.value)} {escape(",".join(a.qubits))} '
                       f'{escape(",".join(qstate_name(t) for t in s))} t={a.start}</title>'
                       f'<rect x="{x:.1f}" y="{y}" width="{bw:.1f}" height="{row_h - 6}" '
                       f'style="fill:{fill};stroke:#000000;stroke-width:1"/>'
                       f'<text x="{x + bw / 2:.1f}" y="{y + row_h / 2 + 1}" text-anchor="middle" '
                       f'style="fill:{ink}">{escape(label)}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- bench --------------------------------------------------------------------

@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[int, ...] = (8,)
    utilizations: tuple[float, ...] = (0.9, 1.0)
    ps: tuple[int, ...] = (1,)
    seeds: tuple[int, ...] = tuple(range(50))
    budget: str = "200"
    planner: str = "anytime"
    assignment: str = "random"
    workers: int | None = None


BENCH_COLUMNS = ["size", "u", "p", "seed", "makespan", "proved_optimal", "wall_time", "actions",
                 "n_states", "n_edges", "valid", "error"]


def bench_instances(config: BenchConfig) -> list[tuple[int, float, int, int]]:
    """Benchmark cells in output order."""
    return [(n, u, p, s) for n in config.sizes for u in config.utilizations
            for p in config.ps for s in config.seeds]


def _run_cell(args) -> dict:
    (n, u, p, seed), config = args
    row = dict(size=n, u=u, p=p, seed=seed, makespan="", proved_optimal=False, wall_time=0.0,
               actions="", n_states="", n_edges="", valid=False, error="")
    clock = time.perf_counter()
    try:
        inst = generate_instance(n, u, seed)
        row.update(n_states=inst.n_states, n_edges=len(inst.edges))
        problem = build_problem(inst, preset(f"N{n}"), p, config.assignment, seed)
        proved = False
        if config.planner == "greedy":
            plan = greedy_compile(problem, seed)
        elif config.planner == "optimal":
            plan, proved = optimal_compile(problem)
        else:
            result = anytime_compile(problem, seed, config.budget)
            plan, proved = result.plan, result.makespan <= result.lower_bound
        report = validate(plan, problem)
        row.update(makespan=plan.makespan, proved_optimal=proved, actions=len(plan), valid=report.valid)
        if not report.valid:
            row["error"] = ";".join(sorted(k.value for k in report.kinds()))
    except Exception as exc:  # a failing cell is a row, not an abort
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_time"] = round(time.perf_counter() - clock, 4)
    return row


def worker_count(requested: int | None = None) -> int:
    """Worker cap: explicit request, else ``QCC_THREADS``, else CPU count."""
    env = os.environ.get("QCC_THREADS")
    cap = int(env) if env and env.isdigit() and int(env) > 0 else (os.cpu_count() or 1)
    return max(1, min(requested, cap) if requested else cap)


def bench(config: BenchConfig) -> list[dict]:
    """Generate, compile, validate every cell; rows follow config order."""
    cells = [(c, config) for c in bench_instances(config)]
    workers = worker_count(config.workers)
    if workers == 1 or len(cells) <= 1:
        return [_run_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, cells))


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in BENCH_COLUMNS})
    return buf.getvalue()


def csv_to_rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def config_to_dict(config: BenchConfig) -> dict:
    return asdict(config)


