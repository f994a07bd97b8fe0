"""PDDL 2.1 domain/problem emission and IPC plan parsing.

Qubit locations are baked into action and predicate names (``swap_1_2``,
``located_at_6``), so 2-qubit actions only take the two qstates as
parameters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .hardware import GateKind, HardwareGraph, pair_key
from .plan import ScheduledAction, TemporalPlan, Time
from .problem import CompilationProblem, norm_pair, qstate_name

VARIANTS = ("negative", "positive")
PLAN_EPSILON = Fraction(1, 1000)


class PDDLError(ValueError):
    pass


class PlanParseError(PDDLError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def ordinal(n: int) -> str:
    if 10 <= n % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def qubit_label(q: str) -> str:
    m = re.fullmatch(r"n(\d+)", q)
    return m.group(1) if m else q


def swap_name(a: str, b: str) -> str:
    return f"swap_{qubit_label(a)}_{qubit_label(b)}"


def ps_name(level: int, a: str, b: str) -> str:
    return f"P-S_{ordinal(level)}PhaseSeparation_at_{qubit_label(a)}-{qubit_label(b)}"


def mix_name(level: int, qstate: int, qubit: str) -> str:
    prefix = "mix" if level == 1 else f"mix{level}"
    return f"{prefix}_{qstate_name(qstate)}_at_{qubit_label(qubit)}"


def mixed_pred(level: int) -> str:
    return "mixed" if level == 1 else f"mixed{level}"


def loc(qubit: str) -> str:
    return f"located_at_{qubit_label(qubit)}"


def _block(name: str, params: str, duration: int, conditions: list[str], effects: list[str]) -> str:
    cond = ("\n" + " " * 15).join(conditions)
    eff = ("\n" + " " * 12).join(effects)
    return (f"(:durative-action {name}\n"
            f" :parameters ({params})\n"
            f" :duration (= ?duration {duration})\n"
            f" :condition (and {cond})\n"
            f" :effect (and {eff}))")


def _swap_action(a: str, b: str, duration: int) -> str:
    return _block(
        swap_name(a, b), "?q1 - qstate ?q2 - qstate", duration,
        [f"(at start ({loc(a)} ?q1))", f"(at start ({loc(b)} ?q2))"],
        [f"(at start (not ({loc(a)} ?q1)))", f"(at start (not ({loc(b)} ?q2)))",
         f"(at end ({loc(a)} ?q2))", f"(at end ({loc(b)} ?q1))"])


def _ps_action(level: int, a: str, b: str, duration: int, variant: str) -> str:
    goal = f"GOAL_PS{level}"
    if variant == "negative":
        guard = [f"(at start (not ({goal} ?q1 ?q2)))"]
        clear = []
    else:
        guard = [f"(at start (not_{goal} ?q1 ?q2))"]
        clear = [f"(at end (not (not_{goal} ?q1 ?q2)))", f"(at end (not (not_{goal} ?q2 ?q1)))"]
    conditions = [f"(at start ({loc(a)} ?q1))", f"(at start ({loc(b)} ?q2))"] + guard
    if level > 1:
        prev = level - 1
        conditions += [f"(at start (GOAL_PS{prev} ?q1 ?q2))",
                       f"(at start ({mixed_pred(prev)} ?q1))",
                       f"(at start ({mixed_pred(prev)} ?q2))"]
    effects = [f"(at start (not ({loc(a)} ?q1)))", f"(at start (not ({loc(b)} ?q2)))",
               f"(at end ({loc(a)} ?q1))", f"(at end ({loc(b)} ?q2))",
               f"(at end ({goal} ?q1 ?q2))", f"(at end ({goal} ?q2 ?q1))"] + clear
    return _block(ps_name(level, a, b), "?q1 - qstate ?q2 - qstate", duration, conditions, effects)


def _mix_action(level: int, s: int, qubit: str, duration: int, partners, variant: str) -> str:
    name = qstate_name(s)
    pred = mixed_pred(level)
    conditions = [f"(at start ({loc(qubit)} {name}))"]
    for b in partners:
        x, y = norm_pair(s, b)
        conditions.append(f"(at start (GOAL_PS{level} {qstate_name(x)} {qstate_name(y)}))")
    effects = [f"(at start (not ({loc(qubit)} {name})))", f"(at end ({loc(qubit)} {name}))",
               f"(at end ({pred} {name}))"]
    if variant == "negative":
        conditions.append(f"(over all (not ({pred} {name})))")
    else:
        conditions.append(f"(over all (not_{pred} {name}))")
        effects.append(f"(at end (not (not_{pred} {name})))")
    return _block(mix_name(level, s, qubit), "", duration, conditions, effects)


def domain_name(problem: CompilationProblem) -> str:
    return f"qaoa-compilation-n{problem.n_total}-p{problem.p}"


def emit_domain(problem: CompilationProblem, variant: str = "negative") -> str:
    """Domain with one durative action per gate location (and level/qstate)."""
    if variant not in VARIANTS:
        raise PDDLError(f"unknown variant {variant!r}")
    hw = problem.hardware
    constants = " ".join(qstate_name(s) for s in range(problem.n_total))
    preds = [f"({loc(q)} ?q - qstate)" for q in hw.qubits]
    for level in range(1, problem.p + 1):
        preds.append(f"(GOAL_PS{level} ?q1 - qstate ?q2 - qstate)")
        if variant == "positive":
            preds.append(f"(not_GOAL_PS{level} ?q1 - qstate ?q2 - qstate)")
    for level in problem.mix_levels():
        preds.append(f"({mixed_pred(level)} ?q - qstate)")
        if variant == "positive":
            preds.append(f"(not_{mixed_pred(level)} ?q - qstate)")
    reqs = ":typing :durative-actions" + (" :negative-preconditions" if variant == "negative" else "")

    blocks = []
    for e in hw.gates(GateKind.SWAP):
        blocks.append(_swap_action(e.a, e.b, e.duration))
    for level in range(1, problem.p + 1):
        for e in hw.gates(GateKind.PS):
            blocks.append(_ps_action(level, e.a, e.b, e.duration, variant))
    for level in problem.mix_levels():
        for s in sorted(problem.used):
            for q in hw.qubits:
                blocks.append(_mix_action(level, s, q, hw.mix_duration[q], problem.partners[s], variant))

    lines = [f"(define (domain {domain_name(problem)})",
             f" (:requirements {reqs})",
             " (:types qstate)",
             f" (:constants {constants} - qstate)",
             " (:predicates " + ("\n" + " " * 13).join(preds) + ")",
             ""]
    lines += [_indent(b) + "\n" for b in blocks]
    return "\n".join(lines).rstrip() + ")\n"


def _indent(block: str) -> str:
    return "\n".join(" " + line for line in block.splitlines())


def emit_problem(problem: CompilationProblem, variant: str = "negative") -> str:
    if variant not in VARIANTS:
        raise PDDLError(f"unknown variant {variant!r}")
    init = [f"({loc(q)} {qstate_name(s)})" for s, q in enumerate(problem.placement)]
    if variant == "positive":
        n = problem.n_total
        for level in range(1, problem.p + 1):
            init += [f"(not_GOAL_PS{level} {qstate_name(a)} {qstate_name(b)})"
                     for a in range(n) for b in range(n) if a != b]
        for level in problem.mix_levels():
            init += [f"(not_{mixed_pred(level)} {qstate_name(s)})" for s in sorted(problem.used)]
    goals = [f"(GOAL_PS{g.level} {qstate_name(g.pair[0])} {qstate_name(g.pair[1])})" for g in problem.goals]
    for level in problem.mix_levels():
        goals += [f"({mixed_pred(level)} {qstate_name(s)})" for s in sorted(problem.used)]
    sep = "\n" + " " * 8
    return (f"(define (problem qaoa-{problem.instance.n_states}states-p{problem.p}-s{problem.instance.seed})\n"
            f" (:domain {domain_name(problem)})\n"
            f" (:init {sep.join(init)})\n"
            f" (:goal (and {sep.join(goals)}))\n"
            f" (:metric minimize (total-time)))\n")


# -- s-expression re-parse ------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_sexpr(text: str):
    """Parse PDDL text into nested lists of strings (comments stripped)."""
    text = re.sub(r";[^\n]*", "", text)
    stack: list[list] = [[]]
    for tok in _TOKEN.findall(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise PDDLError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise PDDLError("unbalanced '('")
    return stack[0]


@dataclass
class DomainSummary:
    name: str
    constants: list[str]
    predicates: dict[str, int]
    actions: dict[str, dict]


def _timed(expr) -> tuple[str, list]:
    if not isinstance(expr, list) or len(expr) != 3:
        raise PDDLError(f"malformed timed literal {expr!r}")
    if expr[0] == "at" and expr[1] in ("start", "end"):
        return f"at {expr[1]}", expr[2]
    if expr[0] == "over" and expr[1] == "all":
        return "over all", expr[2]
    raise PDDLError(f"unknown time specifier in {expr!r}")


def check_domain(text: str) -> DomainSummary:
    """Re-parse an emitted domain and check the durative-action grammar."""
    (tree,) = parse_sexpr(text)
    if tree[:2] != ["define", ["domain", tree[1][1]]]:
        raise PDDLError("not a domain definition")
    constants, predicates, actions = [], {}, {}
    for section in tree[2:]:
        head = section[0]
        if head == ":constants":
            constants = [t for t in section[1:] if t not in ("-", "qstate")]
        elif head == ":predicates":
            for p in section[1:]:
                predicates[p[0]] = sum(1 for t in p[1:] if t.startswith("?"))
        elif head == ":durative-action":
            name = section[1]
            fields = dict(zip(section[2::2], section[3::2]))
            if set(fields) != {":parameters", ":duration", ":condition", ":effect"}:
                raise PDDLError(f"action {name} lacks required fields")
            dur = fields[":duration"]
            if dur[:2] != ["=", "?duration"] or int(dur[2]) < 1:
                raise PDDLError(f"action {name} has a bad duration")
            conds = fields[":condition"]
            effs = fields[":effect"]
            if conds[0] != "and" or effs[0] != "and":
                raise PDDLError(f"action {name}: condition/effect must be conjunctions")
            cond_list = [_timed(c) for c in conds[1:]]
            eff_list = [_timed(e) for e in effs[1:]]
            for _, lit in cond_list + eff_list:
                atom = lit[1] if lit[0] == "not" else lit
                if atom[0] not in predicates:
                    raise PDDLError(f"action {name} uses undeclared predicate {atom[0]}")
            actions[name] = {
                "parameters": [t for t in fields[":parameters"] if t.startswith("?")],
                "duration": int(dur[2]),
                "conditions": cond_list,
                "effects": eff_list,
            }
    return DomainSummary(tree[1][1], constants, predicates, actions)


def has_negative_condition(text: str) -> bool:
    summary = check_domain(text)
    return any(lit[0] == "not" for a in summary.actions.values() for _, lit in a["conditions"])


# -- plans ----------------------------------------------------------------------

@dataclass(frozen=True)
class _ActionTemplate:
    kind: GateKind
    qubits: tuple[str, ...]
    level: int | None
    qstate: int | None = None


def action_table(problem: CompilationProblem) -> dict[str, _ActionTemplate]:
    """Lower-cased action name -> what it stands for, for every emittable action."""
    hw: HardwareGraph = problem.hardware
    table = {}
    for e in hw.gates(GateKind.SWAP):
        table[swap_name(e.a, e.b).lower()] = _ActionTemplate(GateKind.SWAP, (e.a, e.b), None)
    for level in range(1, problem.p + 1):
        for e in hw.gates(GateKind.PS):
            table[ps_name(level, e.a, e.b).lower()] = _ActionTemplate(GateKind.PS, (e.a, e.b), level)
    for level in problem.mix_levels():
        for s in range(problem.n_total):
            for q in hw.qubits:
                table[mix_name(level, s, q).lower()] = _ActionTemplate(GateKind.MIX, (q,), level, s)
    return table


def _fmt_time(t: Time) -> str:
    return f"{float(t):.3f}" if isinstance(t, Fraction) else f"{t}.000"


def action_name(a: ScheduledAction) -> str:
    if a.kind is GateKind.SWAP:
        return swap_name(*a.qubits)
    if a.kind is GateKind.PS:
        return ps_name(a.level, *a.qubits)
    return mix_name(a.level, a.qstates[0], a.qubits[0])


def render_plan(plan: TemporalPlan, problem: CompilationProblem | None = None, header: str | None = None) -> str:
    lines = []
    if header:
        lines += [f"; {h}" for h in header.splitlines()]
    for a in plan.actions:
        if len(a.qstates) != len(a.qubits):
            raise PDDLError(f"action at {a.start} on {a.qubits} has no qstates to render")
        if len(a.qubits) == 2 and pair_key(*a.qubits) != a.qubits:
            a = replace(a, qubits=a.qubits[::-1], qstates=a.qstates[::-1])
        args = "" if a.kind is GateKind.MIX else " " + " ".join(qstate_name(s) for s in a.qstates)
        lines.append(f"{_fmt_time(a.start)}: ({action_name(a)}{args}) [{_fmt_time(a.duration)}]")
    return "\n".join(lines) + ("\n" if lines else "")


_PLAN_LINE = re.compile(
    r"^\s*(?P<start>[0-9]+(?:\.[0-9]*)?)\s*:\s*\(\s*(?P<name>[^\s()]+)(?P<args>(?:\s+[^\s()]+)*)\s*\)"
    r"\s*(?:\[\s*(?P<dur>[0-9]+(?:\.[0-9]*)?)\s*\])?\s*$")


def _grid(value: str, lineno: int) -> Time:
    try:
        exact = Fraction(Decimal(value))
    except InvalidOperation:
        raise PlanParseError(f"bad number {value!r}", lineno) from None
    nearest = round(exact)
    if abs(exact - nearest) <= PLAN_EPSILON:
        return int(nearest)
    return exact


def _qstate_id(name: str, problem: CompilationProblem, lineno: int) -> int:
    m = re.fullmatch(r"q(\d+)", name, flags=re.IGNORECASE)
    if not m or not 1 <= int(m.group(1)) <= problem.n_total:
        raise PlanParseError(f"unknown qstate {name!r}", lineno)
    return int(m.group(1)) - 1


def parse_plan(text: str, problem: CompilationProblem) -> TemporalPlan:
    table = action_table(problem)
    actions = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";"):
            continue
        m = _PLAN_LINE.match(line)
        if not m:
            raise PlanParseError(f"syntax error: {stripped!r}", lineno)
        tmpl = table.get(m.group("name").lower())
        if tmpl is None:
            raise PlanParseError(f"unknown action {m.group('name')!r}", lineno)
        args = m.group("args").split()
        if tmpl.kind is GateKind.MIX:
            if args:
                raise PlanParseError(f"{m.group('name')} takes no arguments, got {len(args)}", lineno)
            qstates = (tmpl.qstate,)
        else:
            if len(args) != 2:
                raise PlanParseError(f"{m.group('name')} takes 2 arguments, got {len(args)}", lineno)
            qstates = tuple(_qstate_id(x, problem, lineno) for x in args)
        start = _grid(m.group("start"), lineno)
        if m.group("dur") is not None:
            dur = _grid(m.group("dur"), lineno)
        else:
            dur = problem.hardware.gate_duration(tmpl.kind, tmpl.qubits)
        actions.append(ScheduledAction(start, dur, tmpl.kind, tmpl.qubits, qstates, tmpl.level))
    return TemporalPlan.of(actions)
