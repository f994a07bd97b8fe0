"""Independent plan simulation, superfluous-gate removal and IPC scoring."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .hardware import GateKind
from .plan import ScheduledAction, TemporalPlan, Time
from .problem import CompilationProblem, PSGoal, norm_pair, qstate_name


class ViolationKind(str, Enum):
    MUTEX_OVERLAP = "MUTEX_OVERLAP"
    WRONG_EDGE = "WRONG_EDGE"
    WRONG_DURATION = "WRONG_DURATION"
    GOAL_UNACHIEVED = "GOAL_UNACHIEVED"
    PREMATURE_PS2 = "PREMATURE_PS2"
    PREMATURE_MIX = "PREMATURE_MIX"
    DOUBLE_MIX = "DOUBLE_MIX"
    DUPLICATE_GOAL = "DUPLICATE_GOAL"
    BAD_QSTATE_LOCATION = "BAD_QSTATE_LOCATION"
    NON_GOAL_PS = "NON_GOAL_PS"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    action: int | None
    time: Time | None
    message: str

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "action": self.action,
                "time": _json_time(self.time), "message": self.message}


def _json_time(t):
    if t is None or isinstance(t, int):
        return t
    return float(t) if isinstance(t, Fraction) else t


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    achieved: dict[int, set[PSGoal]] = field(default_factory=dict)
    final_locations: dict[int, str] = field(default_factory=dict)
    makespan: Time = 0
    # qstates found on each action's qubits at its start (plan order)
    resolved_qstates: list[tuple[int | None, ...]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "makespan": _json_time(self.makespan),
            "violations": [v.to_dict() for v in self.violations],
            "achieved": {str(level): sorted([qstate_name(a), qstate_name(b)] for a, b in (g.pair for g in goals))
                         for level, goals in sorted(self.achieved.items())},
            "final_locations": {qstate_name(q): loc for q, loc in sorted(self.final_locations.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


class InvalidPlanError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.violations[0]
        super().__init__(f"plan is invalid ({len(report.violations)} violations; first: {first.kind.value}: {first.message})")


def _static_check(i: int, a: ScheduledAction, problem: CompilationProblem, out: list[Violation]) -> bool:
    hw = problem.hardware
    bad = [q for q in a.qubits if q not in hw.index]
    if bad or len(a.qubits) != a.kind.arity or len(set(a.qubits)) != len(a.qubits):
        out.append(Violation(ViolationKind.WRONG_EDGE, i, a.start,
                             f"{a.kind.value} on {a.qubits}: not a {a.kind.arity}-qubit gate location"))
        return False
    if a.duration <= 0:
        out.append(Violation(ViolationKind.WRONG_DURATION, i, a.start, f"non-positive duration {a.duration}"))
    expected = hw.gate_duration(a.kind, a.qubits)
    if expected is None:
        out.append(Violation(ViolationKind.WRONG_EDGE, i, a.start,
                             f"no {a.kind.value} gate on {'-'.join(a.qubits)}"))
    elif a.duration != expected:
        out.append(Violation(ViolationKind.WRONG_DURATION, i, a.start,
                             f"{a.kind.value} on {'-'.join(a.qubits)} lasts {expected}, plan says {a.duration}"))
    if a.kind is GateKind.PS and not (a.level is not None and 1 <= a.level <= problem.p):
        out.append(Violation(ViolationKind.WRONG_EDGE, i, a.start, f"PS level {a.level} outside 1..{problem.p}"))
        return False
    if a.kind is GateKind.MIX and not (a.level is not None and 1 <= a.level < problem.p):
        out.append(Violation(ViolationKind.PREMATURE_MIX, i, a.start,
                             f"no mixing step at level {a.level} when p={problem.p}"))
        return False
    return True


def _mutex(actions: tuple[ScheduledAction, ...], ok: list[bool], out: list[Violation]):
    per_qubit: dict[str, list[int]] = defaultdict(list)
    for i, a in enumerate(actions):
        for q in set(a.qubits):
            per_qubit[q].append(i)
    clashes = set()
    for q, idxs in per_qubit.items():
        idxs.sort(key=lambda i: (actions[i].start, i))
        active: list[int] = []
        for i in idxs:
            a = actions[i]
            active = [j for j in active if actions[j].end > a.start]
            for j in active:
                if (j, i) not in clashes:
                    clashes.add((j, i))
                    out.append(Violation(ViolationKind.MUTEX_OVERLAP, i, a.start,
                                         f"action {i} overlaps action {j} on {q}"))
            active.append(i)
    return clashes


def validate(plan: TemporalPlan, problem: CompilationProblem) -> ValidationReport:
    """Replay ``plan`` chronologically and check every compilation constraint.

    Intervals are half-open, so an action may start when another ends on the
    same qubit; effects of actions ending at time t are applied before any
    action starting at t is checked.
    """
    actions = plan.actions
    violations: list[Violation] = []
    ok = [_static_check(i, a, problem, violations) for i, a in enumerate(actions)]
    _mutex(actions, ok, violations)

    hw = problem.hardware
    occ: dict[str, int | None] = {q: None for q in hw.qubits}
    for qs, qubit in enumerate(problem.placement):
        occ[qubit] = qs
    edges = problem.instance.edges
    achieved: set[tuple[int, tuple[int, int]]] = set()
    in_flight_goals: set[tuple[int, tuple[int, int]]] = set()
    mixed: set[tuple[int, int]] = set()
    in_flight_mix: set[tuple[int, int]] = set()
    held: dict[str, int] = {}
    taken: dict[int, tuple] = {}
    resolved: list[tuple] = [() for _ in actions]

    events = []
    for i, a in enumerate(actions):
        if ok[i]:
            events.append((a.start, 1, i))
            events.append((a.end, 0, i))
    events.sort()

    for t, is_start, i in events:
        a = actions[i]
        if not is_start:
            if i not in taken:
                continue
            states = taken.pop(i)
            for q in a.qubits:
                held.pop(q, None)
            if a.kind is GateKind.SWAP:
                occ[a.qubits[0]], occ[a.qubits[1]] = states[1], states[0]
            else:
                for q, s in zip(a.qubits, states):
                    occ[q] = s
                if a.kind is GateKind.PS and None not in states:
                    key = (a.level, norm_pair(*states))
                    in_flight_goals.discard(key)
                    achieved.add(key)
                elif a.kind is GateKind.MIX and states[0] is not None:
                    in_flight_mix.discard((a.level, states[0]))
                    mixed.add((a.level, states[0]))
            continue

        if any(q in held for q in a.qubits):
            # already reported as a mutex overlap; the action cannot be replayed
            continue
        states = tuple(occ[q] for q in a.qubits)
        resolved[i] = states
        if a.qstates and tuple(a.qstates) != states:
            violations.append(Violation(
                ViolationKind.BAD_QSTATE_LOCATION, i, t,
                f"{a.kind.value} on {'-'.join(a.qubits)} expects "
                f"{[qstate_name(s) for s in a.qstates]} but finds "
                f"{[qstate_name(s) if s is not None else None for s in states]}"))
        if None in states and a.kind is not GateKind.SWAP:
            violations.append(Violation(ViolationKind.BAD_QSTATE_LOCATION, i, t,
                                        f"no qstate on {a.qubits} for {a.kind.value}"))
        for q in a.qubits:
            held[q] = i
            occ[q] = None
        taken[i] = states

        if a.kind is GateKind.PS and None not in states:
            pair = norm_pair(*states)
            names = f"({qstate_name(pair[0])},{qstate_name(pair[1])})"
            key = (a.level, pair)
            if pair not in edges:
                violations.append(Violation(ViolationKind.NON_GOAL_PS, i, t, f"PS on non-edge pair {names}"))
            elif key in achieved or key in in_flight_goals:
                violations.append(Violation(ViolationKind.DUPLICATE_GOAL, i, t,
                                            f"level-{a.level} PS on {names} already performed"))
            else:
                in_flight_goals.add(key)
            if a.level > 1 and pair in edges:
                prev = a.level - 1
                missing = []
                if (prev, pair) not in achieved:
                    missing.append(f"level-{prev} PS")
                missing += [f"mix of {qstate_name(s)}" for s in pair if (prev, s) not in mixed]
                if missing:
                    violations.append(Violation(ViolationKind.PREMATURE_PS2, i, t,
                                                f"level-{a.level} PS on {names} before {', '.join(missing)}"))
        elif a.kind is GateKind.MIX and states[0] is not None:
            s = states[0]
            key = (a.level, s)
            if key in mixed or key in in_flight_mix:
                violations.append(Violation(ViolationKind.DOUBLE_MIX, i, t,
                                            f"{qstate_name(s)} already mixed at level {a.level}"))
            in_flight_mix.add(key)
            pending = [b for b in problem.partners.get(s, ()) if (a.level, norm_pair(s, b)) not in achieved]
            if pending:
                violations.append(Violation(
                    ViolationKind.PREMATURE_MIX, i, t,
                    f"mix of {qstate_name(s)} before level-{a.level} PS with "
                    f"{', '.join(qstate_name(b) for b in pending)}"))

    end = plan.makespan
    for g in problem.goals:
        if (g.level, g.pair) not in achieved:
            violations.append(Violation(ViolationKind.GOAL_UNACHIEVED, None, end,
                                        f"level-{g.level} PS on ({qstate_name(g.pair[0])},{qstate_name(g.pair[1])}) never performed"))
    for level in problem.mix_levels():
        for s in sorted(problem.used):
            if (level, s) not in mixed:
                violations.append(Violation(ViolationKind.GOAL_UNACHIEVED, None, end,
                                            f"{qstate_name(s)} never mixed at level {level}"))

    by_level: dict[int, set[PSGoal]] = {level: set() for level in range(1, problem.p + 1)}
    for level, pair in achieved:
        if pair in edges and level in by_level:
            by_level[level].add(PSGoal(level, pair))
    final = {s: q for q, s in occ.items() if s is not None}
    violations.sort(key=lambda v: (v.time if v.time is not None else 0, v.action if v.action is not None else -1))
    return ValidationReport(violations, by_level, final, end, resolved)


# -- post-processing ------------------------------------------------------------

def _next_on_qubits(actions: list[ScheduledAction], i: int) -> int | None:
    """Index of the next action sharing a qubit with action i, if it is unique."""
    a = actions[i]
    nxt = None
    for q in a.qubits:
        later = [j for j, b in enumerate(actions) if j != i and q in b.qubits and b.start >= a.end]
        if not later:
            return None
        j = min(later, key=lambda j: actions[j].start)
        if nxt is not None and nxt != j:
            return None
        nxt = j
    return nxt


def _deletion_candidates(actions: list[ScheduledAction], problem: CompilationProblem,
                         report: ValidationReport) -> Iterable[tuple[int, ...]]:
    for i, a in enumerate(actions):
        states = report.resolved_qstates[i]
        if a.kind is GateKind.MIX and states and states[0] not in problem.used:
            yield (i,)
    for i, a in enumerate(actions):
        if a.kind is GateKind.SWAP:
            j = _next_on_qubits(actions, i)
            if j is not None and actions[j].kind is GateKind.SWAP and set(actions[j].qubits) == set(a.qubits):
                yield (i, j)
    for i in sorted(range(len(actions)), key=lambda i: actions[i].sort_key(), reverse=True):
        yield (i,)


def remove_superfluous(plan: TemporalPlan, problem: CompilationProblem) -> TemporalPlan:
    """Delete actions whose removal keeps the plan valid, until none is left.

    Candidates are tried in order: mixes of goal-less qstates, back-to-back
    swaps that cancel, then any single action (latest first).
    """
    report = validate(plan, problem)
    if not report.valid:
        raise InvalidPlanError(report)
    # deletions can move qstates, so trials re-derive them instead of trusting labels
    actions = [replace(a, qstates=()) for a in plan.actions]
    progress = True
    while progress:
        progress = False
        for group in _deletion_candidates(actions, problem, report):
            trial = [a for k, a in enumerate(actions) if k not in group]
            trial_report = validate(TemporalPlan.of(trial), problem)
            if trial_report.valid:
                actions = list(TemporalPlan.of(trial).actions)
                report = trial_report
                progress = True
                break
    return TemporalPlan.of(replace(a, qstates=tuple(report.resolved_qstates[i]))
                           for i, a in enumerate(actions))


def ipc_score(best_makespan, candidate_makespan) -> float:
    """best / candidate; 1.0 means the candidate is as good as the best known."""
    if best_makespan <= 0 or candidate_makespan <= 0:
        raise ValueError("makespans must be positive")
    if candidate_makespan < best_makespan:
        raise ValueError(f"candidate makespan {candidate_makespan} beats best {best_makespan}; update the best first")
    return float(Fraction(best_makespan) / Fraction(candidate_makespan))


def ipc_table(rows: Iterable[dict]) -> dict[str, dict[str, float]]:
    """Mean IPC score per (problem class, planner).

    ``rows`` carry ``cls``, ``instance``, ``planner`` and ``makespan`` (None
    when unsolved). The best makespan of an instance is the minimum over all
    planners; unsolved instances score 0.
    """
    rows = list(rows)
    best: dict[tuple, float] = {}
    for r in rows:
        m = r.get("makespan")
        if m is not None and m > 0:
            key = (r["cls"], r["instance"])
            best[key] = min(best.get(key, m), m)
    scores: dict[str, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        key = (r["cls"], r["instance"])
        m = r.get("makespan")
        s = ipc_score(best[key], m) if m is not None and key in best else 0.0
        scores[r["cls"]][r["planner"]].append(s)
    return {c: {p: sum(v) / len(v) for p, v in sorted(d.items())} for c, d in sorted(scores.items())}
