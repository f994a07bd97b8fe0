"""Two-level plans built by mirroring a one-level plan."""

from __future__ import annotations

from ..hardware import GateKind
from ..plan import ScheduledAction, TemporalPlan
from ..problem import CompilationProblem
from ..validator import InvalidPlanError, validate


def replicate_reverse(p1_plan: TemporalPlan, problem: CompilationProblem) -> TemporalPlan:
    """Run the plan, mix every used qstate, then run the plan backwards.

    Swaps are self-inverse, so the mirrored half returns every qstate to
    where its level-1 gates happened, in reverse order. With ``M1`` the input
    makespan the result has makespan ``2*M1 + mix`` whenever there is at
    least one goal.
    """
    if problem.p != 2:
        raise ValueError("replicate_reverse builds two-level plans; problem.p must be 2")
    p1 = problem.with_p(1)
    report = validate(p1_plan, p1)
    if not report.valid:
        raise InvalidPlanError(report)
    if not problem.goals:
        return TemporalPlan()
    m1 = p1_plan.makespan
    hw = problem.hardware
    final = report.final_locations
    mixes = [ScheduledAction(m1, hw.mix_duration[final[s]], GateKind.MIX, (final[s],), (s,), 1)
             for s in sorted(problem.used)]
    gap = max(a.duration for a in mixes)
    offset = m1 + gap
    mirrored = []
    for a in p1_plan:
        start = offset + (m1 - a.end)
        level = 2 if a.kind is GateKind.PS else a.level
        mirrored.append(ScheduledAction(start, a.duration, a.kind, a.qubits, (), level))
    # qstates of the mirrored half are recomputed by the validator's replay
    plan = TemporalPlan.of([*p1_plan, *mixes, *mirrored])
    return _relabel(plan, problem)


def _relabel(plan: TemporalPlan, problem: CompilationProblem) -> TemporalPlan:
    """Fill in the qstates carried by each action by replaying swaps."""
    where = {q: s for s, q in enumerate(problem.placement)}
    events = sorted(plan, key=lambda a: (a.start, a.end))
    out = []
    pending: list[tuple] = []
    for a in events:
        # apply swaps that finished by this start
        pending.sort(key=lambda e: e[0])
        while pending and pending[0][0] <= a.start:
            _, x, y = pending.pop(0)
            where[x], where[y] = where[y], where[x]
        out.append(ScheduledAction(a.start, a.duration, a.kind, a.qubits,
                                   tuple(where[q] for q in a.qubits), a.level))
        if a.kind is GateKind.SWAP:
            pending.append((a.end, *a.qubits))
    return TemporalPlan.of(out)
