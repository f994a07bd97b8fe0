"""Left-shift a plan without changing the order of actions on any qubit."""

from __future__ import annotations

from dataclasses import replace

from ..plan import TemporalPlan


def compact(plan: TemporalPlan) -> TemporalPlan:
    """Start every action as soon as its qubits are free.

    Every precondition in this domain travels with a qstate, and a qstate's
    gates are ordered through the qubits it visits, so keeping the per-qubit
    order keeps a valid plan valid. The makespan never grows.
    """
    free: dict[str, object] = {}
    out = []
    for a in plan:  # sorted by start
        start = max((free.get(q, 0) for q in a.qubits), default=0)
        b = replace(a, start=start)
        for q in a.qubits:
            free[q] = b.end
        out.append(b)
    return TemporalPlan.of(out)
