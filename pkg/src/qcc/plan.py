"""Scheduled gate applications and temporal plans."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Union

from .hardware import GateKind, qubit_key

Time = Union[int, Fraction]


def as_time(x) -> Time:
    """Integers stay integers; everything else becomes an exact Fraction."""
    if isinstance(x, int):
        return x
    f = Fraction(x) if not isinstance(x, float) else Fraction(repr(x))
    return int(f) if f.denominator == 1 else f


@dataclass(frozen=True)
class ScheduledAction:
    start: Time
    duration: Time
    kind: GateKind
    qubits: tuple[str, ...]
    qstates: tuple[int, ...] = ()
    level: int | None = None

    @property
    def end(self) -> Time:
        return self.start + self.duration

    def sort_key(self):
        return (self.start, tuple(qubit_key(q) for q in self.qubits), self.kind.value, self.level or 0)

    def shifted(self, dt: Time) -> "ScheduledAction":
        return replace(self, start=self.start + dt)


@dataclass(frozen=True)
class TemporalPlan:
    actions: tuple[ScheduledAction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(sorted(self.actions, key=ScheduledAction.sort_key)))

    @classmethod
    def of(cls, actions: Iterable[ScheduledAction]) -> "TemporalPlan":
        return cls(tuple(actions))

    @property
    def makespan(self) -> Time:
        return max((a.end for a in self.actions), default=0)

    def __len__(self):
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def count(self, kind: GateKind) -> int:
        return sum(1 for a in self.actions if a.kind is kind)


def makespan(plan: TemporalPlan) -> Time:
    return plan.makespan
