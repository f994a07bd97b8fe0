"""Native planners: greedy routing, anytime local search, exact search."""

from ..plan import ScheduledAction, TemporalPlan, makespan
from ._core import greedy_compile, lower_bound
from .compact import compact
from .anytime import AnytimeResult, Budget, anytime_compile
from .optimal import SearchLimits, optimal_compile
from .replicate import replicate_reverse

__all__ = [
    "ScheduledAction", "TemporalPlan", "makespan", "greedy_compile", "lower_bound",
    "AnytimeResult", "Budget", "anytime_compile", "SearchLimits", "optimal_compile",
    "replicate_reverse", "compact",
]
