"""Anytime improvement: randomized restarts plus local search over goal orders."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..plan import TemporalPlan
from ..problem import CompilationProblem, SeededRNG
from ._core import Context, decode, lower_bound_state


@dataclass(frozen=True)
class Budget:
    """Stop after ``iterations`` decodes or ``seconds`` of wall time, whichever first.

    Iteration budgets are deterministic; wall-clock budgets are not.
    """

    iterations: int | None = None
    seconds: float | None = None

    def __post_init__(self):
        if self.iterations is None and self.seconds is None:
            raise ValueError("budget needs iterations or seconds")
        if (self.iterations is not None and self.iterations < 0) or (self.seconds is not None and self.seconds < 0):
            raise ValueError("budget must be non-negative")

    @classmethod
    def parse(cls, text: str | int | float) -> "Budget":
        """``"500"``/``"500it"`` are iterations, ``"5s"``/``"2.5"`` are seconds."""
        if isinstance(text, int):
            return cls(iterations=text)
        if isinstance(text, float):
            return cls(seconds=text)
        s = text.strip().lower()
        if s.endswith("it"):
            return cls(iterations=int(s[:-2]))
        if s.endswith("s"):
            return cls(seconds=float(s[:-1]))
        return cls(iterations=int(s)) if s.isdigit() else cls(seconds=float(s))


@dataclass
class AnytimeResult:
    plan: TemporalPlan
    history: list[tuple[float, int]] = field(default_factory=list)
    iterations: int = 0
    lower_bound: int = 0

    @property
    def makespan(self):
        return self.plan.makespan


def anytime_compile(problem: CompilationProblem, seed: int = 0, budget: Budget | int | float | str = 200,
                    stop_at_bound: bool = True) -> AnytimeResult:
    """Improve on greedy until the budget runs out or the lower bound is met.

    Each iteration either restarts from a noisy greedy decode or perturbs the
    incumbent genome (goal order, route rank and detour allowance per goal,
    path tie-break seed) by one move: swap two goals, move a goal earlier,
    re-route a goal, reseed ties, let a goal detour. Decoded
    plans are already left-justified. Equal-makespan moves are accepted so the
    search can drift across plateaus. For ``p >= 2`` the mirrored one-level
    plan, searched with half the budget, seeds the incumbent.
    """
    if not isinstance(budget, Budget):
        budget = Budget.parse(budget)
    clock = time.perf_counter()
    rng = SeededRNG(seed)
    ctx = Context(problem)
    n = len(ctx.placement)
    lb = lower_bound_state(ctx, 0, list(ctx.placement), [0] * n, set(), set()) if ctx.goals else 0

    sched, order = decode(ctx)
    best = sched.to_plan()
    history = [(0.0, best.makespan)]
    genome = (order, {}, 0, {})
    cur_ms = best.makespan

    def consider(plan: TemporalPlan, it: int):
        nonlocal best
        if plan.makespan < best.makespan:
            best = plan
            history.append((time.perf_counter() - clock, plan.makespan))

    if problem.p >= 2 and ctx.goals:
        from .replicate import replicate_reverse

        sub = anytime_compile(problem.with_p(1), seed, _split(budget), stop_at_bound)
        consider(replicate_reverse(sub.plan, problem), 0)
        it = sub.iterations
    else:
        it = 0

    def out_of_budget() -> bool:
        if budget.iterations is not None and it >= budget.iterations:
            return True
        return budget.seconds is not None and time.perf_counter() - clock >= budget.seconds

    g = len(ctx.goals)
    while g and not out_of_budget() and not (stop_at_bound and best.makespan <= lb):
        it += 1
        order, ranks, tie, detours = genome
        move = rng.below(7) if g > 1 else 4 + rng.below(3)
        order = list(order)
        ranks, detours = dict(ranks), dict(detours)
        if move == 0:
            i, j = rng.below(g), rng.below(g)
            order[i], order[j] = order[j], order[i]
        elif move == 1:
            i = rng.below(g)
            j = rng.below(i + 1)
            order.insert(j, order.pop(i))
        elif move in (2, 4):
            gid = rng.below(g)
            ranks[gid] = rng.below(4)
        elif move == 3:
            # restart from a noisy greedy decode
            sched, order = decode(ctx, rng=SeededRNG(rng.below(2**62)), noise=0.3)
            ranks = {}
            plan = sched.to_plan()
            consider(plan, it)
            if plan.makespan <= cur_ms + 1:
                genome, cur_ms = (order, ranks, tie, {}), plan.makespan
            continue
        elif move == 5:
            tie = rng.below(2**62)
        else:
            # let one goal detour around busy qubits
            detours[rng.below(g)] = rng.below(3)
        sched, seq = decode(ctx, order=order, ranks=ranks, rng=SeededRNG(tie) if tie else None, slack=1,
                            detours=detours)
        plan = sched.to_plan()
        consider(plan, it)
        if plan.makespan < cur_ms or (plan.makespan == cur_ms and sum(detours.values()) <= sum(genome[3].values())):
            # detours cost decode time, so ties only keep them if they do not grow
            genome, cur_ms = (seq, ranks, tie, detours), plan.makespan
        elif rng.random() < 0.02:
            # occasionally accept a worse neighbour to leave a local minimum
            genome, cur_ms = (seq, ranks, tie, detours), plan.makespan
    return AnytimeResult(best, history, it, lb)


def _split(budget: Budget) -> Budget:
    return Budget(None if budget.iterations is None else budget.iterations // 2,
                  None if budget.seconds is None else budget.seconds / 2)
