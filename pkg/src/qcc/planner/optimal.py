"""Exhaustive makespan search for tiny instances.

Any schedule can be shifted left until every action starts either when the
previous action (in start order) starts or when its own qubits free up, so
the search enumerates action sequences with non-decreasing start times and
places each action at that earliest moment. Actions sharing a start time are
taken in increasing key order to avoid enumerating permutations. The outer
loop deepens the makespan bound one cycle at a time, so the first plan found
is optimal.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..hardware import GateKind
from ..plan import ScheduledAction, TemporalPlan
from ..validator import remove_superfluous
from ._core import Context, decode, lower_bound_state
from .compact import compact


@dataclass(frozen=True)
class SearchLimits:
    max_actions: int = 64
    max_makespan: int | None = None
    node_budget: int = 2_000_000


class _BudgetExhausted(Exception):
    pass


class _Search:
    def __init__(self, ctx: Context, limits: SearchLimits):
        self.ctx = ctx
        self.limits = limits
        self.nodes = 0
        self.truncated = False
        n = ctx.n
        # static action keys: kind rank, qubits, level
        self.swaps = sorted(ctx.swap_dur)
        self.n_goals = len(ctx.goals)
        self.pair_goal = {(level, pair): gid for gid, (level, pair) in enumerate(ctx.goals)}
        self.relevant = set(ctx.used)
        self.need_mix = {(lv, s) for lv in range(1, ctx.p) for s in ctx.used}
        self.ps_at = {}
        for a, b, d in ctx.ps_edges:
            self.ps_at[(a, b)] = d
        self.n = n

    # -- state -----------------------------------------------------------------
    def run(self, bound: int):
        ctx = self.ctx
        self.bound = bound
        self.seen: dict = {}
        loc = list(ctx.placement)
        occ = [0] * ctx.n
        for s, q in enumerate(loc):
            occ[q] = s
        free = [0] * ctx.n
        self.trail: list[tuple] = []
        self.last = [None] * ctx.n
        return self._dfs(0, (-1,), loc, occ, free, frozenset(), frozenset(), 0)

    def _remaining(self, s: int, done, mixed) -> bool:
        ctx = self.ctx
        for level in range(1, ctx.p + 1):
            for gid in ctx.goals_of.get((level, s), ()):
                if gid not in done:
                    return True
        return any((lv, s) not in mixed for lv in range(1, ctx.p) if s in self.relevant)

    def _dfs(self, t, last_key, loc, occ, free, done, mixed, end) -> bool:
        ctx = self.ctx
        self.nodes += 1
        if self.nodes > self.limits.node_budget:
            raise _BudgetExhausted
        if len(done) == self.n_goals and len(mixed) == len(self.need_mix):
            return True
        if len(self.trail) >= self.limits.max_actions:
            self.truncated = True
            return False
        ready = [max(t, free[loc[s]]) for s in range(len(loc))]
        if lower_bound_state(ctx, t, loc, ready, done, mixed, end) > self.bound:
            return False
        # dominance: same relevant placement and progress reached no later
        key = (tuple(loc[s] for s in ctx.used), done, mixed)
        sig = (t, last_key, tuple(f if f > t else t for f in free))
        bucket = self.seen.setdefault(key, [])
        for ot, okey, ofree in bucket:
            if (ot < t or (ot == t and okey <= last_key)) and all(x <= y for x, y in zip(ofree, sig[2])):
                return False
        bucket.append(sig)

        for start, akey, act in self._candidates(t, last_key, loc, occ, free, done, mixed):
            kind, qs, arg, dur = act
            fin = start + dur
            if fin > self.bound:
                continue
            if kind == 0:
                x, y = qs
                # a swap straight after the same swap only undoes it
                if self.last[x] == self.last[y] == ("s", x, y):
                    continue
                a, b = occ[x], occ[y]
                loc2 = list(loc); occ2 = list(occ); free2 = list(free)
                loc2[a], loc2[b] = y, x
                occ2[x], occ2[y] = b, a
                free2[x] = free2[y] = fin
                self.trail.append((start, dur, GateKind.SWAP, qs, (a, b), None))
                saved = self.last[x], self.last[y]
                self.last[x] = self.last[y] = ("s", x, y)
                if self._dfs(start, akey, loc2, occ2, free2, done, mixed, max(end, fin)):
                    return True
                self.last[x], self.last[y] = saved
            elif kind == 1:
                x, y = qs
                free2 = list(free)
                free2[x] = free2[y] = fin
                level = ctx.goals[arg][0]
                self.trail.append((start, dur, GateKind.PS, qs, (occ[x], occ[y]), level))
                saved = self.last[x], self.last[y]
                self.last[x] = self.last[y] = ("p",)
                if self._dfs(start, akey, loc, occ, free2, done | {arg}, mixed, max(end, fin)):
                    return True
                self.last[x], self.last[y] = saved
            else:
                (x,) = qs
                free2 = list(free)
                free2[x] = fin
                self.trail.append((start, dur, GateKind.MIX, qs, (occ[x],), arg))
                saved = self.last[x]
                self.last[x] = ("m",)
                if self._dfs(start, akey, loc, occ, free2, done, mixed | {(arg, occ[x])}, max(end, fin)):
                    return True
                self.last[x] = saved
            self.trail.pop()
        return False

    def _candidates(self, t, last_key, loc, occ, free, done, mixed):
        ctx = self.ctx
        out = []

        def add(key, start, act):
            if start > t or key > last_key:
                out.append((start, key, act))

        for x, y in self.swaps:
            a, b = occ[x], occ[y]
            if not (self._remaining(a, done, mixed) or self._remaining(b, done, mixed)):
                continue
            start = max(t, free[x], free[y])
            add((start, 0, x, y), start, (0, (x, y), None, ctx.swap_dur[(x, y)]))
        for (x, y), d in self.ps_at.items():
            a, b = occ[x], occ[y]
            pair = (a, b) if a < b else (b, a)
            for level in range(1, ctx.p + 1):
                gid = self.pair_goal.get((level, pair))
                if gid is None or gid in done:
                    continue
                if level > 1 and ((level - 1, a) not in mixed or (level - 1, b) not in mixed):
                    break
                start = max(t, free[x], free[y])
                add((start, 1, x, y), start, (1, (x, y), gid, d))
                break
        for s in ctx.used:
            for level in range(1, ctx.p):
                if (level, s) in mixed:
                    continue
                if all(g in done for g in ctx.goals_of.get((level, s), ())):
                    q = loc[s]
                    start = max(t, free[q])
                    add((start, 2, q, 0), start, (2, (q,), level, ctx.mix_dur[q]))
                break
        out.sort(key=lambda c: (c[0] + c[2][3], c[1]))
        return [(start, key, act) for start, key, act in out]

    def plan(self) -> TemporalPlan:
        names = self.ctx.names
        return TemporalPlan.of(
            ScheduledAction(t, d, kind, tuple(names[q] for q in qs), states, level)
            for t, d, kind, qs, states, level in self.trail)


def optimal_compile(problem, limits: SearchLimits | None = None,
                    incumbent: TemporalPlan | None = None) -> tuple[TemporalPlan, bool]:
    """Branch-and-bound with iterative deepening on the makespan.

    Returns ``(plan, proved_optimal)``. When the node budget runs out the best
    known plan (greedy unless ``incumbent`` is better) comes back unproved.
    """
    limits = limits or SearchLimits()
    ctx = Context(problem)
    greedy, _ = decode(ctx)
    best = greedy.to_plan()
    if incumbent is not None and incumbent.makespan < best.makespan:
        best = incumbent
    if not ctx.goals:
        return best, True
    n = len(ctx.placement)
    bound = lower_bound_state(ctx, 0, list(ctx.placement), [0] * n, set(), set())
    cap = best.makespan - 1
    if limits.max_makespan is not None:
        cap = min(cap, limits.max_makespan)
    search = _Search(ctx, limits)
    try:
        while bound <= cap:
            if search.run(bound):
                # the search may interleave harmless detours; drop them
                return compact(remove_superfluous(search.plan(), problem)), not search.truncated
            bound += 1
    except _BudgetExhausted:
        return best, False
    # every bound below the incumbent failed
    proved = not search.truncated and (limits.max_makespan is None or best.makespan <= limits.max_makespan + 1)
    return best, proved
