"""Index-level problem context and the list-scheduling decoder.

Qubits and qstates are plain ints here; plans are converted back to qubit
names only at the boundary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from ..hardware import GateKind
from ..plan import ScheduledAction, TemporalPlan
from ..problem import CompilationProblem


class Context:
    """Precomputed tables for one compilation problem."""

    def __init__(self, problem: CompilationProblem):
        self.problem = problem
        hw = problem.hardware
        self.names = hw.qubits
        self.n = len(self.names)
        idx = hw.index
        self.p = problem.p
        self.swap_adj = [tuple(idx[r] for r in hw._adjacency[GateKind.SWAP][q]) for q in self.names]
        self.swap_dur: dict[tuple[int, int], int] = {}
        self.ps_dur: dict[tuple[int, int], int] = {}
        for e in hw.edges:
            key = (idx[e.a], idx[e.b])
            (self.swap_dur if e.kind is GateKind.SWAP else self.ps_dur)[key] = e.duration
        self.ps_edges = sorted((a, b, d) for (a, b), d in self.ps_dur.items())
        self.ps_oriented = self.ps_edges + [(b, a, d) for a, b, d in self.ps_edges]
        self.mix_dur = [hw.mix_duration[q] for q in self.names]
        self.dist = [[hw.swap_distances[a][b] for b in self.names] for a in self.names]
        self.placement = [idx[q] for q in problem.placement]
        self.t_swap = hw.min_swap_duration
        self.t_ps = hw.min_ps_duration
        self.t_mix = hw.min_mix_duration
        # goals indexed level-major, matching problem.goals
        self.goals = [(g.level, g.pair) for g in problem.goals]
        self.goal_id = {g: i for i, g in enumerate(self.goals)}
        self.used = sorted(problem.used)
        self.goals_of: dict[tuple[int, int], list[int]] = {}
        for gid, (level, (a, b)) in enumerate(self.goals):
            self.goals_of.setdefault((level, a), []).append(gid)
            self.goals_of.setdefault((level, b), []).append(gid)
        self._avoid: dict[tuple[int, int], list[int]] = {}

    def sdur(self, x: int, y: int) -> int:
        return self.swap_dur[(x, y) if x < y else (y, x)]

    def pdur(self, x: int, y: int) -> int | None:
        return self.ps_dur.get((x, y) if x < y else (y, x))

    def dist_avoiding(self, dst: int, blocked: int) -> list[int]:
        """Hop distances to ``dst`` in the SWAP graph with ``blocked`` removed."""
        key = (dst, blocked)
        if key not in self._avoid:
            inf = 1 << 30
            dist = [inf] * self.n
            if dst != blocked:
                dist[dst] = 0
                queue = deque([dst])
                while queue:
                    u = queue.popleft()
                    for v in self.swap_adj[u]:
                        if v != blocked and dist[v] == inf:
                            dist[v] = dist[u] + 1
                            queue.append(v)
            self._avoid[key] = dist
        return self._avoid[key]

    def path(self, src: int, dst: int, blocked: int = -1, rng=None) -> list[int] | None:
        """Shortest SWAP path; lexicographic unless ``rng`` picks among ties."""
        dist = self.dist_avoiding(dst, blocked) if blocked >= 0 else self.dist[dst]
        if src == blocked or dist[src] >= 1 << 30:
            return None
        path = [src]
        while path[-1] != dst:
            here = path[-1]
            steps = [v for v in self.swap_adj[here] if v != blocked and dist[v] == dist[here] - 1]
            path.append(steps[0] if rng is None or len(steps) == 1 else steps[rng.below(len(steps))])
        return path

    @cached_property
    def goal_count(self) -> int:
        return len(self.goals)


@dataclass
class Route:
    finish: int
    swaps: int
    target: tuple[int, int]
    moves: list[tuple[int, int]]


class Schedule:
    """Append-only list schedule: every qubit has a time after which it is free."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.loc = list(ctx.placement)
        self.occ = [0] * ctx.n
        for s, q in enumerate(self.loc):
            self.occ[q] = s
        self.free = [0] * ctx.n
        self.actions: list[tuple] = []
        self.done: set[int] = set()
        self.mixed: set[tuple[int, int]] = set()
        self.left = {key: len(v) for key, v in ctx.goals_of.items()}

    # raw appends --------------------------------------------------------------
    def swap(self, x: int, y: int):
        d = self.ctx.sdur(x, y)
        t = max(self.free[x], self.free[y])
        a, b = self.occ[x], self.occ[y]
        if x > y:
            x, y, a, b = y, x, b, a
        self.actions.append((t, d, GateKind.SWAP, (x, y), (a, b), None))
        self.occ[x], self.occ[y] = b, a
        self.loc[a], self.loc[b] = y, x
        self.free[x] = self.free[y] = t + d

    def ps(self, x: int, y: int, gid: int):
        level, _ = self.ctx.goals[gid]
        d = self.ctx.pdur(x, y)
        t = max(self.free[x], self.free[y])
        if x > y:
            x, y = y, x
        a, b = self.occ[x], self.occ[y]
        self.actions.append((t, d, GateKind.PS, (x, y), (a, b), level))
        self.free[x] = self.free[y] = t + d
        self.done.add(gid)
        for s in (a, b):
            self.left[(level, s)] -= 1
            if self.left[(level, s)] == 0 and level < self.ctx.p:
                self.mix(s, level)

    def mix(self, s: int, level: int):
        q = self.loc[s]
        d = self.ctx.mix_dur[q]
        t = self.free[q]
        self.actions.append((t, d, GateKind.MIX, (q,), (s,), level))
        self.free[q] = t + d
        self.mixed.add((level, s))

    def enabled(self, gid: int) -> bool:
        level, (a, b) = self.ctx.goals[gid]
        return level == 1 or ((level - 1, a) in self.mixed and (level - 1, b) in self.mixed)

    # routing ------------------------------------------------------------------
    def simulate(self, a: int, b: int, x: int, y: int, rng=None) -> Route | None:
        """Move ``a`` to ``x`` then ``b`` to ``y`` (avoiding ``x``) and time the PS."""
        ctx = self.ctx
        free: dict[int, int] = {}
        occ: dict[int, int] = {}
        F = lambda i: free.get(i, self.free[i])  # noqa: E731
        O = lambda i: occ.get(i, self.occ[i])  # noqa: E731
        moves = []
        path_a = ctx.path(self.loc[a], x, rng=rng)
        for u, v in zip(path_a, path_a[1:]):
            t = max(F(u), F(v)) + ctx.sdur(u, v)
            free[u] = free[v] = t
            occ[u], occ[v] = O(v), O(u)
            moves.append((u, v))
        lb = next((q for q in (self.loc[b],) if O(q) == b), None)
        if lb is None:
            # a walked through b and pushed it back one step
            lb = next(q for q in path_a if O(q) == b)
        path_b = ctx.path(lb, y, blocked=x, rng=rng)
        if path_b is None:
            return None
        for u, v in zip(path_b, path_b[1:]):
            t = max(F(u), F(v)) + ctx.sdur(u, v)
            free[u] = free[v] = t
            occ[u], occ[v] = O(v), O(u)
            moves.append((u, v))
        finish = max(F(x), F(y)) + ctx.pdur(x, y)
        return Route(finish, len(moves), (x, y), moves)

    def routes(self, gid: int, slack: int = 0, rng=None) -> list[Route]:
        """Candidate routes for a goal, best first (finish, swaps, target)."""
        ctx = self.ctx
        _, (a, b) = ctx.goals[gid]
        la, lb = self.loc[a], self.loc[b]
        est = [(ctx.dist[la][x] + ctx.dist[lb][y], x, y) for x, y, _ in ctx.ps_oriented]
        need = min(e[0] for e in est)
        out = []
        for swaps, x, y in est:
            if swaps <= need + slack:
                # either endpoint may walk first; the second avoids the first's target
                for first, second, tx, ty in ((a, b, x, y), (b, a, y, x)):
                    r = self.simulate(first, second, tx, ty, rng=rng)
                    if r is not None:
                        out.append(r)
        out.sort(key=lambda r: (r.finish, r.swaps, ctx.names[r.target[0]], ctx.names[r.target[1]]))
        return out

    def execute(self, gid: int, route: Route):
        for u, v in route.moves:
            self.swap(u, v)
        x, y = route.target
        self.ps(x, y, gid)

    def hops(self, gid: int) -> int:
        _, (a, b) = self.ctx.goals[gid]
        return self.ctx.dist[self.loc[a]][self.loc[b]]

    def to_plan(self) -> TemporalPlan:
        names = self.ctx.names
        return TemporalPlan.of(
            ScheduledAction(t, d, kind, tuple(names[q] for q in qs), states, level)
            for t, d, kind, qs, states, level in self.actions)

    @property
    def makespan(self) -> int:
        return max((t + d for t, d, *_ in self.actions), default=0)


def decode(ctx: Context, order: list[int] | None = None, ranks: dict[int, int] | None = None,
           rng=None, noise: float = 0.0, slack: int = 0,
           detours: dict[int, int] | None = None) -> tuple[Schedule, list[int]]:
    """Build a schedule goal by goal.

    With ``order`` the first enabled goal in that order is routed next;
    otherwise the goal of the lowest pending level with the fewest hops wins,
    ties going to the earliest finishing route and then the smaller pair.
    ``ranks`` picks a worse-than-best route for chosen goals and ``detours``
    widens their swap slack so longer paths compete. ``noise`` (with
    ``rng``) randomly perturbs the dynamic choice. Returns the schedule and
    the order in which goals were actually routed.
    """
    sched = Schedule(ctx)
    ranks = ranks or {}
    pending = set(range(len(ctx.goals)))
    sequence = []
    while pending:
        level = min(ctx.goals[g][0] for g in pending)
        if order is not None:
            gid = next(g for g in order if g in pending and sched.enabled(g))
            routes = sched.routes(gid, slack + (detours or {}).get(gid, 0), rng)
        else:
            current = [g for g in pending if ctx.goals[g][0] == level and sched.enabled(g)]
            if rng is not None and noise > 0 and rng.random() < noise:
                gid = current[rng.below(len(current))] if len(current) > 1 else current[0]
                routes = sched.routes(gid, slack, rng)
            else:
                hop = {g: sched.hops(g) for g in current}
                best_hop = min(hop.values())
                tied = sorted(g for g in current if hop[g] == best_hop)
                gid, routes = None, None
                best_key = None
                for g in tied:
                    rs = sched.routes(g, slack, rng)
                    key = (rs[0].finish, ctx.goals[g][1])
                    if best_key is None or key < best_key:
                        best_key, gid, routes = key, g, rs
        route = routes[min(ranks.get(gid, 0), len(routes) - 1)]
        sched.execute(gid, route)
        pending.discard(gid)
        sequence.append(gid)
    return sched, sequence


def lower_bound_state(ctx: Context, t: int, pos: list[int], ready: list[int], done, mixed,
                      running_end: int = 0) -> int:
    """Admissible makespan bound for the remaining work.

    ``pos``/``ready`` give each qstate's qubit and the time it becomes free.
    Each qstate performs its remaining PS and mix gates one after another; a
    goal additionally needs both qstates walked onto some PS edge.
    """
    lb = max(t, running_end)
    work: dict[int, dict[int, int]] = {}
    for gid, (level, (a, b)) in enumerate(ctx.goals):
        if gid in done:
            continue
        for s in (a, b):
            w = work.setdefault(s, {})
            w[level] = w.get(level, 0) + ctx.t_ps
    for level in range(1, ctx.p):
        for s in ctx.used:
            if (level, s) not in mixed:
                w = work.setdefault(s, {})
                w[level] = w.get(level, 0) + ctx.t_mix
    for s, w in work.items():
        lb = max(lb, ready[s] + sum(w.values()))
    for gid, (level, (a, b)) in enumerate(ctx.goals):
        if gid in done:
            continue
        ra = ready[a] + sum(v for lv, v in work[a].items() if lv < level)
        rb = ready[b] + sum(v for lv, v in work[b].items() if lv < level)
        pa, pb = pos[a], pos[b]
        da, db = ctx.dist[pa], ctx.dist[pb]
        best = min(max(ra + da[x] * ctx.t_swap, rb + db[y] * ctx.t_swap) + d
                   for x, y, d in ctx.ps_oriented)
        lb = max(lb, best)
    return lb


def lower_bound(problem: CompilationProblem) -> int:
    """Admissible bound on the optimal makespan from the initial placement."""
    ctx = Context(problem)
    if not ctx.goals:
        return 0
    return lower_bound_state(ctx, 0, list(ctx.placement), [0] * ctx.n, set(), set())


def greedy_compile(problem: CompilationProblem, seed: int = 0) -> TemporalPlan:
    """Deterministic closest-goal-first routing with list scheduling.

    ``seed`` is accepted for interface symmetry; the greedy rule itself is
    deterministic.
    """
    sched, _ = decode(Context(problem))
    return sched.to_plan()
