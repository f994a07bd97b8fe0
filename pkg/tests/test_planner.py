import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bfs_hops, brute_force_makespan
from qcc.hardware import GateKind, preset
from qcc.plan import TemporalPlan
from qcc.planner import (Budget, SearchLimits, anytime_compile, compact, greedy_compile, lower_bound,
                         optimal_compile, replicate_reverse)
from qcc.problem import MaxCutInstance, SeededRNG, build_problem, generate_instance, random_instance
from qcc.validator import InvalidPlanError, validate


def small(seed, goals, p=1):
    hw = preset("N8")
    return build_problem(random_instance(8, goals, seed), hw, p, "random", seed)


def test_greedy_single_goal(single_goal):
    plan = greedy_compile(single_goal)
    assert validate(plan, single_goal).valid
    assert plan.makespan <= 8


def test_greedy_adjacent_goal(n8):
    prob = build_problem(MaxCutInstance(8, frozenset({(0, 1)})), n8, 1)
    plan = greedy_compile(prob)
    assert plan.makespan == 3 and len(plan) == 1


def test_greedy_empty(n8):
    prob = build_problem(MaxCutInstance(8, frozenset()), n8, 2)
    assert greedy_compile(prob).makespan == 0


def test_greedy_routes_closest_pair_first(n8):
    # q1-q2 are adjacent, q1-q7 are far; the adjacent goal is served first
    prob = build_problem(MaxCutInstance(8, frozenset({(0, 1), (0, 6)})), n8, 1)
    first = min((a for a in greedy_compile(prob) if a.kind is GateKind.PS), key=lambda a: a.start)
    assert first.qubits == ("n1", "n2") and first.start == 0


def test_greedy_mixes_as_soon_as_level_done(n8):
    prob = build_problem(MaxCutInstance(8, frozenset({(0, 1)})), n8, 2)
    plan = greedy_compile(prob)
    assert validate(plan, prob).valid
    mixes = [a for a in plan if a.kind is GateKind.MIX]
    assert len(mixes) == 2 and all(a.start == 3 for a in mixes)
    assert plan.makespan == 7


@pytest.mark.parametrize("size", [21, 40])
def test_greedy_scales(size):
    hw = preset(f"N{size}")
    prob = build_problem(generate_instance(size, 1.0, 7), hw, 2, "random", 7)
    assert validate(greedy_compile(prob), prob).valid


def test_budget_parse():
    assert Budget.parse("500") == Budget(iterations=500)
    assert Budget.parse("40it") == Budget(iterations=40)
    assert Budget.parse("5s") == Budget(seconds=5.0)
    assert Budget.parse("0.5") == Budget(seconds=0.5)
    with pytest.raises(ValueError):
        Budget()


def test_anytime_zero_budget_is_greedy(fig2):
    res = anytime_compile(fig2, 3, 0)
    assert res.plan == greedy_compile(fig2)
    assert res.history == [(0.0, res.makespan)]


def test_anytime_matches_optimal_on_fig2(fig2):
    opt, proved = optimal_compile(fig2)
    assert proved and opt.makespan == 12
    assert anytime_compile(fig2, 0, 3000).makespan == opt.makespan


def test_anytime_history_non_increasing(fig2):
    res = anytime_compile(fig2, 1, 300, stop_at_bound=False)
    spans = [m for _, m in res.history]
    assert spans == sorted(spans, reverse=True)
    assert spans[-1] == res.makespan
    assert validate(res.plan, fig2).valid


@given(st.integers(0, 10_000), st.integers(0, 60), st.integers(0, 60))
@settings(max_examples=20)
def test_anytime_monotone_in_budget(seed, b1, b2):
    prob = small(seed, 4)
    lo, hi = sorted((b1, b2))
    assert anytime_compile(prob, seed, hi).makespan <= anytime_compile(prob, seed, lo).makespan


@given(st.integers(0, 10_000), st.sampled_from([1, 2]))
@settings(max_examples=20)
def test_deterministic(seed, p):
    prob = small(seed, 5, p)
    assert anytime_compile(prob, seed, 40).plan == anytime_compile(prob, seed, 40).plan
    assert greedy_compile(prob) == greedy_compile(prob)


def test_optimal_single_goal(single_goal):
    plan, proved = optimal_compile(single_goal)
    assert proved and validate(plan, single_goal).valid
    assert plan.makespan == brute_force_makespan(single_goal) <= 8


def test_optimal_adjacent(n8):
    prob = build_problem(MaxCutInstance(8, frozenset({(0, 1)})), n8, 1)
    plan, proved = optimal_compile(prob)
    assert proved and plan.makespan == 3


def test_optimal_budget_exhausted(fig2):
    plan, proved = optimal_compile(fig2.with_p(2), SearchLimits(node_budget=50))
    assert not proved and validate(plan, fig2.with_p(2)).valid


def test_lower_bound_admissible(fig2):
    assert lower_bound(fig2) <= optimal_compile(fig2)[0].makespan


@pytest.mark.parametrize("seed", range(12))
def test_optimal_matches_brute_force(seed):
    goals = 1 + SeededRNG(seed).below(2)
    prob = small(seed, goals)
    plan, proved = optimal_compile(prob)
    assert proved and validate(plan, prob).valid
    assert plan.makespan == brute_force_makespan(prob, 14)
    assert lower_bound(prob) <= plan.makespan


@pytest.mark.parametrize("seed", range(4))
def test_optimal_matches_brute_force_two_levels(seed):
    prob = small(seed, 1, p=2)
    plan, proved = optimal_compile(prob)
    assert proved and plan.makespan == brute_force_makespan(prob, 14)


def test_replicate_reverse_formula(n8):
    prob2 = build_problem(generate_instance(8, 0.9, 0), n8, 2, "random", 0)
    p1 = anytime_compile(prob2.with_p(1), 0, 100).plan
    out = replicate_reverse(p1, prob2)
    assert validate(out, prob2).valid
    assert out.makespan == 2 * p1.makespan + 1
    mixes = [a for a in out if a.kind is GateKind.MIX]
    assert len(mixes) == len(prob2.used) and {a.start for a in mixes} == {p1.makespan}


def test_replicate_reverse_empty(n8):
    prob = build_problem(MaxCutInstance(8, frozenset()), n8, 2)
    assert replicate_reverse(TemporalPlan(), prob).makespan == 0


def test_replicate_reverse_rejects_invalid(n8, single_goal):
    with pytest.raises(InvalidPlanError):
        replicate_reverse(TemporalPlan(), single_goal.with_p(2))
    with pytest.raises(ValueError):
        replicate_reverse(TemporalPlan(), single_goal)


@given(st.integers(0, 10_000), st.sampled_from([0.9, 1.0]))
@settings(max_examples=25)
def test_replicate_reverse_property(seed, u):
    prob2 = build_problem(generate_instance(8, u, seed), preset("N8"), 2, "random", seed)
    p1 = greedy_compile(prob2.with_p(1))
    out = replicate_reverse(p1, prob2)
    report = validate(out, prob2)
    assert report.valid and len(report.achieved[2]) == len(prob2.instance.edges)
    assert out.makespan == 2 * p1.makespan + 1


def test_compact_shifts_left(single_goal):
    loose = TemporalPlan.of(a.shifted(3) for a in greedy_compile(single_goal))
    tight = compact(loose)
    assert tight.makespan == greedy_compile(single_goal).makespan
    assert validate(tight, single_goal).valid


@given(st.integers(0, 10_000), st.sampled_from([1, 2]), st.sampled_from(["greedy", "anytime"]))
@settings(max_examples=30)
def test_soundness_and_mutex(seed, p, which):
    prob = build_problem(generate_instance(8, 0.9, seed), preset("N8"), p, "random", seed)
    plan = greedy_compile(prob) if which == "greedy" else anytime_compile(prob, seed, 15).plan
    assert validate(plan, prob).valid
    acts = list(plan)
    for i, a in enumerate(acts):
        for b in acts[i + 1:]:
            if set(a.qubits) & set(b.qubits):
                assert a.end <= b.start or b.end <= a.start


def test_path_ties_use_hop_metric(n8):
    # sanity link between the planner's routing table and the test BFS
    prob = small(3, 2)
    from qcc.planner._core import Context
    ctx = Context(prob)
    for i, a in enumerate(ctx.names):
        for j, b in enumerate(ctx.names):
            assert ctx.dist[i][j] == bfs_hops(n8, a, b)
