"""Wait-then-route vs route-in-parallel on the two-goal N8 example, plus the exact optimum."""

from qcc.hardware import GateKind, preset
from qcc.plan import ScheduledAction, TemporalPlan
from qcc.planner import optimal_compile
from qcc.problem import MaxCutInstance, build_problem
from qcc.report import gantt
from qcc.validator import validate

SW, PS = GateKind.SWAP, GateKind.PS


def gate(t, kind, a, b, dur):
    return ScheduledAction(t, dur, kind, (a, b), (), None if kind is SW else 1)


def main():
    hw = preset("N8")
    problem = build_problem(MaxCutInstance(8, frozenset({(0, 1), (1, 3)})), hw, 1)
    serial = TemporalPlan.of([
        gate(0, PS, "n1", "n2", 3),
        gate(3, SW, "n1", "n4", 2), gate(3, SW, "n2", "n3", 2), gate(5, SW, "n1", "n2", 2),
        gate(7, PS, "n2", "n3", 4),
    ])
    walk = ["n4", "n5", "n6", "n7", "n8", "n3"]
    parallel = TemporalPlan.of([gate(0, PS, "n1", "n2", 3)]
                               + [gate(2 * i, SW, walk[i], walk[i + 1], 2) for i in range(5)]
                               + [gate(10, PS, "n2", "n3", 4)])
    best, proved = optimal_compile(problem)
    for name, plan in [("serial", serial), ("parallel", parallel), ("optimal", best)]:
        report = validate(plan, problem)
        print(f"{name}: valid={report.valid} makespan={report.makespan}")
        print(gantt(plan, problem))
    print(f"optimum proved: {proved}")


if __name__ == "__main__":
    main()
