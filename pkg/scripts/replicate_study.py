"""Direct two-level search vs mirroring the best one-level plan on random N8 problems."""

import argparse

from qcc.hardware import preset
from qcc.planner import anytime_compile, replicate_reverse
from qcc.problem import build_problem, generate_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--budget", type=int, default=200, help="one-level iterations; two-level gets twice")
    args = ap.parse_args()

    hw = preset("N8")
    wins = ties = 0
    print("seed  u    M1  mirrored  direct")
    for seed in range(args.instances):
        u = (0.9, 1.0)[seed % 2]
        prob = build_problem(generate_instance(8, u, seed), hw, 2, "random", seed)
        p1 = anytime_compile(prob.with_p(1), seed, args.budget).plan
        mirrored = replicate_reverse(p1, prob).makespan
        direct = anytime_compile(prob, seed, 2 * args.budget).makespan
        wins += direct < mirrored
        ties += direct == mirrored
        print(f"{seed:4d}  {u:.1f}  {p1.makespan:3d}  {mirrored:8d}  {direct:6d}")
    print(f"direct better on {wins}, equal on {ties}, of {args.instances}")


if __name__ == "__main__":
    main()
