"""Benchmark grid: every size and utilization class, greedy vs anytime, with IPC scores.

    python scripts/run_bench.py --sizes 8 21 --seeds 10 --budget 200 --out results/
"""

import argparse
import json
from pathlib import Path

from qcc.report import BenchConfig, bench, config_to_dict, rows_to_csv
from qcc.validator import ipc_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 21, 40])
    ap.add_argument("--p", type=int, nargs="+", default=[1])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--budget", default="200")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scored = []
    for planner in ("greedy", "anytime"):
        cfg = BenchConfig(tuple(args.sizes), (0.9, 1.0), tuple(args.p), tuple(range(args.seeds)),
                          args.budget, planner, workers=args.workers)
        rows = bench(cfg)
        (out / f"{planner}.csv").write_text(rows_to_csv(rows))
        (out / f"{planner}.config.json").write_text(json.dumps(config_to_dict(cfg), indent=1))
        bad = [r for r in rows if not r["valid"]]
        print(f"{planner}: {len(rows)} runs, {len(bad)} invalid")
        for r in rows:
            cls = f"N{r['size']}-u{r['u']}-p{r['p']}"
            scored.append(dict(cls=cls, instance=r["seed"], planner=planner,
                               makespan=r["makespan"] if r["valid"] else None))

    table = ipc_table(scored)
    print(f"{'class':<16} {'greedy':>8} {'anytime':>8}")
    for cls in sorted(table):
        print(f"{cls:<16} {table[cls].get('greedy', 0):8.3f} {table[cls].get('anytime', 0):8.3f}")
    (out / "ipc.json").write_text(json.dumps(table, indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
