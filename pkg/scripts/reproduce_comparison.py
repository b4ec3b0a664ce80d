"""Full-scale method comparison: I=5000 particles, K=100 runs, I'=50 ideal samples.

    python3 scripts/reproduce_comparison.py --out results/full --jobs 8

Writes report.json, summary.csv, rmse_per_step.csv and per-method CDF files.
Use --runs / --particles to shrink the experiment.
"""

from __future__ import annotations

import argparse
import logging
import time

from eotrack.evaluation import REFERENCE_RESULTS, run_monte_carlo, summarize, write_report
from eotrack.scenario import Scenario
from eotrack.tracker import VARIANT_NAMES, parse_variant


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--scenario", help="scenario JSON (default: built-in)")
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--particles", type=int, default=5000)
    ap.add_argument("--ideal-samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/full")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    scenario = Scenario.load(args.scenario) if args.scenario else Scenario()
    variants = [parse_variant(k, args.ideal_samples) for k in VARIANT_NAMES]
    t0 = time.time()
    batches = run_monte_carlo(
        scenario, variants, args.runs, args.particles, args.seed, args.jobs,
        on_run=lambda r: logging.info("run %d done", r[0]),
    )
    report = summarize(batches.values(), scenario)
    write_report(report, args.out)
    scenario.save(f"{args.out}/scenario.json")

    print(f"{'method':>14}  {'avg RMSE (m)':>12}  {'s/step':>8}  {'reference':>16}")
    for label, v in report["variants"].items():
        ref = REFERENCE_RESULTS.get(label)
        ref_text = f"{ref[0]:.2f} m / {ref[1]:.2f} s" if ref else "-"
        print(f"{label:>14}  {v['avg_rmse_m']:12.3f}  {v['mean_step_seconds']:8.4f}  {ref_text:>16}")
    print(f"total wall time {time.time() - t0:.0f} s")


if __name__ == "__main__":
    main()
