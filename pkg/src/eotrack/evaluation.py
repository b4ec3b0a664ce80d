"""Monte-Carlo orchestration and accuracy/timing metrics."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .scenario import Scenario
from .seeding import derive_seed
from .synthesis import GroundTruth, simulate
from .tracker import MethodVariant, TrackOutput, VARIANT_NAMES, parse_variant, run_filter

log = logging.getLogger(__name__)

# Published full-scale results (I=5000 particles, 100 runs): (avg RMSE m, seconds per step).
REFERENCE_RESULTS = {"AP-EOPDA(geo)": (0.18, 0.33), "AP-EOPDA(idl)": (0.16, 0.67)}

_ORDER = [parse_variant(k).label for k in VARIANT_NAMES]


@dataclass
class RunBatch:
    variant: str
    outputs: list[TrackOutput] = field(default_factory=list)
    truths: list[GroundTruth] = field(default_factory=list)

    def __post_init__(self):
        if len(self.outputs) != len(self.truths):
            raise ValueError("need one ground truth per track output")
        lengths = {o.n_steps for o in self.outputs} | {t.n_steps for t in self.truths}
        if len(lengths) > 1:
            raise ValueError(f"runs disagree on the number of steps: {sorted(lengths)}")

    def add(self, output: TrackOutput, truth: GroundTruth) -> None:
        if self.outputs and output.n_steps != self.outputs[0].n_steps:
            raise ValueError("runs disagree on the number of steps")
        self.outputs.append(output)
        self.truths.append(truth)

    def __len__(self) -> int:
        return len(self.outputs)

    def errors(self) -> np.ndarray:
        """Device position errors, shape (K, N)."""
        if not self.outputs:
            raise ValueError(f"batch {self.variant!r} is empty")
        return np.stack([position_error(o.device, t.device) for o, t in zip(self.outputs, self.truths)])


def position_error(estimate, truth) -> np.ndarray:
    diff = np.asarray(estimate, dtype=float) - np.asarray(truth, dtype=float)
    return np.linalg.norm(diff, axis=-1)


def rmse_per_step(batch: RunBatch) -> np.ndarray:
    return np.sqrt(np.mean(batch.errors() ** 2, axis=0))


def error_cdf(batch: RunBatch) -> np.ndarray:
    """Empirical CDF over all (run, step) errors as rows of (error, cumulative fraction)."""
    e = np.sort(batch.errors().ravel())
    return np.column_stack([e, np.arange(1, len(e) + 1) / len(e)])


def olos_windows(scenario: Scenario) -> list[dict]:
    return [
        {"start": w.start, "stop": w.stop, "blocked_anchors": list(w.anchors), "n_blocked": len(w.anchors)}
        for w in scenario.blockage
    ]


def _sort_key(label: str):
    return (_ORDER.index(label), label) if label in _ORDER else (len(_ORDER), label)


def summarize(batches, scenario: Scenario | None = None) -> dict:
    """Machine-readable comparison report.

    ``avg_rmse_m`` is the mean over steps of the per-step RMSE (RMSE across runs
    first, then averaged along the track).
    """
    windows = olos_windows(scenario) if scenario is not None else []
    variants = {}
    for batch in sorted(batches, key=lambda b: _sort_key(b.variant)):
        rmse = rmse_per_step(batch)
        cdf = error_cdf(batch)
        errs = cdf[:, 0]
        variants[batch.variant] = {
            "runs": len(batch),
            "avg_rmse_m": float(rmse.mean()),
            "mean_step_seconds": float(np.mean([o.step_seconds.mean() for o in batch.outputs])),
            "error_percentiles_m": {str(q): float(np.percentile(errs, q)) for q in (50, 90, 95)},
            "degenerate_steps": int(sum(len(o.degenerate_steps) for o in batch.outputs)),
            "rmse_per_step": rmse.tolist(),
            "cdf": cdf.tolist(),
            "olos_windows": windows,
        }
    return {
        "variants": variants,
        "reference_results": {k: {"avg_rmse_m": v[0], "step_seconds": v[1]} for k, v in REFERENCE_RESULTS.items()},
    }


def write_report(report: dict, out_dir) -> list[Path]:
    """Write report.json plus plot-ready CSVs; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / "report.json"]
    written[0].write_text(json.dumps(report, indent=1) + "\n")

    labels = list(report["variants"])
    if labels:
        path = out_dir / "rmse_per_step.csv"
        columns = [report["variants"][k]["rmse_per_step"] for k in labels]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", *labels])
            for n, row in enumerate(zip(*columns), start=1):
                writer.writerow([n, *row])
        written.append(path)

    path = out_dir / "summary.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["variant", "runs", "avg_rmse_m", "mean_step_seconds", "p50_m", "p90_m", "p95_m"])
        for k in labels:
            v = report["variants"][k]
            pct = v["error_percentiles_m"]
            writer.writerow([k, v["runs"], v["avg_rmse_m"], v["mean_step_seconds"], pct["50"], pct["90"], pct["95"]])
    written.append(path)

    for k in labels:
        path = out_dir / f"cdf_{slug(k)}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["error_m", "fraction"])
            writer.writerows(report["variants"][k]["cdf"])
        written.append(path)
    return written


def slug(label: str) -> str:
    return label.lower().replace("(", "-").replace(")", "").replace("_", "-")


# -- Monte-Carlo orchestration -------------------------------------------------


def dataset_seed(seed: int, run: int) -> int:
    return int(derive_seed(seed, "dataset", run).generate_state(1)[0])


def track_seed(seed: int, run: int, variant: MethodVariant) -> np.random.SeedSequence:
    return derive_seed(seed, f"track:{variant.kind}", run)


def run_single(scenario: Scenario, variants, n_particles: int, seed: int, run: int):
    """Simulate run ``run`` and track it with every variant."""
    truth, frames = simulate(scenario, dataset_seed(seed, run))
    outputs = {v.label: run_filter(frames, scenario, v, n_particles, track_seed(seed, run, v)) for v in variants}
    return run, truth, outputs


def _run_single_star(args):
    return run_single(*args)


class _Inline:
    """Sequential stand-in for an executor."""

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def map(self, fn, items):
        return map(fn, items)


def run_monte_carlo(
    scenario: Scenario,
    variants,
    n_runs: int,
    n_particles: int,
    seed: int,
    jobs: int = 1,
    on_run=None,
) -> dict[str, RunBatch]:
    """Independent runs for all variants; results do not depend on ``jobs``."""
    if n_runs < 1 or n_particles < 1:
        raise ValueError("n_runs and n_particles must be >= 1")
    variants = list(variants)
    tasks = [(scenario, variants, n_particles, seed, k) for k in range(n_runs)]
    results = []
    with ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else _Inline() as pool:
        for result in pool.map(_run_single_star, tasks):
            results.append(result)
            if on_run is not None:
                on_run(result)
    batches = {v.label: RunBatch(v.label) for v in variants}
    for _run, truth, outputs in sorted(results, key=lambda r: r[0]):
        for label, out in outputs.items():
            batches[label].add(out, truth)
    return batches
