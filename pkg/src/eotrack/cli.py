"""Command-line entry point: ``eotrack simulate | track | compare``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .evaluation import dataset_seed, run_monte_carlo, slug, summarize, track_seed, write_report
from .scenario import Scenario, schema_help
from .synthesis import (
    check_dataset,
    read_dataset,
    read_truth,
    simulate,
    write_dataset,
    write_truth,
)
from .tracker import VARIANT_NAMES, parse_variant, run_filter

log = logging.getLogger("eotrack")

SEED_DERIVATION = (
    "randomness derivation: every stream is SeedSequence([seed, crc32(tag), index...]); "
    "datasets use tag 'dataset' with the run index, frames 'frame' with the step index, "
    "trackers 'track:<variant>' with the run index."
)


def _load_scenario(path) -> Scenario:
    return Scenario.load(path) if path else Scenario()


def _variants(text: str, ideal_samples: int | None, scenario: Scenario):
    samples = ideal_samples if ideal_samples is not None else scenario.ideal_samples
    return [parse_variant(name, samples) for name in text.split(",") if name.strip()]


def _run_dirs(root: Path) -> list[Path]:
    if (root / "dataset.csv").exists():
        return [root]
    dirs = sorted(p for p in root.glob("run_*") if (p / "dataset.csv").exists())
    if not dirs:
        raise FileNotFoundError(f"no dataset.csv under {root}")
    return dirs


def _require(paths) -> None:
    missing = [str(p) for p in paths if not Path(p).is_file() or Path(p).stat().st_size == 0]
    if missing:
        raise RuntimeError(f"expected output files missing or empty: {missing}")


def cmd_simulate(args) -> list[Path]:
    scenario = _load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "scenario.json"]
    scenario.save(written[0])
    for k in range(args.runs):
        run_dir = out / f"run_{k:03d}"
        run_dir.mkdir(exist_ok=True)
        truth, frames = simulate(scenario, dataset_seed(args.seed, k))
        write_dataset(frames, run_dir / "dataset.csv")
        write_truth(truth, run_dir / "truth.csv")
        written += [run_dir / "dataset.csv", run_dir / "truth.csv"]
        log.info("simulated run %d -> %s", k, run_dir)
    return written


def cmd_track(args) -> list[Path]:
    data = Path(args.data)
    scenario_path = args.scenario or (data / "scenario.json" if (data / "scenario.json").exists() else None)
    scenario = _load_scenario(scenario_path)
    variants = _variants(args.variants, args.ideal_samples, scenario)
    out_root = Path(args.out) if args.out else data
    written = []
    for run_dir in _run_dirs(data):
        frames = read_dataset(run_dir / "dataset.csv", scenario.n_steps)
        check_dataset(frames, scenario)
        run = int(run_dir.name.split("_")[-1]) if run_dir.name.startswith("run_") else 0
        target = out_root / run_dir.relative_to(data)
        target.mkdir(parents=True, exist_ok=True)
        for v in variants:
            out = run_filter(frames, scenario, v, args.particles, track_seed(args.seed, run, v))
            path = target / f"track_{slug(v.label)}.csv"
            out.write_csv(path)
            written.append(path)
            log.info("%s run %d: %.4f s/step -> %s", v.label, run, out.step_seconds.mean(), path)
    return written


def cmd_compare(args) -> list[Path]:
    scenario = _load_scenario(args.scenario)
    variants = _variants(args.variants, args.ideal_samples, scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scenario.save(out / "scenario.json")

    def progress(result):
        run, _truth, outputs = result
        log.info("run %d done: %s", run, ", ".join(f"{k} {o.step_seconds.mean():.4f}s/step" for k, o in outputs.items()))

    batches = run_monte_carlo(scenario, variants, args.runs, args.particles, args.seed, args.jobs, on_run=progress)
    written = [out / "scenario.json"]
    if args.save_tracks:
        for label, batch in batches.items():
            for k, (o, t) in enumerate(zip(batch.outputs, batch.truths)):
                run_dir = out / f"run_{k:03d}"
                run_dir.mkdir(exist_ok=True)
                o.write_csv(run_dir / f"track_{slug(label)}.csv")
                write_truth(t, run_dir / "truth.csv")
                written += [run_dir / f"track_{slug(label)}.csv", run_dir / "truth.csv"]
    report = summarize(batches.values(), scenario)
    written += write_report(report, out)
    for label, v in report["variants"].items():
        print(f"{label:>14}  avg RMSE {v['avg_rmse_m']:.3f} m  {v['mean_step_seconds']:.4f} s/step")
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eotrack",
        description="Simulate multistatic active/passive radio measurements of an extended object and track it.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=schema_help() + "\n\n" + SEED_DERIVATION,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, runs: bool = True):
        p.add_argument("--scenario", help="scenario JSON (default: built-in reproduction scenario)")
        p.add_argument("--seed", type=int, default=0, help="top-level seed (default 0)")
        p.add_argument("--out", help="output directory")
        if runs:
            p.add_argument("--runs", type=_positive, default=1, help="number of Monte-Carlo runs K")

    def tracking(p):
        p.add_argument("--particles", type=_positive, default=1000, help="particles I (default 1000)")
        p.add_argument(
            "--variants",
            default=",".join(VARIANT_NAMES),
            help=f"comma-separated subset of {','.join(VARIANT_NAMES)}",
        )
        p.add_argument("--ideal-samples", type=_positive, default=None, help="override I' for the ideal variant")

    p = sub.add_parser("simulate", help="write synthetic datasets and ground truth")
    common(p)
    p.set_defaults(func=cmd_simulate, out_default="sim")

    p = sub.add_parser("track", help="run trackers on datasets written by 'simulate'")
    common(p, runs=False)
    tracking(p)
    p.add_argument("--data", required=True, help="directory written by 'simulate' (or one run_XXX directory)")
    p.set_defaults(func=cmd_track, out_default=None)

    p = sub.add_parser("compare", help="simulate, track with every variant, and summarize")
    common(p)
    tracking(p)
    p.add_argument("--jobs", type=_positive, default=1, help="parallel worker processes")
    p.add_argument("--save-tracks", action="store_true", help="also write per-run track CSVs")
    p.set_defaults(func=cmd_compare, out_default="compare")
    return parser


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    if args.out is None:
        args.out = args.out_default
    try:
        _require(args.func(args))
    except Exception as err:  # noqa: BLE001 - report any failure as a nonzero exit
        print(f"eotrack {args.command}: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
