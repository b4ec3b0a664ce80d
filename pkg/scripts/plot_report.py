"""Plot per-step RMSE (with OLOS windows shaded) and error CDFs from a report directory.

    python3 scripts/plot_report.py results/full

Needs matplotlib (``pip install -e .[plot]``).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np


def main(report_dir: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    root = Path(report_dir)
    report = json.loads((root / "report.json").read_text())
    fig, (ax_rmse, ax_cdf) = plt.subplots(1, 2, figsize=(12, 4.5))

    windows = next(iter(report["variants"].values()))["olos_windows"] if report["variants"] else []
    for win in windows:
        ax_rmse.axvspan(win["start"] - 0.5, win["stop"] + 0.5, color="0.5", alpha=0.08 * win["n_blocked"], lw=0)
    for label, v in report["variants"].items():
        rmse = np.asarray(v["rmse_per_step"])
        ax_rmse.plot(np.arange(1, len(rmse) + 1), rmse, label=f"{label} ({v['avg_rmse_m']:.2f} m)")
        cdf = np.asarray(v["cdf"])
        ax_cdf.plot(cdf[:, 0], cdf[:, 1], label=label)
    ax_rmse.set(xlabel="time step n", ylabel="RMSE of device position (m)", yscale="log")
    ax_cdf.set(xlabel="device position error (m)", ylabel="CDF", xscale="log")
    for ax in (ax_rmse, ax_cdf):
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    out = root / "comparison.png"
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "results/full")
