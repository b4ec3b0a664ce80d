"""Relative error of the UT delay spread against Monte-Carlo as a function of bistatic angle.

    python3 scripts/ut_fidelity_sweep.py

Near forward scatter (angle close to 180 deg) the bistatic distance is flat across
the ellipse, the spread becomes tiny and dominated by curvature, and the UT error
grows. The absolute error there stays far below the ranging variance.
"""

from __future__ import annotations

import math

import numpy as np

from eotrack.core import Anchor, ExtentGeo
from eotrack.likelihoods import bistatic_distance, ranging_variance, ut_delay_variance
from eotrack.scatter_geometry import build_ellipse


def main(samples: int = 400_000, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    p = np.zeros(2)
    rx = np.array([6.0, 0.0])
    X = ExtentGeo(0.3, 0.1)
    e = build_ellipse(p, X, Anchor(1, rx), 2 * math.pi / 3)
    q = rng.multivariate_normal(e.center, e.R, size=samples)
    floor = ranging_variance(10 ** (6 / 20))
    print(f"{'angle':>6} {'UT var':>11} {'MC var':>11} {'rel err':>8} {'abs err / sigma_d^2':>20}")
    for angle in (0, 30, 60, 90, 120, 150, 165, 175, 179):
        # transmitter placed so that tx-chi-rx subtends the requested angle
        a = math.radians(angle)
        tx = e.center + 6.0 * np.array([math.cos(a), math.sin(a)])
        ut = ut_delay_variance(e, tx, rx)
        mc = bistatic_distance(q, tx, rx).var()
        print(f"{angle:6d} {ut:11.3e} {mc:11.3e} {abs(ut - mc) / mc:8.2%} {abs(ut - mc) / floor:20.2e}")


if __name__ == "__main__":
    main()
