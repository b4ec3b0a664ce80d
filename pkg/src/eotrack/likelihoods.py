"""Measurement likelihoods and association pseudo-likelihood ratios.

Scalar functions operate on the value types from :mod:`eotrack.core` and are the
reference definitions. The ``*_batch`` helpers evaluate the same quantities for
whole particle clouds and are what the tracker calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    SPEED_OF_LIGHT,
    Anchor,
    AugmentedState,
    BiasState,
    DegenerateGeometryError,
    ExtentGeo,
    ExtentIdeal,
    KinematicState,
    Measurement,
    SceneConstants,
    as_xy,
    device_position,
)
from .scatter_geometry import FACING, ScatterEllipse, aspect_angle, build_ellipse, sample_ideal_scatterer


def _xy(point) -> np.ndarray:
    return point.xy if isinstance(point, Anchor) else as_xy(point)


@dataclass(frozen=True)
class UtParams:
    alpha: float = 1.0
    beta: float = 2.0
    kappa: float = 0.0

    def weights(self, n: int = 2) -> tuple[np.ndarray, np.ndarray, float]:
        """Mean weights, covariance weights and the sigma-point spread factor."""
        lam = self.alpha**2 * (n + self.kappa) - n
        if n + lam <= 0.0:
            raise ValueError(f"invalid UT parameters: n + lambda = {n + lam}")
        wm = np.full(2 * n + 1, 0.5 / (n + lam))
        wc = wm.copy()
        wm[0] = lam / (n + lam)
        wc[0] = wm[0] + 1.0 - self.alpha**2 + self.beta
        return wm, wc, math.sqrt(n + lam)


def normal_pdf(x, mean, var):
    x, mean, var = np.asarray(x), np.asarray(mean), np.asarray(var)
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2.0 * np.pi * var)


def ranging_variance(u, beta_bw: float = 1e8, c: float = SPEED_OF_LIGHT):
    """Fisher-information distance variance for linear amplitude ``u`` (``u**2`` = SNR)."""
    u = np.asarray(u, dtype=float)
    var = c**2 / (8.0 * np.pi**2 * beta_bw**2 * u**2)
    return float(var) if var.ndim == 0 else var


def bistatic_distance(q, tx_pos, rx_pos):
    q = np.asarray(q, dtype=float)
    d_tx = q - np.asarray(tx_pos, dtype=float)
    d_rx = q - np.asarray(rx_pos, dtype=float)
    return np.hypot(d_tx[..., 0], d_tx[..., 1]) + np.hypot(d_rx[..., 0], d_rx[..., 1])


def los_likelihood(z: Measurement, x: KinematicState, b: BiasState, anchor: Anchor, consts: SceneConstants) -> float:
    mean = float(np.linalg.norm(device_position(x, b) - anchor.xy))
    var = ranging_variance(z.u, consts.beta_bw, consts.c)
    return float(normal_pdf(z.d, mean, var))


def ut_delay_variance(ellipse: ScatterEllipse, tx, rx, params: UtParams = UtParams()) -> float:
    """Spread of the bistatic distance when the scatterer is N(chi, R), via the UT.

    ``tx`` and ``rx`` are anchors or plain positions.
    """
    chi = ellipse.center
    tx, rx = _xy(tx), _xy(rx)
    if not (np.any(chi - tx) and np.any(chi - rx)):
        raise DegenerateGeometryError("ellipse center coincides with an anchor")
    evals, evecs = np.linalg.eigh(ellipse.R)
    root = evecs * np.sqrt(np.clip(evals, 0.0, None))
    wm, wc, spread = params.weights(2)
    points = [chi]
    for k in range(2):
        points += [chi + spread * root[:, k], chi - spread * root[:, k]]
    h = bistatic_distance(np.array(points), tx, rx)
    mean = wm @ h
    return float(wc @ (h - mean) ** 2)


def ut_delay_variance_batch(chi, axis_major, axis_minor, tx_pos, rx_pos, params: UtParams = UtParams()):
    """Same as :func:`ut_delay_variance` for stacked ellipses given by principal-axis roots."""
    wm, wc, spread = params.weights(2)
    offsets = spread * np.stack([axis_major, -axis_major, axis_minor, -axis_minor], axis=0)
    h0 = bistatic_distance(chi, tx_pos, rx_pos)
    h = bistatic_distance(chi[None] + offsets, tx_pos, rx_pos)
    mean = wm[0] * h0 + wm[1] * h.sum(axis=0)
    return wc[0] * (h0 - mean) ** 2 + wc[1] * ((h - mean) ** 2).sum(axis=0)


def geo_scatter_likelihood(
    z: Measurement,
    x: KinematicState,
    X: ExtentGeo,
    tx: Anchor,
    rx: Anchor,
    consts: SceneConstants,
    ut: UtParams = UtParams(),
    aspect_sign: str = FACING,
) -> float:
    """Passive-measurement density under the geometry-based scattering model.

    The ellipse is built toward the receiving anchor ``rx``; the transmitter only
    enters through the bistatic distance.
    """
    ellipse = build_ellipse(x.p, X, rx, consts.omega, aspect_sign)
    mean = float(bistatic_distance(ellipse.center, tx.xy, rx.xy))
    var = ranging_variance(z.u, consts.beta_bw, consts.c) + ut_delay_variance(ellipse, tx, rx, ut)
    return float(normal_pdf(z.d, mean, var))


def active_scatter_likelihood(
    z: Measurement,
    x: KinematicState,
    b: BiasState,
    X: ExtentGeo,
    anchor: Anchor,
    consts: SceneConstants,
    ut: UtParams = UtParams(),
    aspect_sign: str = FACING,
) -> float:
    """Active path device -> object surface -> anchor under the geometry-based model."""
    ellipse = build_ellipse(x.p, X, anchor, consts.omega, aspect_sign)
    m = device_position(x, b)
    mean = float(bistatic_distance(ellipse.center, m, anchor.xy))
    var = ranging_variance(z.u, consts.beta_bw, consts.c) + ut_delay_variance(ellipse, m, anchor, ut)
    return float(normal_pdf(z.d, mean, var))


def ideal_scatter_likelihood(
    z: Measurement,
    x: KinematicState,
    Xi: ExtentIdeal,
    tx: Anchor,
    rx: Anchor,
    consts: SceneConstants,
    n_samples: int,
    rng: np.random.Generator,
    orientation: float = 0.0,
) -> float:
    """Monte-Carlo average of the noise density over sampled ideal scatterers."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    phi = aspect_angle(x.p, rx)
    q = sample_ideal_scatterer(as_xy(x.p), Xi.a, Xi.b, Xi.w, phi, consts.omega, rng, size=n_samples, orientation=orientation)
    var = ranging_variance(z.u, consts.beta_bw, consts.c)
    return float(np.mean(normal_pdf(z.d, bistatic_distance(q, tx.xy, rx.xy), var)))


def clutter_density(z: Measurement, consts: SceneConstants) -> float:
    if 0.0 <= z.d <= consts.d_max:
        return 1.0 / consts.d_max
    return 0.0


def _ratio(numerator: float, z: Measurement, consts: SceneConstants) -> float:
    fc = clutter_density(z, consts)
    if fc == 0.0:
        raise ValueError(f"measurement d={z.d} outside clutter support [0, {consts.d_max}]")
    return numerator / (consts.mu_c * fc)


def passive_pseudo_lr(
    z: Measurement,
    y: AugmentedState,
    tx: Anchor,
    rx: Anchor,
    consts: SceneConstants,
    ut: UtParams = UtParams(),
    aspect_sign: str = FACING,
) -> float:
    """Object-vs-clutter ratio for a passive measurement (the a=1 branch)."""
    f = geo_scatter_likelihood(z, y.x, y.X, tx, rx, consts, ut, aspect_sign)
    return _ratio(consts.mu_m * f, z, consts)


def active_pseudo_lr(
    z: Measurement,
    y: AugmentedState,
    anchor: Anchor,
    consts: SceneConstants,
    mu_los: float = 1.0,
    model_scatter: bool = True,
    ut: UtParams = UtParams(),
    aspect_sign: str = FACING,
) -> float:
    """Object-vs-clutter ratio for an active measurement.

    The object hypothesis covers the LOS path (mean count ``mu_los``) and, with
    ``model_scatter``, paths scattered off the object (mean count ``mu_m``).
    """
    numerator = mu_los * los_likelihood(z, y.x, y.b, anchor, consts)
    if model_scatter:
        numerator += consts.mu_m * active_scatter_likelihood(z, y.x, y.b, y.X, anchor, consts, ut, aspect_sign)
    return _ratio(numerator, z, consts)


def marginal_assoc_factor(ratio):
    """Sum of the binary association factor over a in {0, 1}."""
    if np.any(np.asarray(ratio) < 0.0):
        raise ValueError("pseudo-likelihood ratio must be nonnegative")
    return 1.0 + ratio


# -- batch evaluation over particle clouds -----------------------------------


def _check_support(d: np.ndarray, consts: SceneConstants) -> None:
    if np.any((d < 0.0) | (d > consts.d_max)):
        raise ValueError("measurement outside clutter support")


def gaussian_component(d, u, mean, extra_var, consts: SceneConstants) -> np.ndarray:
    """Densities N(d_l; mean_i, sigma_d(u_l)^2 + extra_var_i), shape (M, I)."""
    var = ranging_variance(np.asarray(u, dtype=float), consts.beta_bw, consts.c)[:, None] + extra_var
    return np.exp(-0.5 * (np.asarray(d, dtype=float)[:, None] - mean) ** 2 / var) / np.sqrt(2.0 * np.pi * var)


def sampled_component(d, u, dist_samples, consts: SceneConstants) -> np.ndarray:
    """Densities averaged over scatterer samples; ``dist_samples`` is (I, S). Returns (M, I)."""
    var = ranging_variance(np.asarray(u, dtype=float), consts.beta_bw, consts.c)[:, None, None]
    d = np.asarray(d, dtype=float)[:, None, None]
    f = np.exp(-0.5 * (d - dist_samples[None]) ** 2 / var).mean(axis=-1)
    return f / np.sqrt(2.0 * np.pi * var[..., 0])


def log_assoc_sum(d, components, consts: SceneConstants) -> np.ndarray:
    """Sum over measurements of log(1 + ratio) for every particle.

    ``components`` is a list of ``(mean_count, density)`` with densities of
    shape (M, I); the object density is their count-weighted sum.
    """
    d = np.asarray(d, dtype=float)
    _check_support(d, consts)
    numerator = sum(mu * f for mu, f in components)
    return np.log1p(numerator * (consts.d_max / consts.mu_c)).sum(axis=0)
