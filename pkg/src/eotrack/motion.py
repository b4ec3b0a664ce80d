"""State transitions: constant velocity with white acceleration, random walks for bias and extent.

All samplers are vectorized over leading axes and draw from independent
standard-normal calls, so the three factors of the transition never share noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import B_PHI, B_RHO, RADIUS, STATE_DIM, WIDTH, wrap_angle


@dataclass(frozen=True)
class MotionParams:
    dt: float = 0.1
    sigma_a: float = 2.0
    sigma_rho: float = 0.1
    sigma_phi: float = 0.5
    sigma_r: float = 0.05
    sigma_w: float = 0.05
    floor: float = 1e-3  # reflection floor for b_rho, r, w

    def __post_init__(self):
        if self.dt <= 0.0 or self.floor <= 0.0:
            raise ValueError("dt and floor must be positive")
        for name in ("sigma_a", "sigma_rho", "sigma_phi", "sigma_r", "sigma_w"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")


def cv_matrices(dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Transition ``A`` (4x4) and noise gain ``B`` (4x2) for state [px, py, vx, vy]."""
    eye = np.eye(2)
    A = np.block([[eye, dt * eye], [np.zeros((2, 2)), eye]])
    B = np.vstack([0.5 * dt**2 * eye, dt * eye])
    return A, B


def reflect(values, floor: float):
    values = np.asarray(values, dtype=float)
    out = np.where(values < floor, 2.0 * floor - values, values)
    return np.maximum(out, floor)


def sample_kinematic(x, params: MotionParams, rng: np.random.Generator) -> np.ndarray:
    """Propagate kinematic rows ``[px, py, vx, vy]`` one step."""
    x = np.asarray(x, dtype=float)
    A, B = cv_matrices(params.dt)
    accel = params.sigma_a * rng.standard_normal(x.shape[:-1] + (2,))
    return x @ A.T + accel @ B.T


def sample_bias(b, params: MotionParams, rng: np.random.Generator) -> np.ndarray:
    """Random walk on rows ``[b_rho, b_phi]``; range reflected at the floor, angle wrapped."""
    b = np.asarray(b, dtype=float)
    noise = rng.standard_normal(b.shape)
    rho = reflect(b[..., 0] + params.sigma_rho * noise[..., 0], params.floor)
    phi = wrap_angle(b[..., 1] + params.sigma_phi * noise[..., 1])
    return np.stack([rho, np.asarray(phi)], axis=-1)


def sample_extent(X, params: MotionParams, rng: np.random.Generator) -> np.ndarray:
    """Random walk on rows ``[r, w]`` reflected at the floor."""
    X = np.asarray(X, dtype=float)
    noise = rng.standard_normal(X.shape)
    r = reflect(X[..., 0] + params.sigma_r * noise[..., 0], params.floor)
    w = reflect(X[..., 1] + params.sigma_w * noise[..., 1], params.floor)
    return np.stack([r, w], axis=-1)


def propagate(states: np.ndarray, params: MotionParams, rng: np.random.Generator) -> np.ndarray:
    """One transition of full 8-column state rows."""
    out = np.empty_like(states)
    out[..., :4] = sample_kinematic(states[..., :4], params, rng)
    out[..., B_RHO : B_PHI + 1] = sample_bias(states[..., B_RHO : B_PHI + 1], params, rng)
    out[..., RADIUS : WIDTH + 1] = sample_extent(states[..., RADIUS : WIDTH + 1], params, rng)
    return out


@dataclass(frozen=True)
class PriorConfig:
    position_halfwidth: float = 1.0
    velocity_std: float = 1.0
    b_rho: tuple[float, float] = (0.0, 0.5)
    r: tuple[float, float] = (0.1, 0.5)
    w: tuple[float, float] = (0.02, 0.2)

    def mean_extent(self) -> tuple[float, float]:
        return 0.5 * sum(self.r), 0.5 * sum(self.w)


def init_prior(center, n: int, rng: np.random.Generator, prior: PriorConfig = PriorConfig()) -> np.ndarray:
    """Draw ``n`` initial state rows around the reference position ``center``."""
    center = np.asarray(center, dtype=float)
    states = np.empty((n, STATE_DIM))
    h = prior.position_halfwidth
    states[:, 0:2] = center + rng.uniform(-h, h, size=(n, 2))
    states[:, 2:4] = prior.velocity_std * rng.standard_normal((n, 2))
    states[:, B_RHO] = rng.uniform(*prior.b_rho, size=n)
    states[:, B_PHI] = wrap_angle(rng.uniform(-np.pi, np.pi, size=n))
    states[:, RADIUS] = rng.uniform(*prior.r, size=n)
    states[:, WIDTH] = rng.uniform(*prior.w, size=n)
    return states
