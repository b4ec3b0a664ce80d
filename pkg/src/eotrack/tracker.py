"""Particle-based marginalization of the joint posterior with per-measurement PDA.

Each measurement carries its own binary association variable and the factors
do not couple them, so summing every variable over {0, 1} is exact and gives a
per-particle weight multiplier of prod_l (1 + ratio_l). No iterative message
passing is needed.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    B_PHI,
    B_RHO,
    PX,
    PY,
    RADIUS,
    STATE_DIM,
    WIDTH,
    AugmentedState,
    MeasurementFrame,
    device_positions,
)
from .likelihoods import (
    bistatic_distance,
    gaussian_component,
    log_assoc_sum,
    sampled_component,
    ut_delay_variance_batch,
)
from .motion import MotionParams, init_prior, propagate
from .scatter_geometry import LITERAL, ellipse_batch, sample_ideal_scatterer
from .scenario import Scenario

log = logging.getLogger(__name__)

TRACK_HEADER = ["n", "m_x", "m_y", "p_x", "p_y", "v_x", "v_y", "b_rho", "b_phi", "r", "w", "ess", "step_seconds"]


class DegeneracyError(RuntimeError):
    def __init__(self, step: int | None, max_log_weight: float):
        super().__init__(f"particle weights degenerate at step {step} (max log-weight {max_log_weight})")
        self.step = step
        self.max_log_weight = max_log_weight


@dataclass(frozen=True)
class MethodVariant:
    """One of the compared trackers.

    ``geo``: active + passive, geometry-based scattering ellipses.
    ``ideal``: active + passive, Monte-Carlo ideal scattering with ``ideal_samples`` draws.
    ``active``: active measurements only.
    ``pda``: active + passive, passive paths treated as originating at the device (point target).
    """

    kind: str
    ideal_samples: int = 50

    def __post_init__(self):
        if self.kind not in _LABELS:
            raise ValueError(f"unknown variant {self.kind!r}; choose from {sorted(_LABELS)}")
        if self.ideal_samples < 1:
            raise ValueError("ideal_samples must be >= 1")

    @property
    def label(self) -> str:
        return _LABELS[self.kind]

    @property
    def uses_passive(self) -> bool:
        return self.kind != "active"


_LABELS = {"geo": "AP-EOPDA(geo)", "ideal": "AP-EOPDA(idl)", "active": "A-EOPDA", "pda": "AP-PDA"}
VARIANT_NAMES = tuple(_LABELS)


def parse_variant(name: str, ideal_samples: int = 50) -> MethodVariant:
    key = name.strip().lower()
    aliases = {"idl": "ideal", "a": "active", "a-eopda": "active", "ap-pda": "pda"}
    for kind, label in _LABELS.items():
        aliases[label.lower()] = kind
    return MethodVariant(aliases.get(key, key), ideal_samples)


@dataclass
class ParticleSet:
    states: np.ndarray  # (I, 8)
    weights: np.ndarray  # (I,)

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.states.ndim != 2 or self.states.shape[1] != STATE_DIM or len(self.states) < 1:
            raise ValueError(f"states must have shape (I>=1, {STATE_DIM}), got {self.states.shape}")
        if self.weights.shape != (len(self.states),):
            raise ValueError("weights must match the number of particles")

    @classmethod
    def uniform(cls, states) -> ParticleSet:
        states = np.asarray(states, dtype=float)
        return cls(states, np.full(len(states), 1.0 / len(states)))

    def __len__(self) -> int:
        return len(self.states)

    def ess(self) -> float:
        return float(1.0 / np.sum(self.weights**2))


def predict(ps: ParticleSet, params: MotionParams, rng: np.random.Generator) -> ParticleSet:
    return ParticleSet(propagate(ps.states, params, rng), ps.weights.copy())


class _AnchorGeometry:
    """Lazily computed per-anchor scattering geometry for one particle cloud."""

    def __init__(self, states: np.ndarray, scenario: Scenario, variant: MethodVariant, rng):
        self.p = states[:, [PX, PY]]
        self.r, self.w = states[:, RADIUS], states[:, WIDTH]
        self.scenario, self.variant, self.rng = scenario, variant, rng
        self._cache: dict[int, tuple] = {}

    def __getitem__(self, j: int):
        if j not in self._cache:
            sc = self.scenario
            anchor = sc.anchor(j).xy
            if self.variant.kind == "ideal":
                delta = anchor - self.p if sc.aspect_sign != LITERAL else self.p - anchor
                phi = np.arctan2(delta[:, 1], delta[:, 0])
                # circular outline of radius r stands in for the ideal ellipse
                self._cache[j] = sample_ideal_scatterer(
                    self.p, self.r, self.r, self.w, phi, sc.constants.omega, self.rng, size=self.variant.ideal_samples
                )
            else:
                self._cache[j] = ellipse_batch(self.p, self.r, self.w, anchor, sc.constants.omega, sc.aspect_sign)
        return self._cache[j]

    def scatter_density(self, d, u, tx, j: int) -> np.ndarray:
        """Density of paths tx -> object surface facing anchor j -> anchor j, shape (M, I)."""
        consts, rx = self.scenario.constants, self.scenario.anchor(j).xy
        if self.variant.kind == "ideal":
            return sampled_component(d, u, bistatic_distance(self[j], tx[:, None] if np.ndim(tx) == 2 else tx, rx), consts)
        chi, ax_major, ax_minor = self[j]
        spread = ut_delay_variance_batch(chi, ax_major, ax_minor, tx, rx, self.scenario.ut)
        return gaussian_component(d, u, bistatic_distance(chi, tx, rx), spread, consts)


def frame_log_likelihood(
    states: np.ndarray, frame: MeasurementFrame, scenario: Scenario, variant: MethodVariant, rng
) -> np.ndarray:
    """Sum over measurements of log(1 + ratio) for every particle."""
    consts = scenario.constants
    m = device_positions(states)
    geometry = _AnchorGeometry(states, scenario, variant, rng)
    out = np.zeros(len(states))
    for j in sorted(frame.active):
        zs = frame.active[j]
        d = np.array([z.d for z in zs])
        u = np.array([z.u for z in zs])
        los = gaussian_component(d, u, np.linalg.norm(m - scenario.anchor(j).xy, axis=1), 0.0, consts)
        components = [(scenario.mu_los, los)]
        if scenario.active_scatter_model:
            if variant.kind == "pda":
                # a point object scatters along the LOS path itself
                components.append((consts.mu_m, los))
            else:
                components.append((consts.mu_m, geometry.scatter_density(d, u, m, j)))
        out += log_assoc_sum(d, components, consts)

    if not variant.uses_passive:
        return out
    for j, j_tx in sorted(frame.passive):
        zs = frame.passive[(j, j_tx)]
        d = np.array([z.d for z in zs])
        u = np.array([z.u for z in zs])
        tx = scenario.anchor(j_tx).xy
        if variant.kind == "pda":
            f = gaussian_component(d, u, bistatic_distance(m, tx, scenario.anchor(j).xy), 0.0, consts)
        else:
            f = geometry.scatter_density(d, u, tx, j)
        out += log_assoc_sum(d, [(consts.mu_m, f)], consts)
    return out


def update(
    ps: ParticleSet,
    frame: MeasurementFrame,
    scenario: Scenario,
    variant: MethodVariant,
    rng: np.random.Generator,
) -> ParticleSet:
    ll = frame_log_likelihood(ps.states, frame, scenario, variant, rng)
    with np.errstate(divide="ignore"):
        logw = np.log(ps.weights) + ll
    logw[np.isnan(logw)] = -np.inf
    top = float(np.max(logw))
    if not np.isfinite(top):
        raise DegeneracyError(frame.n, top)
    w = np.exp(logw - top)
    return ParticleSet(ps.states, w / w.sum())


def systematic_indices(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(weights)
    positions = (rng.random() + np.arange(n)) / n
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0
    return np.minimum(np.searchsorted(cumulative, positions, side="right"), n - 1)


def resample(ps: ParticleSet, threshold: float, rng: np.random.Generator) -> ParticleSet:
    """Systematic resampling when ESS drops below ``threshold * I``."""
    if ps.ess() >= threshold * len(ps):
        return ps
    idx = systematic_indices(ps.weights, rng)
    return ParticleSet.uniform(ps.states[idx])


@dataclass(frozen=True)
class Estimate:
    state: np.ndarray  # (8,), b_phi averaged on the circle
    device: np.ndarray  # (2,) posterior mean of the device position

    def as_augmented(self) -> AugmentedState:
        return AugmentedState.from_array(self.state)


def mmse_estimate(ps: ParticleSet) -> Estimate:
    w = ps.weights
    state = w @ ps.states
    state[B_PHI] = np.arctan2(w @ np.sin(ps.states[:, B_PHI]), w @ np.cos(ps.states[:, B_PHI]))
    state[B_RHO] = max(state[B_RHO], 0.0)
    return Estimate(state, w @ device_positions(ps.states))


@dataclass
class TrackOutput:
    variant: str
    states: np.ndarray  # (N, 8)
    device: np.ndarray  # (N, 2)
    ess: np.ndarray
    step_seconds: np.ndarray
    degenerate_steps: list[int] = field(default_factory=list)

    @property
    def n_steps(self) -> int:
        return len(self.states)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACK_HEADER)
            for n in range(self.n_steps):
                s = self.states[n]
                row = [*self.device[n], s[PX], s[PY], s[2], s[3], s[B_RHO], s[B_PHI], s[RADIUS], s[WIDTH]]
                writer.writerow([n + 1, *map(repr, map(float, row)), repr(float(self.ess[n])), repr(float(self.step_seconds[n]))])

    @classmethod
    def read_csv(cls, path, variant: str = "") -> TrackOutput:
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2).reshape(-1, len(TRACK_HEADER))
        states = rows[:, [3, 4, 5, 6, 7, 8, 9, 10]]
        return cls(variant, states, rows[:, 1:3], rows[:, 11], rows[:, 12])


def run_filter(
    frames: list[MeasurementFrame],
    scenario: Scenario,
    variant: MethodVariant,
    n_particles: int,
    seed,
) -> TrackOutput:
    """Run one tracker over all frames; deterministic given (seed, n_particles, variant)."""
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    rng = np.random.default_rng(seed)
    params = scenario.motion
    states = init_prior(scenario.trajectory.start, n_particles, rng, scenario.prior)
    if variant.kind == "pda":
        params = replace(params, sigma_r=0.0, sigma_w=0.0)
        states[:, RADIUS], states[:, WIDTH] = scenario.prior.mean_extent()
    ps = ParticleSet.uniform(states)

    n_steps = len(frames)
    est_states = np.empty((n_steps, STATE_DIM))
    est_device = np.empty((n_steps, 2))
    ess = np.empty(n_steps)
    seconds = np.empty(n_steps)
    degenerate: list[int] = []
    for k, frame in enumerate(frames):
        t0 = time.perf_counter()
        ps = predict(ps, params, rng)
        try:
            ps = update(ps, frame, scenario, variant, rng)
        except DegeneracyError as err:
            log.warning("%s: %s; reset to uniform weights", variant.label, err)
            degenerate.append(frame.n)
            ps = ParticleSet.uniform(ps.states)
        est = mmse_estimate(ps)
        ess[k] = ps.ess()
        ps = resample(ps, scenario.ess_threshold, rng)
        seconds[k] = time.perf_counter() - t0
        est_states[k], est_device[k] = est.state, est.device
    return TrackOutput(variant.label, est_states, est_device, ess, seconds, degenerate)
