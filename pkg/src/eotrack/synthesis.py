"""Ground-truth trajectories and synthetic active/passive measurement frames."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Measurement, MeasurementFrame
from .likelihoods import bistatic_distance, ranging_variance
from .scatter_geometry import sample_ideal_scatterer
from .scenario import Scenario, TrajectorySpec
from .seeding import derive_rng

DATASET_HEADER = ["n", "type", "j", "j2", "d", "u"]
TRUTH_HEADER = ["n", "p_x", "p_y", "v_x", "v_y", "m_x", "m_y"]


@dataclass
class GroundTruth:
    """True object kinematics at steps 1..N plus the (fixed) bias and shape.

    ``start`` is the object center at step 0, the reference for the prior.
    """

    kinematic: np.ndarray  # (N, 4)
    device: np.ndarray  # (N, 2)
    start: np.ndarray
    bias: tuple[float, float] = (0.0, 0.0)

    @property
    def n_steps(self) -> int:
        return len(self.kinematic)

    @property
    def positions(self) -> np.ndarray:
        return self.kinematic[:, :2]


def generate_trajectory(
    spec: TrajectorySpec, n_steps: int, dt: float, bias: tuple[float, float] = (0.0, 0.0)
) -> GroundTruth:
    """Piecewise constant-turn path, integrated exactly step by step."""
    if spec.speed < 0.0 or dt <= 0.0:
        raise ValueError("speed must be >= 0 and dt > 0")
    rates = np.concatenate([np.full(int(k), float(rate)) for k, rate in spec.segments]) if spec.segments else np.zeros(0)
    if len(rates) < n_steps:
        raise ValueError(f"trajectory segments cover {len(rates)} steps, need {n_steps}")
    pos = np.array(spec.start, dtype=float)
    heading = float(spec.heading)
    kin = np.empty((n_steps, 4))
    for n in range(n_steps):
        rate = rates[n]
        if rate == 0.0:
            pos = pos + spec.speed * dt * np.array([math.cos(heading), math.sin(heading)])
            heading_new = heading
        else:
            heading_new = heading + rate * dt
            radius = spec.speed / rate
            pos = pos + radius * np.array(
                [math.sin(heading_new) - math.sin(heading), math.cos(heading) - math.cos(heading_new)]
            )
        heading = heading_new
        kin[n] = [pos[0], pos[1], spec.speed * math.cos(heading), spec.speed * math.sin(heading)]
    rho, phi = bias
    device = kin[:, :2] + rho * np.array([math.cos(phi), math.sin(phi)])
    return GroundTruth(kinematic=kin, device=device, start=np.array(spec.start, dtype=float), bias=bias)


def scenario_truth(scenario: Scenario) -> GroundTruth:
    return generate_trajectory(scenario.trajectory, scenario.n_steps, scenario.dt, scenario.true_bias)


def amplitude_from_path(d, ref_db: float = 30.0):
    """Linear amplitude after free-space loss over path length ``d``; ``u**2`` is the SNR."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("path length must be positive")
    u = 10.0 ** ((ref_db - 20.0 * np.log10(d)) / 20.0)
    return float(u) if u.ndim == 0 else u


LOS, OBJECT, CLUTTER = "los", "object", "clutter"


def _noisy(path: np.ndarray, source: str, scenario: Scenario, rng: np.random.Generator):
    c = scenario.constants
    path = np.atleast_1d(path)
    u = np.atleast_1d(amplitude_from_path(path, scenario.ref_db)) if path.size else np.zeros(0)
    d = path + np.sqrt(ranging_variance(u, c.beta_bw, c.c)) * rng.standard_normal(path.shape)
    return d, u, source


def _clutter(scenario: Scenario, rng: np.random.Generator):
    c = scenario.constants
    k = rng.poisson(c.mu_c)
    d = rng.uniform(0.0, c.d_max, size=k)
    gamma_db = 20.0 * math.log10(c.gamma)
    snr_db = gamma_db + scenario.clutter_snr_span_db * rng.random(k)
    return d, 10.0 ** (snr_db / 20.0), CLUTTER


def _finish(parts, scenario: Scenario, rng: np.random.Generator, return_sources: bool):
    """Threshold to the measurement support, then hide the association by shuffling."""
    c = scenario.constants
    d = np.concatenate([p[0] for p in parts])
    u = np.concatenate([p[1] for p in parts])
    src = np.concatenate([[p[2]] * len(p[0]) for p in parts]) if d.size else np.zeros(0, dtype=str)
    keep = (u >= c.gamma) & (d >= 0.0) & (d <= c.d_max)
    d, u, src = d[keep], u[keep], src[keep]
    order = rng.permutation(len(d))
    meas = [Measurement(float(d[i]), float(u[i])) for i in order]
    if return_sources:
        return list(zip(meas, (str(src[i]) for i in order)))
    return meas


def _scatterers(p, scenario: Scenario, receiver: np.ndarray, k: int, rng) -> np.ndarray:
    delta = receiver - p
    phi = math.atan2(delta[1], delta[0])
    if scenario.aspect_sign == "literal":
        phi = math.atan2(-delta[1], -delta[0])
    Xi = scenario.true_extent
    return sample_ideal_scatterer(
        p, Xi.a, Xi.b, Xi.w, phi, scenario.constants.omega, rng, size=k, orientation=scenario.object_orientation
    )


def generate_active_frame(
    truth: GroundTruth, n: int, scenario: Scenario, rng: np.random.Generator, return_sources: bool = False
) -> dict[int, list[Measurement]]:
    """Device-to-anchor measurements for step ``n`` (1-based): LOS, object scatter, clutter.

    With ``return_sources`` each list entry is ``(Measurement, source)`` with
    source one of ``"los"``, ``"object"``, ``"clutter"``.
    """
    p = truth.kinematic[n - 1, :2]
    m = truth.device[n - 1]
    blocked = scenario.blocked(n)
    out: dict[int, list[Measurement]] = {}
    for anchor in scenario.anchors:
        is_blocked = anchor.id in blocked
        if is_blocked and scenario.blockage_mode == "full":
            continue
        parts = []
        if not is_blocked:
            parts.append(_noisy(np.array([np.linalg.norm(m - anchor.xy)]), LOS, scenario, rng))
        k = rng.poisson(scenario.constants.mu_m)
        q = _scatterers(p, scenario, anchor.xy, k, rng)
        path = np.linalg.norm(q - m, axis=-1) + np.linalg.norm(q - anchor.xy, axis=-1)
        parts.append(_noisy(path, OBJECT, scenario, rng))
        parts.append(_clutter(scenario, rng))
        meas = _finish(parts, scenario, rng, return_sources)
        if meas:
            out[anchor.id] = meas
    return out


def generate_passive_frame(
    truth: GroundTruth, n: int, scenario: Scenario, rng: np.random.Generator, return_sources: bool = False
) -> dict[tuple[int, int], list[Measurement]]:
    """Anchor-to-anchor scatter measurements for step ``n``; unaffected by blockage."""
    p = truth.kinematic[n - 1, :2]
    out: dict[tuple[int, int], list[Measurement]] = {}
    for j, j_tx in scenario.passive_pairs():
        rx, tx = scenario.anchor(j).xy, scenario.anchor(j_tx).xy
        k = rng.poisson(scenario.constants.mu_m)
        q = _scatterers(p, scenario, rx, k, rng)
        parts = [_noisy(bistatic_distance(q, tx, rx), OBJECT, scenario, rng), _clutter(scenario, rng)]
        meas = _finish(parts, scenario, rng, return_sources)
        if meas:
            out[(j, j_tx)] = meas
    return out


def generate_frame(truth: GroundTruth, n: int, scenario: Scenario, seed: int) -> MeasurementFrame:
    rng = derive_rng(seed, "frame", n)
    active = generate_active_frame(truth, n, scenario, rng)
    passive = generate_passive_frame(truth, n, scenario, rng)
    return MeasurementFrame(n, active, passive)


def simulate(scenario: Scenario, seed: int) -> tuple[GroundTruth, list[MeasurementFrame]]:
    truth = scenario_truth(scenario)
    frames = [generate_frame(truth, n, scenario, seed) for n in range(1, scenario.n_steps + 1)]
    return truth, frames


# -- files ---------------------------------------------------------------------


def write_dataset(frames, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for frame in frames:
            for j in sorted(frame.active):
                for z in frame.active[j]:
                    writer.writerow([frame.n, "A", j, -1, repr(z.d), repr(z.u)])
            for j, j_tx in sorted(frame.passive):
                for z in frame.passive[(j, j_tx)]:
                    writer.writerow([frame.n, "P", j, j_tx, repr(z.d), repr(z.u)])


def read_dataset(path, n_steps: int) -> list[MeasurementFrame]:
    frames = [MeasurementFrame(n) for n in range(1, n_steps + 1)]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != DATASET_HEADER:
            raise ValueError(f"{path}: expected header {DATASET_HEADER}, got {reader.fieldnames}")
        for row in reader:
            n = int(row["n"])
            if not 1 <= n <= n_steps:
                raise ValueError(f"{path}: step {n} outside 1..{n_steps}")
            z = Measurement(float(row["d"]), float(row["u"]))
            frame = frames[n - 1]
            if row["type"] == "A":
                frame.active.setdefault(int(row["j"]), []).append(z)
            elif row["type"] == "P":
                frame.passive.setdefault((int(row["j"]), int(row["j2"])), []).append(z)
            else:
                raise ValueError(f"{path}: unknown measurement type {row['type']!r}")
    return frames


def write_truth(truth: GroundTruth, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRUTH_HEADER)
        for n, (k, m) in enumerate(zip(truth.kinematic, truth.device), start=1):
            writer.writerow([n, *map(repr, map(float, k)), *map(repr, map(float, m))])


def read_truth(path, start=None, bias=(0.0, 0.0)) -> GroundTruth:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.size and rows.shape[1] != len(TRUTH_HEADER):
        raise ValueError(f"{path}: expected {len(TRUTH_HEADER)} columns")
    kin = rows[:, 1:5] if rows.size else np.zeros((0, 4))
    device = rows[:, 5:7] if rows.size else np.zeros((0, 2))
    start = np.asarray(start if start is not None else (kin[0, :2] if len(kin) else (0.0, 0.0)), dtype=float)
    return GroundTruth(kinematic=kin, device=device, start=start, bias=bias)


def check_dataset(frames, scenario: Scenario) -> None:
    """Raise if a dataset references anchors or links the scenario does not define."""
    ids = {a.id for a in scenario.anchors}
    pairs = set(scenario.passive_pairs())
    if len(frames) != scenario.n_steps:
        raise ValueError(f"dataset has {len(frames)} steps, scenario expects {scenario.n_steps}")
    for frame in frames:
        if not set(frame.active) <= ids:
            raise ValueError(f"step {frame.n}: active anchors {sorted(frame.active)} not in scenario")
        if not set(frame.passive) <= pairs:
            raise ValueError(f"step {frame.n}: passive links {sorted(frame.passive)} not in scenario")
        for zs in [*frame.active.values(), *frame.passive.values()]:
            for z in zs:
                if not scenario.constants.in_support(z):
                    raise ValueError(f"step {frame.n}: measurement {z} outside support")
