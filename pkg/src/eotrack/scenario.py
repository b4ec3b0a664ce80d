"""Scenario configuration and its versioned JSON representation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from itertools import permutations
from pathlib import Path

from .core import Anchor, ExtentIdeal, SceneConstants, check_anchors
from .likelihoods import UtParams
from .motion import MotionParams, PriorConfig
from .scatter_geometry import FACING, LITERAL

SCHEMA_VERSION = 1

QUARTER_TURN_RATE = math.pi / 4.0  # 90 degrees over 2 s


@dataclass(frozen=True)
class TrajectorySpec:
    start: tuple[float, float] = (-2.5, -2.0)
    heading: float = 0.0
    speed: float = 0.5
    # (step count, turn rate in rad/s); straight / left turn / straight / right turn / straight
    segments: tuple[tuple[int, float], ...] = (
        (35, 0.0),
        (20, QUARTER_TURN_RATE),
        (55, 0.0),
        (20, -QUARTER_TURN_RATE),
        (50, 0.0),
    )


@dataclass(frozen=True)
class BlockageWindow:
    start: int
    stop: int  # inclusive
    anchors: tuple[int, ...]

    def covers(self, n: int) -> bool:
        return self.start <= n <= self.stop


DEFAULT_BLOCKAGE = (
    BlockageWindow(31, 60, (1, 2, 3)),
    BlockageWindow(61, 80, (1, 2)),
    BlockageWindow(81, 110, (2,)),
    BlockageWindow(111, 130, (1, 2, 3)),
)


@dataclass(frozen=True)
class Scenario:
    anchor_positions: tuple[tuple[float, float], ...] = ((4.0, 4.5), (-4.0, 4.5), (0.0, -5.0))
    n_steps: int = 180
    trajectory: TrajectorySpec = TrajectorySpec()
    blockage: tuple[BlockageWindow, ...] = DEFAULT_BLOCKAGE
    blockage_mode: str = "full"
    constants: SceneConstants = SceneConstants()
    ref_db: float = 30.0
    clutter_snr_span_db: float = 10.0
    true_bias: tuple[float, float] = (0.32, -math.pi / 3.0)
    true_extent: ExtentIdeal = ExtentIdeal(0.3, 0.2, 0.1)
    object_orientation: float = 0.0
    include_self_pairs: bool = False
    aspect_sign: str = FACING
    motion: MotionParams = MotionParams()
    prior: PriorConfig = PriorConfig()
    ut: UtParams = UtParams()
    mu_los: float = 1.0
    active_scatter_model: bool = True
    ess_threshold: float = 0.5
    ideal_samples: int = 50
    anchors: tuple[Anchor, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        anchors = tuple(Anchor(j + 1, tuple(pos)) for j, pos in enumerate(self.anchor_positions))
        object.__setattr__(self, "anchors", anchors)
        check_anchors(anchors)
        if len(anchors) < 2:
            raise ValueError("need at least two anchors for passive pairs")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if self.blockage_mode not in ("full", "los_only"):
            raise ValueError(f"blockage_mode must be 'full' or 'los_only', got {self.blockage_mode!r}")
        if self.aspect_sign not in (FACING, LITERAL):
            raise ValueError(f"aspect_sign must be {FACING!r} or {LITERAL!r}")
        ids = {a.id for a in anchors}
        for win in self.blockage:
            if not (1 <= win.start <= win.stop):
                raise ValueError(f"bad blockage window {win}")
            if not set(win.anchors) <= ids:
                raise ValueError(f"blockage window references unknown anchors: {win}")
        if sum(k for k, _ in self.trajectory.segments) < self.n_steps:
            raise ValueError("trajectory segments shorter than n_steps")
        if self.ideal_samples < 1:
            raise ValueError("ideal_samples must be >= 1")

    @property
    def dt(self) -> float:
        return self.motion.dt

    def anchor(self, j: int) -> Anchor:
        return self.anchors[j - 1]

    def passive_pairs(self) -> list[tuple[int, int]]:
        """Ordered (receiver, transmitter) pairs."""
        ids = [a.id for a in self.anchors]
        pairs = list(permutations(ids, 2))
        if self.include_self_pairs:
            pairs += [(j, j) for j in ids]
        return sorted(pairs)

    def blocked(self, n: int) -> set[int]:
        out: set[int] = set()
        for win in self.blockage:
            if win.covers(n):
                out.update(win.anchors)
        return out

    def with_(self, **changes) -> Scenario:
        return replace(self, **changes)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        c = self.constants
        return {
            "schema_version": SCHEMA_VERSION,
            "anchors": [list(p) for p in self.anchor_positions],
            "n_steps": self.n_steps,
            "trajectory": {
                "start": list(self.trajectory.start),
                "heading": self.trajectory.heading,
                "speed": self.trajectory.speed,
                "segments": [[k, rate] for k, rate in self.trajectory.segments],
            },
            "blockage": [
                {"start": w.start, "stop": w.stop, "anchors": list(w.anchors)} for w in self.blockage
            ],
            "blockage_mode": self.blockage_mode,
            "constants": {
                "d_max": c.d_max,
                "gamma_db": round(20.0 * math.log10(c.gamma), 12),
                "beta_bw": c.beta_bw,
                "c": c.c,
                "omega": c.omega,
                "mu_m": c.mu_m,
                "mu_c": c.mu_c,
            },
            "ref_db": self.ref_db,
            "clutter_snr_span_db": self.clutter_snr_span_db,
            "true_bias": {"b_rho": self.true_bias[0], "b_phi": self.true_bias[1]},
            "true_extent": {"a": self.true_extent.a, "b": self.true_extent.b, "w": self.true_extent.w},
            "object_orientation": self.object_orientation,
            "include_self_pairs": self.include_self_pairs,
            "aspect_sign": self.aspect_sign,
            "motion": {
                "dt": self.motion.dt,
                "sigma_a": self.motion.sigma_a,
                "sigma_rho": self.motion.sigma_rho,
                "sigma_phi": self.motion.sigma_phi,
                "sigma_r": self.motion.sigma_r,
                "sigma_w": self.motion.sigma_w,
                "floor": self.motion.floor,
            },
            "prior": {
                "position_halfwidth": self.prior.position_halfwidth,
                "velocity_std": self.prior.velocity_std,
                "b_rho": list(self.prior.b_rho),
                "r": list(self.prior.r),
                "w": list(self.prior.w),
            },
            "ut": {"alpha": self.ut.alpha, "beta": self.ut.beta, "kappa": self.ut.kappa},
            "mu_los": self.mu_los,
            "active_scatter_model": self.active_scatter_model,
            "ess_threshold": self.ess_threshold,
            "ideal_samples": self.ideal_samples,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Scenario:
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported scenario schema_version {version!r} (expected {SCHEMA_VERSION})")
        known = set(cls().to_dict())
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
        d = {**cls().to_dict(), **data}
        c = d["constants"]
        t = d["trajectory"]
        return cls(
            anchor_positions=tuple(tuple(map(float, p)) for p in d["anchors"]),
            n_steps=int(d["n_steps"]),
            trajectory=TrajectorySpec(
                start=tuple(map(float, t["start"])),
                heading=float(t["heading"]),
                speed=float(t["speed"]),
                segments=tuple((int(k), float(rate)) for k, rate in t["segments"]),
            ),
            blockage=tuple(
                BlockageWindow(int(w["start"]), int(w["stop"]), tuple(int(a) for a in w["anchors"]))
                for w in d["blockage"]
            ),
            blockage_mode=d["blockage_mode"],
            constants=SceneConstants(
                d_max=float(c["d_max"]),
                gamma=10.0 ** (float(c["gamma_db"]) / 20.0),
                beta_bw=float(c["beta_bw"]),
                c=float(c["c"]),
                omega=float(c["omega"]),
                mu_m=float(c["mu_m"]),
                mu_c=float(c["mu_c"]),
            ),
            ref_db=float(d["ref_db"]),
            clutter_snr_span_db=float(d["clutter_snr_span_db"]),
            true_bias=(float(d["true_bias"]["b_rho"]), float(d["true_bias"]["b_phi"])),
            true_extent=ExtentIdeal(**{k: float(v) for k, v in d["true_extent"].items()}),
            object_orientation=float(d["object_orientation"]),
            include_self_pairs=bool(d["include_self_pairs"]),
            aspect_sign=d["aspect_sign"],
            motion=MotionParams(**{k: float(v) for k, v in d["motion"].items()}),
            prior=PriorConfig(
                position_halfwidth=float(d["prior"]["position_halfwidth"]),
                velocity_std=float(d["prior"]["velocity_std"]),
                b_rho=tuple(d["prior"]["b_rho"]),
                r=tuple(d["prior"]["r"]),
                w=tuple(d["prior"]["w"]),
            ),
            ut=UtParams(**{k: float(v) for k, v in d["ut"].items()}),
            mu_los=float(d["mu_los"]),
            active_scatter_model=bool(d["active_scatter_model"]),
            ess_threshold=float(d["ess_threshold"]),
            ideal_samples=int(d["ideal_samples"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> Scenario:
        return cls.from_dict(json.loads(Path(path).read_text()))


SCHEMA_DOC = {
    "schema_version": "format version, must be 1",
    "anchors": "list of [x, y] anchor positions in m; anchor ids are 1-based list order",
    "n_steps": "number of time steps N",
    "trajectory.start": "object center at step 0 [x, y] (m)",
    "trajectory.heading": "initial heading (rad)",
    "trajectory.speed": "constant speed (m/s)",
    "trajectory.segments": "list of [steps, turn rate rad/s]; piecewise constant-turn path",
    "blockage": "list of {start, stop, anchors}: inclusive step window and blocked anchor ids",
    "blockage_mode": "'full' drops all active measurements of a blocked anchor, 'los_only' only the LOS path",
    "constants.d_max": "maximum measurable distance (m); clutter is uniform on [0, d_max]",
    "constants.gamma_db": "detection threshold on SNR u^2 (dB)",
    "constants.beta_bw": "RMS bandwidth (Hz)",
    "constants.c": "propagation speed (m/s)",
    "constants.omega": "opening angle of the scattering sector (rad)",
    "constants.mu_m": "mean number of object-related measurements per link",
    "constants.mu_c": "mean number of clutter measurements per link",
    "ref_db": "SNR at 1 m path length (dB); free-space pathloss beyond",
    "clutter_snr_span_db": "clutter SNR is uniform in dB on [gamma_db, gamma_db + span]",
    "true_bias": "{b_rho (m), b_phi (rad)} device offset used by the generator",
    "true_extent": "{a, b, w} ideal-model outline semi-axes and scattering width (m) used by the generator",
    "object_orientation": "orientation of the outline's a-axis (rad)",
    "include_self_pairs": "also generate/track passive links with transmitter == receiver",
    "aspect_sign": "'facing' puts the scattering ellipse on the side facing the receiver, 'literal' on the far side",
    "motion": "{dt, sigma_a, sigma_rho, sigma_phi, sigma_r, sigma_w, floor} tracker transition model",
    "prior": "{position_halfwidth, velocity_std, b_rho, r, w} initial particle distribution",
    "ut": "{alpha, beta, kappa} unscented-transform parameters",
    "mu_los": "expected LOS measurement count used in the active pseudo-likelihood",
    "active_scatter_model": "tracker also explains active measurements as device -> object -> anchor scatter paths",
    "ess_threshold": "resample when ESS < ess_threshold * I",
    "ideal_samples": "scatterer samples per particle for the ideal-model likelihood (I')",
}


def schema_help() -> str:
    width = max(map(len, SCHEMA_DOC))
    lines = ["scenario JSON fields:"]
    lines += [f"  {key.ljust(width)}  {text}" for key, text in SCHEMA_DOC.items()]
    return "\n".join(lines)
