"""Value types shared by every stage: states, anchors, measurements, frames.

Positions are stored as plain ``(x, y)`` tuples so the types stay hashable and
immutable; use :func:`as_xy` to get a numpy view for arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# Column layout of the flat particle/state vector y = [p, v, b, X].
PX, PY, VX, VY, B_RHO, B_PHI, RADIUS, WIDTH = range(8)
STATE_DIM = 8


class DegenerateGeometryError(ValueError):
    """Raised when two points that must be distinct coincide."""


def wrap_angle(angle):
    """Map angles to (-pi, pi]. Works on scalars and arrays."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2.0 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def as_xy(point) -> np.ndarray:
    return np.asarray(point, dtype=float).reshape(2)


def _finite_pair(name: str, value) -> tuple[float, float]:
    x, y = (float(c) for c in value)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"{name} must be finite, got {(x, y)}")
    return (x, y)


@dataclass(frozen=True)
class KinematicState:
    p: tuple[float, float]
    v: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "p", _finite_pair("p", self.p))
        object.__setattr__(self, "v", _finite_pair("v", self.v))

    def as_array(self) -> np.ndarray:
        return np.array([*self.p, *self.v])

    @classmethod
    def from_array(cls, arr) -> KinematicState:
        arr = np.asarray(arr, dtype=float)
        return cls((arr[0], arr[1]), (arr[2], arr[3]))


@dataclass(frozen=True)
class BiasState:
    """Rigid offset of the radio device from the object center (range, angle)."""

    b_rho: float
    b_phi: float

    def __post_init__(self):
        if not self.b_rho >= 0.0:
            raise ValueError(f"b_rho must be >= 0, got {self.b_rho}")
        object.__setattr__(self, "b_rho", float(self.b_rho))
        object.__setattr__(self, "b_phi", wrap_angle(self.b_phi))

    def offset(self) -> np.ndarray:
        return self.b_rho * np.array([math.cos(self.b_phi), math.sin(self.b_phi)])


@dataclass(frozen=True)
class ExtentGeo:
    """Circle radius ``r`` and the unified scattering-ellipse semi-minor axis ``w``."""

    r: float
    w: float

    def __post_init__(self):
        if not (self.r > 0.0 and self.w > 0.0):
            raise ValueError(f"extent must be positive, got r={self.r}, w={self.w}")


@dataclass(frozen=True)
class ExtentIdeal:
    """Elliptic object outline (semi-axes ``a`` >= ``b``) with scattering width ``w``."""

    a: float
    b: float
    w: float

    def __post_init__(self):
        if not (self.a >= self.b > 0.0 and self.w > 0.0):
            raise ValueError(f"need a >= b > 0 and w > 0, got {self}")


@dataclass(frozen=True)
class AugmentedState:
    x: KinematicState
    b: BiasState
    X: ExtentGeo

    def as_array(self) -> np.ndarray:
        return np.array([*self.x.p, *self.x.v, self.b.b_rho, self.b.b_phi, self.X.r, self.X.w])

    @classmethod
    def from_array(cls, arr) -> AugmentedState:
        arr = np.asarray(arr, dtype=float)
        return cls(
            KinematicState.from_array(arr[:4]),
            BiasState(arr[B_RHO], arr[B_PHI]),
            ExtentGeo(arr[RADIUS], arr[WIDTH]),
        )


@dataclass(frozen=True)
class Anchor:
    id: int
    pos: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "pos", _finite_pair("pos", self.pos))

    @property
    def xy(self) -> np.ndarray:
        return np.array(self.pos)


def check_anchors(anchors) -> None:
    ids = [a.id for a in anchors]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate anchor ids: {ids}")
    positions = [a.pos for a in anchors]
    if len(set(positions)) != len(positions):
        raise DegenerateGeometryError("anchor positions must be pairwise distinct")


@dataclass(frozen=True)
class Measurement:
    """Distance ``d`` (m) and linear normalized amplitude ``u`` (so ``u**2`` is the SNR)."""

    d: float
    u: float


@dataclass(frozen=True)
class SceneConstants:
    d_max: float = 20.0
    gamma: float = 10.0 ** (6.0 / 20.0)
    beta_bw: float = 1e8
    c: float = SPEED_OF_LIGHT
    omega: float = 2.0 * math.pi / 3.0
    mu_m: float = 5.0
    mu_c: float = 5.0

    def __post_init__(self):
        for name in ("d_max", "gamma", "beta_bw", "c", "omega", "mu_m", "mu_c"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.omega > math.pi:
            raise ValueError("opening angle must lie in (0, pi]")

    def in_support(self, z: Measurement) -> bool:
        return 0.0 <= z.d <= self.d_max and z.u >= self.gamma


@dataclass
class MeasurementFrame:
    """All measurements of one time step.

    ``active`` is keyed by receiving anchor id ``j``; ``passive`` by the ordered
    pair ``(j, j_tx)`` where ``j`` receives and ``j_tx`` transmits.
    """

    n: int
    active: dict[int, list[Measurement]] = field(default_factory=dict)
    passive: dict[tuple[int, int], list[Measurement]] = field(default_factory=dict)

    def count(self) -> int:
        return sum(map(len, self.active.values())) + sum(map(len, self.passive.values()))


def device_position(x: KinematicState, b: BiasState) -> np.ndarray:
    """Position of the radio device rigidly mounted on the object."""
    return np.asarray(x.p, dtype=float) + b.offset()


def device_positions(states: np.ndarray) -> np.ndarray:
    """Vectorized :func:`device_position` over rows of flat state vectors."""
    rho = states[..., B_RHO]
    phi = states[..., B_PHI]
    return np.stack(
        [states[..., PX] + rho * np.cos(phi), states[..., PY] + rho * np.sin(phi)], axis=-1
    )
