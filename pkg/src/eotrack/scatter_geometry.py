"""Per-anchor scattering ellipses and scatterer samplers.

The tracker approximates the object by a circle of radius ``r``. Toward each
receiving anchor the scatterers concentrate on the arc of the circle subtended
by the opening angle ``omega``; that arc is summarized by an ellipse centered on
the circle, oriented along the tangent, with semi-major axis equal to the
arc's half-chord and a shared semi-minor axis ``w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Anchor, DegenerateGeometryError, ExtentGeo, ExtentIdeal, as_xy, wrap_angle

FACING = "facing"
LITERAL = "literal"


def _check_sign(aspect_sign: str) -> None:
    if aspect_sign not in (FACING, LITERAL):
        raise ValueError(f"aspect_sign must be {FACING!r} or {LITERAL!r}, got {aspect_sign!r}")


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class ScatterEllipse:
    chi: tuple[float, float]
    theta: float
    l: float  # noqa: E741
    w: float
    R: np.ndarray

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.chi)


def aspect_angle(p, anchor: Anchor, aspect_sign: str = FACING) -> float:
    """Bearing from the object center toward ``anchor`` (or away from it for ``literal``)."""
    _check_sign(aspect_sign)
    delta = anchor.xy - as_xy(p)
    if not np.any(delta):
        raise DegenerateGeometryError(f"object center coincides with anchor {anchor.id}")
    if aspect_sign == LITERAL:
        delta = -delta
    return wrap_angle(math.atan2(delta[1], delta[0]))


def ellipse_center(p, r: float, phi: float) -> np.ndarray:
    return as_xy(p) + r * np.array([math.cos(phi), math.sin(phi)])


def semi_major_axis(r, omega):
    """Half-chord of the arc of radius ``r`` subtending ``omega``."""
    if np.ndim(r) or np.ndim(omega):
        return np.asarray(r) * np.sin(np.asarray(omega) / 2.0)
    return r * math.sin(omega / 2.0)


def ellipse_orientation(phi):
    return wrap_angle(np.asarray(phi) + np.pi / 2.0)


def build_ellipse(
    p, X: ExtentGeo, anchor: Anchor, omega: float, aspect_sign: str = FACING
) -> ScatterEllipse:
    phi = aspect_angle(p, anchor, aspect_sign)
    chi = ellipse_center(p, X.r, phi)
    theta = ellipse_orientation(phi)
    major, minor = semi_major_axis(X.r, omega), X.w
    if major < minor:
        # keep l >= w; the covariance is unchanged by the relabeling
        major, minor = minor, major
        theta = wrap_angle(theta + math.pi / 2.0)
    A = rotation(theta)
    R = A @ np.diag([(major / 2.0) ** 2, (minor / 2.0) ** 2]) @ A.T
    R = 0.5 * (R + R.T)
    return ScatterEllipse(chi=(chi[0], chi[1]), theta=theta, l=major, w=minor, R=R)


def sample_geo_scatterer(ellipse: ScatterEllipse, rng: np.random.Generator, size=None) -> np.ndarray:
    """Gaussian scatterer positions around the ellipse center with covariance ``R``."""
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    axes = rotation(ellipse.theta) * np.array([ellipse.l / 2.0, ellipse.w / 2.0])
    zeta = rng.standard_normal(shape + (2,)) @ axes.T
    return ellipse.center + zeta


def sample_ideal_scatterer(
    p,
    a,
    b,
    w,
    phi,
    omega: float,
    rng: np.random.Generator,
    size: int | None = None,
    orientation=0.0,
) -> np.ndarray:
    """Scatterers on the object outline within the sector of width ``omega`` about ``phi``.

    The outline is an ellipse with semi-axes ``a`` (along ``orientation``) and
    ``b`` centered at ``p``. Polar angles are uniform over the sector; each
    boundary point is pushed along the outward normal by N(0, (w/2)^2).

    All geometric arguments broadcast against each other (``p`` with a trailing
    axis of 2). With ``size`` given, an extra sample axis is inserted before the
    coordinate axis, so the result has shape ``batch + (size, 2)``.
    """
    p = np.asarray(p, dtype=float)
    a, b, w, phi, orientation = (np.asarray(v, dtype=float) for v in (a, b, w, phi, orientation))
    batch = np.broadcast_shapes(p.shape[:-1], a.shape, b.shape, w.shape, phi.shape, orientation.shape)
    if size is None:
        sample_shape, expand = batch, (lambda v: v)
    else:
        sample_shape, expand = batch + (size,), (lambda v: np.expand_dims(v, -1))
    a, b, w, phi, orientation = (expand(np.broadcast_to(v, batch)) for v in (a, b, w, phi, orientation))

    psi = phi + omega * (rng.random(sample_shape) - 0.5)
    body = psi - orientation
    cb, sb = np.cos(body), np.sin(body)
    rho = a * b / np.sqrt((b * cb) ** 2 + (a * sb) ** 2)
    bx, by = rho * cb, rho * sb
    nx, ny = bx / a**2, by / b**2
    norm = np.hypot(nx, ny)
    jitter = 0.5 * w * rng.standard_normal(sample_shape) / norm
    bx, by = bx + jitter * nx, by + jitter * ny
    co, so = np.cos(orientation), np.sin(orientation)
    offset = np.stack([co * bx - so * by, so * bx + co * by], axis=-1)
    center = p if size is None else np.expand_dims(p, -2)
    return center + offset


def sample_ideal_from_extent(
    p, Xi: ExtentIdeal, phi: float, omega: float, rng, size=None, orientation: float = 0.0
) -> np.ndarray:
    return sample_ideal_scatterer(p, Xi.a, Xi.b, Xi.w, phi, omega, rng, size=size, orientation=orientation)


def ellipse_batch(p: np.ndarray, r: np.ndarray, w: np.ndarray, anchor_pos, omega: float, aspect_sign: str = FACING):
    """Vectorized ellipse geometry for many object states toward one anchor.

    Returns ``(chi, axis_major, axis_minor)`` where the axis arrays hold the
    principal-axis square-root columns of ``R`` (vectors of length l/2 and w/2).
    The l >= w relabeling is skipped: it does not change ``R`` or its
    principal square root.
    """
    _check_sign(aspect_sign)
    delta = np.asarray(anchor_pos, dtype=float) - p
    if aspect_sign == LITERAL:
        delta = -delta
    dist = np.hypot(delta[..., 0], delta[..., 1])
    if np.any(dist == 0.0):
        raise DegenerateGeometryError("object center coincides with an anchor")
    u = delta / dist[..., None]
    chi = p + r[..., None] * u
    tangent = np.stack([-u[..., 1], u[..., 0]], axis=-1)
    half_l = 0.5 * r * math.sin(omega / 2.0)
    axis_major = half_l[..., None] * tangent
    axis_minor = (-0.5 * w)[..., None] * u
    return chi, axis_major, axis_minor
