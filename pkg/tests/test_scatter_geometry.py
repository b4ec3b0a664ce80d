import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eotrack.core import Anchor, DegenerateGeometryError, ExtentGeo
from eotrack.scatter_geometry import (
    aspect_angle,
    build_ellipse,
    ellipse_batch,
    ellipse_center,
    ellipse_orientation,
    rotation,
    sample_geo_scatterer,
    sample_ideal_scatterer,
    semi_major_axis,
)

OMEGA = 2 * math.pi / 3


@pytest.mark.parametrize(
    "p, anchor, expected",
    [((0, 0), (1, 0), 0.0), ((0, 0), (0, 5), math.pi / 2), ((1, 1), (4, 4.5), 0.86217)],
)
def test_aspect_angle(p, anchor, expected):
    assert aspect_angle(p, Anchor(1, anchor)) == pytest.approx(expected, abs=1e-5)


def test_aspect_angle_literal_points_away():
    assert aspect_angle((0, 0), Anchor(1, (1, 0)), "literal") == pytest.approx(math.pi)


def test_aspect_angle_coincident():
    with pytest.raises(DegenerateGeometryError):
        aspect_angle((2.0, 3.0), Anchor(1, (2.0, 3.0)))


def test_ellipse_center():
    assert ellipse_center((0, 0), 0.3, 0.0) == pytest.approx([0.3, 0.0])
    assert ellipse_center((2, 2), 0.3, math.pi) == pytest.approx([1.7, 2.0])


@given(st.floats(0.01, 3), st.floats(-4, 4))
def test_center_on_circle(r, phi):
    p = np.array([1.5, -2.0])
    assert abs(np.linalg.norm(ellipse_center(p, r, phi) - p) - r) < 1e-12


def test_semi_major_axis_values():
    assert semi_major_axis(0.3, math.pi) == pytest.approx(0.3)
    assert semi_major_axis(0.3, OMEGA) == pytest.approx(0.25981, abs=1e-5)


def test_semi_major_axis_monotone():
    omegas = np.linspace(1e-4, math.pi, 200)
    assert np.all(np.diff(semi_major_axis(0.3, omegas)) > 0)
    assert np.all(np.diff(semi_major_axis(np.linspace(0.01, 2, 50), OMEGA)) > 0)
    assert semi_major_axis(0.3, 1e-9) < 1e-9


def test_orientation_is_tangent():
    assert ellipse_orientation(0.0) == pytest.approx(math.pi / 2)
    assert ellipse_orientation(math.pi / 2) == pytest.approx(math.pi)
    for phi in np.linspace(-3, 3, 13):
        theta = ellipse_orientation(phi)
        assert abs(math.cos(theta) * math.cos(phi) + math.sin(theta) * math.sin(phi)) < 1e-12


def test_build_ellipse_example():
    e = build_ellipse((0.0, 0.0), ExtentGeo(0.3, 0.1), Anchor(1, (10.0, 0.0)), OMEGA)
    assert e.chi == pytest.approx((0.3, 0.0))
    assert abs(e.theta) == pytest.approx(math.pi / 2)
    assert e.l == pytest.approx(0.25981, abs=1e-5)
    assert e.w == 0.1


extents = st.builds(ExtentGeo, st.floats(0.01, 2.0), st.floats(0.005, 1.0))
points = st.tuples(st.floats(-20, 20), st.floats(-20, 20))


@given(points, extents, st.floats(0.05, math.pi), st.floats(-math.pi, math.pi), st.floats(0.5, 30))
def test_ellipse_invariants(p, X, omega, bearing, dist):
    anchor = Anchor(1, (p[0] + dist * math.cos(bearing), p[1] + dist * math.sin(bearing)))
    e = build_ellipse(p, X, anchor, omega)
    assert e.l >= e.w > 0
    assert abs(np.linalg.norm(e.center - p) - X.r) < 1e-12 * max(1.0, np.abs(p).max())
    assert np.allclose(e.R, e.R.T)
    evals, evecs = np.linalg.eigh(e.R)
    assert evals == pytest.approx([(e.w / 2) ** 2, (e.l / 2) ** 2], abs=1e-9)
    if e.l - e.w > 1e-3:
        major = evecs[:, 1]
        assert abs(abs(major @ [math.cos(e.theta), math.sin(e.theta)]) - 1) < 1e-9


def test_axes_swap_when_width_exceeds_chord():
    e = build_ellipse((0, 0), ExtentGeo(0.05, 0.3), Anchor(1, (5, 0)), OMEGA)
    assert e.l == 0.3 and e.w == pytest.approx(0.05 * math.sin(math.pi / 3))
    # major axis now points along the bearing, not the tangent
    assert abs(math.cos(e.theta)) == pytest.approx(1.0)


def test_rotation_and_translation_equivariance():
    rng = np.random.default_rng(1)
    for _ in range(100):
        p = rng.uniform(-5, 5, 2)
        a = rng.uniform(-10, 10, 2)
        if np.linalg.norm(a - p) < 0.5:
            continue
        X = ExtentGeo(rng.uniform(0.05, 1.0), rng.uniform(0.01, 0.3))
        psi = rng.uniform(-math.pi, math.pi)
        shift = rng.uniform(-10, 10, 2)
        Q = rotation(psi)
        e = build_ellipse(p, X, Anchor(1, a), OMEGA)
        e_rot = build_ellipse(Q @ p, X, Anchor(1, Q @ a), OMEGA)
        assert np.allclose(e_rot.center, Q @ e.center, atol=1e-12)
        assert np.allclose(e_rot.R, Q @ e.R @ Q.T, atol=1e-12)
        assert math.cos(e_rot.theta - e.theta - psi) == pytest.approx(1.0) or math.cos(e_rot.theta - e.theta - psi) == pytest.approx(-1.0)
        e_sh = build_ellipse(p + shift, X, Anchor(1, a + shift), OMEGA)
        assert np.allclose(e_sh.center, e.center + shift, atol=1e-12)
        assert np.allclose(e_sh.R, e.R, atol=1e-12)


def test_batch_geometry_matches_scalar():
    rng = np.random.default_rng(2)
    p = rng.uniform(-3, 3, (50, 2))
    r = rng.uniform(0.05, 0.8, 50)
    w = rng.uniform(0.01, 0.5, 50)
    anchor = Anchor(1, (4.0, 4.5))
    chi, ax1, ax2 = ellipse_batch(p, r, w, anchor.xy, OMEGA)
    for i in range(50):
        e = build_ellipse(p[i], ExtentGeo(r[i], w[i]), anchor, OMEGA)
        assert np.allclose(chi[i], e.center)
        R = np.outer(ax1[i], ax1[i]) + np.outer(ax2[i], ax2[i])
        assert np.allclose(R, e.R, atol=1e-14)


def test_geo_scatterer_moments():
    e = build_ellipse((1.0, 2.0), ExtentGeo(0.3, 0.1), Anchor(1, (4, 4.5)), OMEGA)
    n = 100_000
    q = sample_geo_scatterer(e, np.random.default_rng(3), size=n)
    sd = np.sqrt(np.diag(e.R))
    assert np.all(np.abs(q.mean(axis=0) - e.center) < 3 * sd / math.sqrt(n))
    cov = np.cov(q.T)
    assert np.linalg.norm(cov - e.R) < 0.05 * np.linalg.norm(e.R)


def test_geo_scatterer_rank_one_limit():
    e = build_ellipse((0.0, 0.0), ExtentGeo(0.3, 1e-12), Anchor(1, (10, 0)), OMEGA)
    q = sample_geo_scatterer(e, np.random.default_rng(4), size=1000)
    # major axis is vertical through chi = (0.3, 0)
    assert np.allclose(q[:, 0], 0.3, atol=1e-10)


def test_ideal_circle_limit():
    rng = np.random.default_rng(5)
    q = sample_ideal_scatterer((1.0, -1.0), 0.3, 0.3, 1e-12, 0.4, OMEGA, rng, size=2000)
    rel = q - [1.0, -1.0]
    assert np.allclose(np.hypot(rel[:, 0], rel[:, 1]), 0.3, atol=1e-10)
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    assert np.all(np.abs(ang - 0.4) <= OMEGA / 2 + 1e-12)


def test_ideal_sector_bounds():
    rng = np.random.default_rng(6)
    phi = 2.0
    q = sample_ideal_scatterer((0.0, 0.0), 0.3, 0.2, 1e-9, phi, OMEGA, rng, size=10_000)
    ang = np.angle(np.exp(1j * (np.arctan2(q[:, 1], q[:, 0]) - phi)))
    assert np.all(np.abs(ang) <= math.pi / 3 + 1e-9)
    # points lie on the ellipse x^2/a^2 + y^2/b^2 = 1
    assert np.allclose((q[:, 0] / 0.3) ** 2 + (q[:, 1] / 0.2) ** 2, 1.0, atol=1e-7)
    # with the reproduction width the normal jitter rarely leaves the sector by much
    q = sample_ideal_scatterer((0.0, 0.0), 0.3, 0.2, 0.1, phi, OMEGA, rng, size=10_000)
    ang = np.angle(np.exp(1j * (np.arctan2(q[:, 1], q[:, 0]) - phi)))
    assert np.mean(np.abs(ang) <= math.pi / 3 + 0.3) > 0.99


def test_ideal_radial_spread():
    rng = np.random.default_rng(7)
    q = sample_ideal_scatterer((0.0, 0.0), 0.3, 0.3, 0.1, 0.0, OMEGA, rng, size=100_000)
    spread = np.hypot(q[:, 0], q[:, 1]) - 0.3
    assert spread.std() == pytest.approx(0.05, rel=0.02)
    assert abs(spread.mean()) < 1e-3


def test_ideal_sampler_broadcasts():
    rng = np.random.default_rng(8)
    p = rng.normal(size=(7, 2))
    q = sample_ideal_scatterer(p, np.full(7, 0.3), np.full(7, 0.3), 0.1, np.zeros(7), OMEGA, rng, size=11)
    assert q.shape == (7, 11, 2)
    assert sample_ideal_scatterer((0, 0), 0.3, 0.2, 0.1, 0.0, OMEGA, rng).shape == (2,)
