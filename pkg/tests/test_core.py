import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eotrack.core import (
    Anchor,
    AugmentedState,
    BiasState,
    DegenerateGeometryError,
    ExtentGeo,
    ExtentIdeal,
    KinematicState,
    Measurement,
    MeasurementFrame,
    SceneConstants,
    check_anchors,
    device_position,
    device_positions,
    wrap_angle,
)

coords = st.floats(-50, 50, allow_nan=False)
angles = st.floats(-10, 10, allow_nan=False)
ranges = st.floats(0, 5, allow_nan=False)


def test_zero_bias_is_center():
    x = KinematicState((0.0, 0.0))
    assert np.allclose(device_position(x, BiasState(0.0, 1.234)), [0.0, 0.0])


def test_unit_offset_along_x():
    assert np.allclose(device_position(KinematicState((1.0, 2.0)), BiasState(1.0, 0.0)), [2.0, 2.0])


def test_reproduction_bias():
    m = device_position(KinematicState((0.0, 0.0)), BiasState(0.32, -math.pi / 3))
    assert m == pytest.approx([0.16, -0.27713], abs=1e-4)


@given(coords, coords, ranges, angles)
def test_offset_length_equals_range(px, py, rho, phi):
    m = device_position(KinematicState((px, py)), BiasState(rho, phi))
    assert abs(np.hypot(*(m - [px, py])) - rho) < 1e-12 * max(1.0, abs(px) + abs(py))


@given(coords, coords, ranges, angles, st.floats(-math.pi, math.pi))
def test_rotation_equivariance(px, py, rho, phi, psi):
    c, s = math.cos(psi), math.sin(psi)
    rot = np.array([[c, -s], [s, c]])
    m = device_position(KinematicState((px, py)), BiasState(rho, phi))
    p_rot = rot @ [px, py]
    m_rot = device_position(KinematicState(p_rot), BiasState(rho, phi + psi))
    assert np.allclose(m_rot, rot @ m, atol=1e-9)


def test_batch_device_positions_match_scalar():
    rng = np.random.default_rng(0)
    states = rng.normal(size=(20, 8))
    states[:, 4] = np.abs(states[:, 4])
    states[:, 6:] = np.abs(states[:, 6:]) + 0.1
    batch = device_positions(states)
    for row, m in zip(states, batch):
        y = AugmentedState.from_array(row)
        assert np.allclose(device_position(y.x, y.b), m)


@pytest.mark.parametrize("angle, expected", [(math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi, math.pi), (0.5, 0.5), (-0.5, -0.5), (2 * math.pi + 0.1, 0.1)])
def test_wrap_angle(angle, expected):
    assert wrap_angle(angle) == pytest.approx(expected)


def test_bias_angle_normalized():
    assert BiasState(0.1, 2 * math.pi + 0.2).b_phi == pytest.approx(0.2)
    assert BiasState(0.1, -math.pi).b_phi == pytest.approx(math.pi)


@pytest.mark.parametrize(
    "build",
    [
        lambda: BiasState(-0.1, 0.0),
        lambda: ExtentGeo(0.0, 0.1),
        lambda: ExtentGeo(0.3, -0.1),
        lambda: ExtentIdeal(0.2, 0.3, 0.1),
        lambda: KinematicState((math.nan, 0.0)),
        lambda: SceneConstants(omega=4.0),
        lambda: SceneConstants(d_max=0.0),
    ],
)
def test_invalid_values_rejected(build):
    with pytest.raises(ValueError):
        build()


def test_anchor_positions_must_differ():
    with pytest.raises(DegenerateGeometryError):
        check_anchors([Anchor(1, (0.0, 0.0)), Anchor(2, (0.0, 0.0))])


def test_augmented_state_round_trip():
    y = AugmentedState(KinematicState((1, 2), (3, 4)), BiasState(0.3, -1.0), ExtentGeo(0.2, 0.1))
    assert AugmentedState.from_array(y.as_array()) == y


def test_frame_count_and_support():
    consts = SceneConstants()
    frame = MeasurementFrame(1, {1: [Measurement(1.0, 3.0)]}, {(1, 2): [Measurement(2.0, 3.0)] * 2})
    assert frame.count() == 3
    assert consts.in_support(Measurement(1.0, 3.0))
    assert not consts.in_support(Measurement(21.0, 3.0))
    assert not consts.in_support(Measurement(1.0, 1.0))
