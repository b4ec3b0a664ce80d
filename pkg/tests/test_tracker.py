import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eotrack.core import B_PHI, AugmentedState, Measurement, MeasurementFrame, device_positions
from eotrack.likelihoods import (
    active_pseudo_lr,
    bistatic_distance,
    normal_pdf,
    passive_pseudo_lr,
    ranging_variance,
)
from eotrack.motion import init_prior
from eotrack.scenario import Scenario
from eotrack.synthesis import simulate
from eotrack.tracker import (
    DegeneracyError,
    MethodVariant,
    ParticleSet,
    TrackOutput,
    frame_log_likelihood,
    mmse_estimate,
    parse_variant,
    resample,
    run_filter,
    systematic_indices,
    update,
)

SC = Scenario()


def _states(n, seed):
    return init_prior((0.0, 0.0), n, np.random.default_rng(seed), SC.prior)


def _frame(seed, n_active=4, n_passive=3):
    rng = np.random.default_rng(seed)
    active = {j: [Measurement(rng.uniform(2, 12), rng.uniform(2, 30)) for _ in range(n_active)] for j in (1, 3)}
    passive = {pair: [Measurement(rng.uniform(8, 16), rng.uniform(2, 30)) for _ in range(n_passive)] for pair in [(1, 2), (3, 1)]}
    return MeasurementFrame(1, active, passive)


@pytest.mark.parametrize("name, kind", [("geo", "geo"), ("idl", "ideal"), ("AP-EOPDA(idl)", "ideal"), ("A-EOPDA", "active"), ("ap-pda", "pda")])
def test_parse_variant(name, kind):
    assert parse_variant(name).kind == kind


def test_unknown_variant():
    with pytest.raises(ValueError):
        parse_variant("kalman")
    with pytest.raises(ValueError):
        MethodVariant("geo", ideal_samples=0)


def test_ess():
    assert ParticleSet.uniform(_states(10, 0)).ess() == pytest.approx(10)
    w = np.zeros(10)
    w[3] = 1
    assert ParticleSet(_states(10, 0), w).ess() == pytest.approx(1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=60).filter(lambda w: sum(w) > 1e-6), st.integers(0, 1000))
def test_systematic_counts_bounded(raw, seed):
    w = np.array(raw) / sum(raw)
    idx = systematic_indices(w, np.random.default_rng(seed))
    counts = np.bincount(idx, minlength=len(w))
    n = len(w)
    assert counts.sum() == n
    assert np.all(counts >= np.floor(n * w) - 1e-9 - 1) and np.all(counts <= np.ceil(n * w) + 1)
    assert np.all(counts[w == 0] == 0)


def test_resample_threshold():
    ps = ParticleSet.uniform(_states(100, 1))
    assert resample(ps, 0.5, np.random.default_rng(0)) is ps
    w = np.full(100, 1e-6)
    w[0] = 1.0
    ps = ParticleSet(ps.states, w / w.sum())
    out = resample(ps, 0.5, np.random.default_rng(0))
    assert np.allclose(out.weights, 0.01)
    assert np.all(out.states == ps.states[0])


def test_mmse_circular_bias_angle():
    states = _states(2, 2)
    states[:, B_PHI] = [math.pi - 0.1, -math.pi + 0.1]
    est = mmse_estimate(ParticleSet.uniform(states))
    assert abs(abs(est.state[B_PHI]) - math.pi) < 1e-9


def test_mmse_device_is_weighted_mean():
    states = _states(50, 3)
    w = np.random.default_rng(0).random(50)
    ps = ParticleSet(states, w / w.sum())
    assert mmse_estimate(ps).device == pytest.approx((w / w.sum()) @ device_positions(states))


@pytest.mark.parametrize("kind", ["geo", "active", "pda"])
@pytest.mark.parametrize("model_scatter", [True, False])
def test_batch_loglik_matches_scalar_reference(kind, model_scatter):
    sc = SC.with_(active_scatter_model=model_scatter)
    states = _states(8, 4)
    frame = _frame(5)
    variant = MethodVariant(kind)
    ll = frame_log_likelihood(states, frame, sc, variant, np.random.default_rng(0))
    for i, row in enumerate(states):
        y = AugmentedState.from_array(row)
        ref = 0.0
        for j, zs in frame.active.items():
            for z in zs:
                if kind == "pda":
                    r = active_pseudo_lr(z, y, sc.anchor(j), sc.constants, model_scatter=False)
                    r *= 1.0 + (sc.constants.mu_m if model_scatter else 0.0)
                else:
                    r = active_pseudo_lr(z, y, sc.anchor(j), sc.constants, sc.mu_los, model_scatter, sc.ut)
                ref += math.log1p(r)
        if kind != "active":
            for (j, jt), zs in frame.passive.items():
                for z in zs:
                    if kind == "geo":
                        r = passive_pseudo_lr(z, y, sc.anchor(jt), sc.anchor(j), sc.constants, sc.ut)
                    else:
                        m = row[:2] + y.b.offset()
                        mean = bistatic_distance(m, sc.anchor(jt).xy, sc.anchor(j).xy)
                        f = normal_pdf(z.d, mean, ranging_variance(z.u))
                        r = sc.constants.mu_m * f * sc.constants.d_max / sc.constants.mu_c
                    ref += math.log1p(r)
        assert ll[i] == pytest.approx(ref, rel=1e-10)


def test_ideal_loglik_finite_and_seeded():
    states = _states(20, 6)
    frame = _frame(7)
    v = MethodVariant("ideal", 30)
    a = frame_log_likelihood(states, frame, SC, v, np.random.default_rng(1))
    b = frame_log_likelihood(states, frame, SC, v, np.random.default_rng(1))
    assert np.all(np.isfinite(a)) and np.array_equal(a, b)
    assert np.all(a >= 0.0)


def test_empty_frame_leaves_weights():
    ps = ParticleSet.uniform(_states(10, 8))
    out = update(ps, MeasurementFrame(1), SC, MethodVariant("geo"), np.random.default_rng(0))
    assert np.allclose(out.weights, ps.weights)


def test_degenerate_update_raises():
    states = _states(5, 9)
    states[:, 0] = np.nan
    with pytest.raises(DegeneracyError):
        update(ParticleSet.uniform(states), _frame(1), SC, MethodVariant("geo"), np.random.default_rng(0))


def test_run_filter_deterministic_and_finite():
    sc = SC.with_(n_steps=25)
    truth, frames = simulate(sc, 3)
    a = run_filter(frames, sc, MethodVariant("geo"), 200, 42)
    b = run_filter(frames, sc, MethodVariant("geo"), 200, 42)
    assert np.array_equal(a.device, b.device) and np.array_equal(a.states, b.states)
    assert a.device.shape == (25, 2) and np.all(np.isfinite(a.states))
    assert np.all((a.ess >= 1.0) & (a.ess <= 200.0 + 1e-9))
    # a measurement far outside any particle's reach still leaves finite weights
    frames[5].active[1] = [Measurement(19.9, 1e6)]
    c = run_filter(frames, sc, MethodVariant("geo"), 200, 42)
    assert np.all(np.isfinite(c.device))


def test_pda_freezes_extent():
    sc = SC.with_(n_steps=10)
    _, frames = simulate(sc, 1)
    out = run_filter(frames, sc, MethodVariant("pda"), 100, 0)
    assert np.allclose(out.states[:, 6], 0.3) and np.allclose(out.states[:, 7], 0.11)


def test_track_csv_round_trip(tmp_path):
    sc = SC.with_(n_steps=6)
    _, frames = simulate(sc, 2)
    out = run_filter(frames, sc, MethodVariant("active"), 50, 0)
    out.write_csv(tmp_path / "t.csv")
    back = TrackOutput.read_csv(tmp_path / "t.csv", out.variant)
    assert np.array_equal(back.states, out.states)
    assert np.array_equal(back.device, out.device)
    assert np.array_equal(back.ess, out.ess)


def test_run_filter_rejects_zero_particles():
    with pytest.raises(ValueError):
        run_filter([], SC, MethodVariant("geo"), 0, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["geo", "ideal", "active", "pda"]))
def test_weights_stay_probability_vector(seed, kind):
    rng = np.random.default_rng(seed)
    ps = ParticleSet.uniform(_states(64, seed))
    for k in range(3):
        ps = update(ps, _frame(seed + k), SC, MethodVariant(kind, 10), rng)
        assert abs(ps.weights.sum() - 1.0) < 1e-9 and np.all(ps.weights >= 0.0)
        ps = resample(ps, 0.5, rng)
        assert abs(ps.weights.sum() - 1.0) < 1e-9 and np.all(ps.weights >= 0.0)


def test_active_only_ignores_passive_records():
    sc = SC.with_(n_steps=20)
    _, frames = simulate(sc, 4)
    rng = np.random.default_rng(0)
    corrupted = [
        MeasurementFrame(f.n, f.active, {(2, 3): [Measurement(float(rng.uniform(0, 20)), 5.0) for _ in range(7)]})
        for f in frames
    ]
    a = run_filter(frames, sc, MethodVariant("active"), 100, 1)
    b = run_filter(corrupted, sc, MethodVariant("active"), 100, 1)
    assert np.array_equal(a.states, b.states)
