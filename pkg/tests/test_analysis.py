import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import j0, jn_zeros

from csa_sim.analysis import (
    ZeroMagnitudeWarning,
    analyze_trace,
    compare_modes,
    estimate_rice_k,
    fade_depth,
    segment_static,
    spatial_autocorr,
    trace_autocorr,
    wrap_phase,
)
from csa_sim.errors import InsufficientDataError, InvalidInputError, InvalidParameterError
from csa_sim.experiment import ChannelTrace, run_mode
from csa_sim.field import FieldParams, synthesize_field
from csa_sim.kinematics import AntennaMount, counter_movement, linear_trajectory
from csa_sim.model import PiecewiseStaticModel, RiceInitial, generate_model_trace


def rice_draws(k, omega, size, seed):
    return np.abs(RiceInitial(k, omega).draw(np.random.default_rng(seed), size))


class TestFadeDepth:
    def test_constant(self):
        assert fade_depth(np.full(10, 0.3 + 0.1j)) == 0.0

    def test_twenty_db(self):
        assert fade_depth([1.0, 0.1, 1.0]) == pytest.approx(20.0)

    def test_zero_sample(self):
        with pytest.warns(ZeroMagnitudeWarning):
            assert math.isinf(fade_depth([1.0, 0.0]))

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            fade_depth([])

    @given(
        st.lists(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3), min_size=1, max_size=30),
        st.floats(1e-3, 1e3),
        st.floats(0, 2 * math.pi),
    )
    def test_scale_invariant(self, h, gain, phase):
        h = np.array(h)
        c = gain * cmath.exp(1j * phase)
        assert fade_depth(c * h) == pytest.approx(fade_depth(h), abs=1e-9)


class TestWrapPhase:
    def test_values(self):
        np.testing.assert_allclose(wrap_phase([-1.0 + 0j]), [math.pi])
        np.testing.assert_array_equal(wrap_phase([1.0 + 0j]), [0.0])
        assert wrap_phase([cmath.exp(1j * (2 * math.pi + 0.3))])[0] == pytest.approx(0.3, abs=1e-12)

    def test_zero(self):
        with pytest.warns(ZeroMagnitudeWarning):
            assert wrap_phase([0j])[0] == 0.0

    def test_tiny_negative_angle(self):
        assert wrap_phase([complex(1.0, -1e-300)])[0] < 2 * math.pi

    @given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False), min_size=1))
    def test_range(self, h):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroMagnitudeWarning)
            p = wrap_phase(h)
        assert np.all((p >= 0) & (p < 2 * math.pi))


class TestSegmentation:
    def test_noiseless_csa_recovers_log(self):
        field = synthesize_field(FieldParams(seed=4))
        traj = linear_trajectory(6.0, 0.05)
        mount = AntennaMount()
        tr = run_mode(field, traj, mount, "csa")
        assert segment_static(tr, 1e-6) == counter_movement(traj, mount).boundaries()

    def test_constant(self):
        assert segment_static(np.full(50, 1 + 1j), 1e-6) == [0]

    def test_bad_epsilon(self):
        with pytest.raises(InvalidParameterError):
            segment_static([1.0], 0.0)

    def test_model_trace_recovery_rate(self):
        sigma = 0.01
        found = total = 0
        for seed in range(100):
            tr = generate_model_trace(PiecewiseStaticModel(0.5, RiceInitial(0.0), sigma, seed=seed), 6.0, 0.05)
            truth = set(tr.boundaries())
            got = set(segment_static(tr, 5 * sigma))
            found += len(truth & got)
            total += len(truth)
        assert found / total >= 0.95

    @given(st.lists(st.integers(1, 15), min_size=1, max_size=12), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_exact_when_epsilon_below_gap(self, lengths, seed):
        rng = np.random.default_rng(seed)
        levels = rng.normal(size=len(lengths)) + 1j * rng.normal(size=len(lengths))
        h = np.repeat(levels, lengths)
        starts = np.concatenate([[0], np.cumsum(lengths)[:-1]]).tolist()
        gaps = np.abs(np.diff(levels))
        eps = 0.5 * gaps.min() if gaps.size else 1.0
        if gaps.size and eps == 0:
            return
        assert segment_static(h, eps) == starts


class TestRiceK:
    def test_constant_is_infinite(self):
        k, omega = estimate_rice_k(np.full(100, 0.7))
        assert math.isinf(k) and omega == pytest.approx(0.49)

    def test_rayleigh(self):
        k, omega = estimate_rice_k(rice_draws(0.0, 1.0, 100_000, seed=0))
        assert k <= 0.1
        assert omega == pytest.approx(1.0, rel=0.02)

    def test_rice_four(self):
        k, omega = estimate_rice_k(rice_draws(4.0, 1.0, 100_000, seed=0))
        assert k == pytest.approx(4.0, rel=0.10)

    def test_too_few(self):
        with pytest.raises(InsufficientDataError):
            estimate_rice_k([1.0])

    def test_negative(self):
        with pytest.raises(InvalidParameterError):
            estimate_rice_k([1.0, -1.0])

    @given(st.floats(0.01, 100.0), st.integers(0, 1000))
    @settings(max_examples=40)
    def test_scale_consistency(self, c, seed):
        r = rice_draws(2.0, 1.0, 500, seed)
        k1, o1 = estimate_rice_k(r)
        k2, o2 = estimate_rice_k(c * r)
        assert k2 == pytest.approx(k1, rel=1e-9)
        assert o2 == pytest.approx(c * c * o1, rel=1e-9)


@pytest.fixture(scope="module")
def bessel_lags():
    first_zero = jn_zeros(0, 1)[0] / (2 * math.pi)
    return dict(spatial_autocorr(FieldParams(0.0, 10_000), [0.5, first_zero], 100)), first_zero


class TestSpatialAutocorr:
    def test_zero_lag_is_one(self):
        [(d, c)] = spatial_autocorr(FieldParams(num_paths=64), [0.0], 3)
        assert d == 0.0 and c == 1.0

    def test_half_wavelength(self, bessel_lags):
        corr, _ = bessel_lags
        assert j0(math.pi) == pytest.approx(-0.3042, abs=1e-4)
        assert corr[0.5].real == pytest.approx(j0(math.pi), abs=0.05)

    def test_first_bessel_zero(self, bessel_lags):
        corr, d0 = bessel_lags
        assert d0 == pytest.approx(0.3827, abs=1e-4)
        assert abs(corr[d0].real) < 0.05

    def test_magnitude_bounded(self):
        for d, c in spatial_autocorr(FieldParams(2.0, 32, seed=3), np.linspace(0, 3, 13), 5):
            assert abs(c) <= 1 + 1e-9


@pytest.fixture(scope="module")
def traces():
    field = synthesize_field(FieldParams(seed=8))
    traj = linear_trajectory(6.0, 0.05)
    mount = AntennaMount()
    return {m: run_mode(field, traj, mount, m) for m in ("regular", "csa", "stationary")}


class TestCompareModes:
    def test_three_modes(self, traces):
        rows = {r.mode: r for r in compare_modes(traces.values())}
        assert rows["csa"].mean_interval_variance == 0.0
        assert rows["csa"].num_intervals == 12
        assert rows["stationary"].total_variation == 0.0
        assert rows["regular"].fade_depth_db > rows["csa"].max_interval_fade_db

    def test_single_stationary(self, traces):
        [row] = compare_modes([traces["stationary"]])
        assert row.fade_depth_db == 0.0 and row.total_variation == 0.0
        assert row.mean_interval_variance == 0.0 and row.max_interval_fade_db == 0.0

    def test_grid_mismatch(self, traces):
        other = run_mode(synthesize_field(FieldParams()), linear_trajectory(6.0, 0.1), AntennaMount(), "csa")
        with pytest.raises(InvalidInputError):
            compare_modes([traces["csa"], other])


class TestReport:
    def test_csa_report(self):
        tr = run_mode(synthesize_field(FieldParams(seed=2)), linear_trajectory(6.0, 0.05), AntennaMount(), "csa")
        rep = analyze_trace(tr)
        assert rep.num_intervals == 12
        assert all(s.variance == 0.0 for s in rep.intervals)
        assert rep.sigma_hat == 0.0
        assert rep.autocorr[0] == (0.0, 1 + 0j)
        assert all(abs(c) <= 1 + 1e-9 for _, c in rep.autocorr)

    def test_stationary_report(self):
        tr = run_mode(synthesize_field(FieldParams(seed=2)), linear_trajectory(6.0, 0.05), AntennaMount(), "stationary")
        rep = analyze_trace(tr)
        assert rep.fade_depth_db == 0.0 and rep.k_hat is None and rep.num_intervals == 1

    def test_segmented_report(self):
        tr = generate_model_trace(PiecewiseStaticModel(0.5, RiceInitial(1.0), 0.001, seed=1), 6.0, 0.05)
        rep = analyze_trace(tr, epsilon=0.005)
        assert rep.num_intervals == 12

    def test_trace_autocorr_lags(self):
        tr = generate_model_trace(PiecewiseStaticModel(seed=1), 1.0, 0.1)
        lags = [d for d, _ in trace_autocorr(tr, 50)]
        assert len(lags) == 11 and lags[1] == pytest.approx(0.1)
