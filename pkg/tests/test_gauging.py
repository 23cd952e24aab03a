import numpy as np
import numpy.testing as npt
import pytest

from gaussgauge import (
    GaussianChannel,
    GaussianGenerator,
    SmoothingMap,
    StabilityError,
    compose,
    cp_check,
    default_gauge_times,
    gauge_channel,
    gauge_semigroup,
    nm_channel,
    NmFamilyParams,
    semigroup_channel,
    similarity_spectrum_check,
    squeezed_generator,
    SqueezedReservoirParams,
    thermal_loss_channel,
)
from gaussgauge.verify import random_hurwitz, random_psd, random_stable_channel


class TestSmoothingMap:
    def test_forward_then_inverse_is_identity_exactly(self, rng):
        s = random_psd(rng, 4)
        smoothing = SmoothingMap(s)
        round_trip = compose(smoothing.inverse(), smoothing.forward())
        npt.assert_array_equal(round_trip.X, np.eye(4))
        npt.assert_array_equal(round_trip.Y, np.zeros((4, 4)))
        npt.assert_array_equal(round_trip.delta, np.zeros(4))

    def test_inverse_map_is_generically_not_cp(self, rng):
        for _ in range(100):
            s = random_psd(rng, 2) + 0.05 * np.eye(2)  # strictly positive
            report = cp_check(SmoothingMap(s).inverse())
            assert not report.passes


class TestGaugeChannel:
    def test_attenuator(self):
        ch = thermal_loss_channel(0.5)
        result = gauge_channel(ch)
        npt.assert_allclose(result.S.S, 0.5 * np.eye(2), atol=1e-14)
        npt.assert_array_equal(result.gauged.X, ch.X)
        npt.assert_array_equal(result.gauged.Y, np.zeros((2, 2)))
        assert result.residual_Y <= 1e-15
        assert not result.gauged.physical

    def test_zero_diffusion_unchanged(self):
        ch = GaussianChannel(X=0.5 * np.eye(2), Y=np.zeros((2, 2)), delta=[0.1, 0.2])
        result = gauge_channel(ch)
        npt.assert_array_equal(result.S.S, np.zeros((2, 2)))
        npt.assert_array_equal(result.gauged.X, ch.X)
        npt.assert_array_equal(result.gauged.delta, ch.delta)
        assert result.residual_Y == 0.0

    def test_jordan_channel_cross_module_value(self):
        x = 0.5 * (np.eye(2) + 0.6 * np.array([[0.0, 1.0], [0.0, 0.0]]))
        ch = GaussianChannel(X=x, Y=np.eye(2), delta=np.zeros(2))
        result = gauge_channel(ch)
        npt.assert_allclose(
            result.S.S, [[8.0 / 5.0, 4.0 / 15.0], [4.0 / 15.0, 4.0 / 3.0]], atol=1e-13
        )

    def test_residual_bound_and_bitwise_parameters(self, rng):
        for _ in range(300):
            modes = int(rng.integers(1, 4))
            ch = random_stable_channel(rng, modes)
            result = gauge_channel(ch)
            assert result.residual_Y <= 1e-9 * (1.0 + np.abs(ch.Y).max())
            assert np.array_equal(ch.X, result.gauged.X)
            assert np.array_equal(ch.delta, result.gauged.delta)

    def test_unstable_rejected(self):
        ch = GaussianChannel(X=1.01 * np.eye(2), Y=np.eye(2), delta=np.zeros(2))
        with pytest.raises(StabilityError):
            gauge_channel(ch)


class TestGaugeSemigroup:
    def test_thermal_damping(self):
        kappa, nbar = 1.2, 0.3
        gen = GaussianGenerator(
            A=-0.5 * kappa * np.eye(2),
            D=0.5 * kappa * (2 * nbar + 1) * np.eye(2),
            u=np.zeros(2),
        )
        result = gauge_semigroup(gen, times=[0.0, 0.1, 1.0, 10.0])
        npt.assert_allclose(result.S.S, 0.5 * (2 * nbar + 1) * np.eye(2), atol=1e-13)
        assert result.max_residual <= 1e-10

    def test_zero_diffusion(self, rng):
        gen = GaussianGenerator(A=random_hurwitz(rng, 4), D=np.zeros((4, 4)), u=np.zeros(4))
        result = gauge_semigroup(gen)
        npt.assert_array_equal(result.S.S, np.zeros((4, 4)))
        assert result.max_residual == 0.0

    def test_squeezed_ep_point(self):
        gen = squeezed_generator(SqueezedReservoirParams(kappa=2.0, delta=1.0, epsilon=1.0))
        times = np.geomspace(1e-3, 10.0, 20)
        result = gauge_semigroup(gen, times)
        npt.assert_allclose(result.S.S, [[0.5, -0.5], [-0.5, 1.5]], atol=1e-12)
        assert result.max_residual <= 1e-9

    def test_uniform_in_time_residual(self, rng):
        worst = 0.0
        for _ in range(60):
            modes = int(rng.integers(1, 3))
            gen = GaussianGenerator(
                A=random_hurwitz(rng, 2 * modes),
                D=random_psd(rng, 2 * modes),
                u=rng.standard_normal(2 * modes),
            )
            result = gauge_semigroup(gen, default_gauge_times(gen.A, count=20))
            worst = max(worst, result.max_residual)
        assert worst <= 1e-8

    def test_non_hurwitz_rejected(self):
        gen = GaussianGenerator(A=np.eye(2), D=np.eye(2), u=np.zeros(2))
        with pytest.raises(StabilityError):
            gauge_semigroup(gen)

    def test_diffusion_is_time_derivative_of_y_at_zero(self, rng):
        # finite-difference dY_t/dt at t = 0 recovers D
        gen = GaussianGenerator(
            A=random_hurwitz(rng, 4), D=random_psd(rng, 4), u=np.zeros(4)
        )
        h = 1e-4
        y_h = semigroup_channel(gen, h).Y
        y_2h = semigroup_channel(gen, 2 * h).Y
        derivative = (4.0 * y_h - y_2h) / (2.0 * h)
        npt.assert_allclose(derivative, gen.D, atol=1e-6)


class TestSimilaritySpectrumCheck:
    def test_drift_bitwise_for_random_channels(self, rng):
        for _ in range(100):
            modes = int(rng.integers(1, 4))
            report = similarity_spectrum_check(random_stable_channel(rng, modes))
            assert report.x_bitwise_unchanged
            assert report.delta_bitwise_unchanged
            assert report.eigenvalue_deviation <= 1e-13
            assert report.jordan_match

    def test_defective_verdict_preserved_on_ep_channel(self):
        params = NmFamilyParams(lam=0.7, omega=0.7)
        ch = nm_channel(params, 1.0)
        report = similarity_spectrum_check(ch)
        assert report.jordan_before.defective
        assert report.jordan_after.defective
        assert report.jordan_match

    def test_identity_like_channel_not_defective(self):
        report = similarity_spectrum_check(thermal_loss_channel(0.7, 0.1))
        assert not report.jordan_before.defective
        assert report.jordan_match
