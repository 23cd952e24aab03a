import numpy as np
import numpy.testing as npt
import pytest

from gaussgauge import (
    CpMethod,
    DimensionError,
    GaussianChannel,
    MomentState,
    NotGaugeableError,
    Ordering,
    apply_channel,
    compose,
    cp_check,
    displacement_gauge,
    identity_channel,
    reorder,
    symplectic_form,
    thermal_loss_channel,
    uncertainty_margin,
    vacuum_state,
)
from gaussgauge.verify import random_stable_channel, random_state


class TestSymplecticForm:
    def test_one_mode_grouped(self):
        npt.assert_array_equal(symplectic_form(1).matrix, [[0.0, 1.0], [-1.0, 0.0]])

    def test_two_modes_grouped_block_form(self):
        expected = np.zeros((4, 4))
        expected[:2, 2:] = np.eye(2)
        expected[2:, :2] = -np.eye(2)
        npt.assert_array_equal(symplectic_form(2).matrix, expected)

    def test_two_modes_interleaved_direct_sum(self):
        block = np.array([[0.0, 1.0], [-1.0, 0.0]])
        expected = np.block(
            [[block, np.zeros((2, 2))], [np.zeros((2, 2)), block]]
        )
        npt.assert_array_equal(symplectic_form(2, Ordering.INTERLEAVED).matrix, expected)

    @pytest.mark.parametrize("modes", [1, 2, 3])
    @pytest.mark.parametrize("ordering", list(Ordering))
    def test_antisymmetric_and_squares_to_minus_identity(self, modes, ordering):
        m = symplectic_form(modes, ordering).matrix
        npt.assert_array_equal(m, -m.T)
        npt.assert_array_equal(m @ m, -np.eye(2 * modes))

    def test_zero_modes_rejected(self):
        with pytest.raises(DimensionError):
            symplectic_form(0)


class TestReorder:
    def test_interleaved_form_maps_to_grouped_form(self):
        omega = symplectic_form(2, Ordering.INTERLEAVED).matrix
        sigma = symplectic_form(2, Ordering.GROUPED).matrix
        npt.assert_array_equal(reorder(omega, Ordering.INTERLEAVED, Ordering.GROUPED), sigma)

    def test_vector_convention(self):
        # (q1, p1, q2, p2) -> (q1, q2, p1, p2)
        out = reorder([1.0, 2.0, 3.0, 4.0], Ordering.INTERLEAVED, Ordering.GROUPED)
        npt.assert_array_equal(out, [1.0, 3.0, 2.0, 4.0])

    def test_round_trip_is_exact(self, rng):
        m = rng.standard_normal((6, 6))
        back = reorder(
            reorder(m, Ordering.GROUPED, Ordering.INTERLEAVED),
            Ordering.INTERLEAVED,
            Ordering.GROUPED,
        )
        npt.assert_array_equal(back, m)

    def test_odd_dimension_rejected(self):
        with pytest.raises(DimensionError):
            reorder(np.zeros(3), Ordering.GROUPED, Ordering.INTERLEAVED)


class TestMomentState:
    def test_vacuum_is_physical_with_zero_margin(self):
        state = vacuum_state(2)
        assert uncertainty_margin(state) == pytest.approx(0.0, abs=1e-12)

    def test_asymmetric_covariance_rejected(self):
        with pytest.raises(DimensionError):
            MomentState(d=np.zeros(2), V=np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_arrays_frozen(self):
        state = vacuum_state(1)
        with pytest.raises(ValueError):
            state.V[0, 0] = 3.0


class TestApplyChannel:
    def test_identity_fixes_any_state(self, rng):
        state = random_state(rng, 2)
        out = apply_channel(identity_channel(2), state)
        npt.assert_allclose(out.d, state.d, atol=1e-15)
        npt.assert_allclose(out.V, state.V, atol=1e-15)

    def test_attenuator_fixes_vacuum(self):
        out = apply_channel(thermal_loss_channel(0.5), vacuum_state(1))
        npt.assert_allclose(out.d, np.zeros(2), atol=1e-15)
        npt.assert_allclose(out.V, 0.5 * np.eye(2), atol=1e-15)

    def test_total_contraction(self, rng):
        delta = np.array([0.3, -0.7])
        ch = GaussianChannel(X=np.zeros((2, 2)), Y=np.zeros((2, 2)), delta=delta)
        out = apply_channel(ch, random_state(rng, 1))
        npt.assert_array_equal(out.d, delta)
        npt.assert_array_equal(out.V, np.zeros((2, 2)))

    def test_mode_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            apply_channel(identity_channel(2), vacuum_state(1))


class TestCompose:
    def test_two_attenuators_equal_effective_attenuator(self):
        # eta = 0.25 twice composes to eta = 0.0625
        quarter = thermal_loss_channel(0.25)
        combined = compose(quarter, quarter)
        expected = thermal_loss_channel(0.0625)
        npt.assert_allclose(combined.X, expected.X, atol=1e-15)
        npt.assert_allclose(combined.Y, expected.Y, atol=1e-15)
        npt.assert_allclose(combined.Y, 0.46875 * np.eye(2), atol=1e-15)

    def test_identity_neutral(self, rng):
        ch = random_stable_channel(rng, 2)
        ident = identity_channel(2)
        for result in (compose(ident, ch), compose(ch, ident)):
            npt.assert_allclose(result.X, ch.X, atol=1e-15)
            npt.assert_allclose(result.Y, ch.Y, atol=1e-15)
            npt.assert_allclose(result.delta, ch.delta, atol=1e-15)

    def test_associativity(self, rng):
        for _ in range(50):
            modes = int(rng.integers(1, 4))
            c1, c2, c3 = (random_stable_channel(rng, modes) for _ in range(3))
            left = compose(c3, compose(c2, c1))
            right = compose(compose(c3, c2), c1)
            npt.assert_allclose(left.X, right.X, atol=1e-12)
            npt.assert_allclose(left.Y, right.Y, atol=1e-12)
            npt.assert_allclose(left.delta, right.delta, atol=1e-12)

    def test_composition_matches_sequential_application(self, rng):
        for _ in range(50):
            modes = int(rng.integers(1, 4))
            c1, c2 = (random_stable_channel(rng, modes) for _ in range(2))
            state = random_state(rng, modes)
            combined = apply_channel(compose(c2, c1), state)
            sequential = apply_channel(c2, apply_channel(c1, state))
            npt.assert_allclose(combined.d, sequential.d, atol=1e-12)
            npt.assert_allclose(combined.V, sequential.V, atol=1e-12)

    def test_ordering_mismatch_rejected(self):
        grouped = identity_channel(1)
        interleaved = identity_channel(1, ordering=Ordering.INTERLEAVED)
        with pytest.raises(DimensionError):
            compose(grouped, interleaved)


class TestCpCheck:
    def test_attenuator_saturates_det_condition(self):
        report = cp_check(thermal_loss_channel(0.5))
        assert report.method is CpMethod.DET_CONDITION
        assert report.passes
        # det Y = 0.0625 exactly equals ((1 - det X)/2)^2
        assert report.margin == pytest.approx(0.0, abs=1e-15)

    def test_identity_channel_margin_zero(self):
        report = cp_check(identity_channel(1))
        assert report.passes
        assert report.margin == pytest.approx(0.0, abs=1e-15)

    def test_amplifier_without_noise_fails(self):
        ch = GaussianChannel(X=2.0 * np.eye(2), Y=np.zeros((2, 2)), delta=np.zeros(2))
        report = cp_check(ch)
        assert not report.passes
        # det Y - ((1 - det X)/2)^2 = -2.25
        assert report.margin == pytest.approx(-2.25, abs=1e-15)

    def test_det_condition_only_for_one_mode(self):
        with pytest.raises(DimensionError):
            cp_check(identity_channel(2), method=CpMethod.DET_CONDITION)

    def test_one_mode_symplectic_scaling_identity(self, rng):
        sigma = symplectic_form(1).matrix
        for _ in range(1000):
            x = rng.uniform(-2, 2, size=(2, 2))
            lhs = x @ sigma @ x.T
            npt.assert_allclose(lhs, np.linalg.det(x) * sigma, atol=1e-13)

    def test_det_and_hermitian_verdicts_agree(self, rng):
        band = 1e-10
        for _ in range(1000):
            x = rng.uniform(-1.5, 1.5, size=(2, 2))
            y = rng.standard_normal((2, 2))
            y = 0.5 * (y + y.T) + rng.uniform(-0.3, 1.2) * np.eye(2)
            ch = GaussianChannel(X=x, Y=y, delta=np.zeros(2))
            det_rep = cp_check(ch, method=CpMethod.DET_CONDITION)
            herm_rep = cp_check(ch, method=CpMethod.HERMITIAN_EIG)
            if abs(det_rep.margin) < band or abs(herm_rep.margin) < band:
                continue
            assert det_rep.passes == herm_rep.passes


class TestDisplacementGauge:
    def test_contraction_example(self):
        ch = GaussianChannel(X=0.5 * np.eye(2), Y=np.zeros((2, 2)), delta=[1.0, 0.0])
        result = displacement_gauge(ch)
        npt.assert_allclose(result.chi, [-2.0, 0.0], atol=1e-15)
        npt.assert_array_equal(result.channel.delta, np.zeros(2))
        npt.assert_array_equal(result.channel.X, ch.X)
        npt.assert_array_equal(result.channel.Y, ch.Y)

    def test_zero_displacement_untouched(self, rng):
        ch = random_stable_channel(rng, 1)
        ch = GaussianChannel(X=ch.X, Y=ch.Y, delta=np.zeros(2))
        result = displacement_gauge(ch)
        npt.assert_array_equal(result.chi, np.zeros(2))

    def test_unit_eigenvalue_not_gaugeable(self):
        ch = GaussianChannel(X=np.eye(2), Y=np.zeros((2, 2)), delta=[1.0, 0.0])
        with pytest.raises(NotGaugeableError):
            displacement_gauge(ch)

    def test_conjugation_identity_holds(self, rng):
        # delta + (I - X) chi vanishes for the returned chi
        for _ in range(20):
            ch = random_stable_channel(rng, 2)
            result = displacement_gauge(ch)
            residual = ch.delta + (np.eye(4) - ch.X) @ result.chi
            npt.assert_allclose(residual, np.zeros(4), atol=1e-10)


class TestEdgePaths:
    def test_random_states_above_vacuum_floor_are_physical(self, rng):
        for _ in range(50):
            state = random_state(rng, int(rng.integers(1, 4)))
            assert uncertainty_margin(state) >= -1e-12

    def test_reorder_same_ordering_returns_copy(self, rng):
        m = rng.standard_normal((4, 4))
        out = reorder(m, Ordering.GROUPED, Ordering.GROUPED)
        npt.assert_array_equal(out, m)
        assert out is not m
