"""Tests for proper-time relations and stage constraints"""

import math

import pytest

from unruh_otto.errors import DegenerateKappa, DomainError, NonPositiveOmega1, UnderdeterminedOmega1
from unruh_otto.kinematics import (
    ClockConvention,
    MotionKind,
    clock_ratio_antiparallel,
    cooling_duration_constraints,
    interaction_time_dimensionless,
    is_degenerate_alpha,
    kappa_hat,
    relative_velocity_antiparallel,
    solve_omega1_hat,
    stage_alphas,
)


class TestInteractionTime:
    @pytest.mark.parametrize("v", [0.1, 0.5, 0.9, 0.999])
    def test_inverts_tanh(self, v):
        aT = interaction_time_dimensionless(v)
        assert math.tanh(aT / 2.0) == pytest.approx(v, rel=1e-14)

    @pytest.mark.parametrize("v", [0.0, 1.0, -0.3, 1.2])
    def test_rejects_out_of_range(self, v):
        with pytest.raises(DomainError):
            interaction_time_dimensionless(v)


class TestKappaHat:
    def test_is_abs_log(self, rng):
        for alpha in rng.uniform(0.01, 100.0, size=1000):
            alpha = float(alpha)
            if is_degenerate_alpha(alpha):
                continue
            assert kappa_hat(alpha) == pytest.approx(abs(math.log(alpha)), rel=1e-15)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 2.0, 7.5])
    def test_solves_cosh_relation(self, alpha):
        assert math.cosh(kappa_hat(alpha)) == pytest.approx(0.5 * (alpha + 1.0 / alpha), rel=1e-13)

    def test_symmetric_under_inversion(self):
        assert kappa_hat(4.0) == pytest.approx(kappa_hat(0.25), rel=1e-15)

    @pytest.mark.parametrize("alpha", [1.0, 1.0 + 1e-12, 1.0 - 5e-10])
    def test_degenerate(self, alpha):
        with pytest.raises(DegenerateKappa):
            kappa_hat(alpha)

    @pytest.mark.parametrize("alpha", [0.0, -2.0])
    def test_non_positive(self, alpha):
        with pytest.raises(DomainError):
            kappa_hat(alpha)


class TestClockRatio:
    def test_lorentz_is_sech_2A(self, rng):
        for A in rng.uniform(0.0, 20.0, size=1000):
            A = float(A)
            assert clock_ratio_antiparallel(A) == pytest.approx(1.0 / math.cosh(2.0 * A), rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("A", [0.1, 0.33, 1.0, 3.0])
    def test_lorentz_matches_relative_velocity(self, A):
        v = relative_velocity_antiparallel(A)
        assert clock_ratio_antiparallel(A, ClockConvention.LORENTZ) == pytest.approx(math.sqrt(1.0 - v * v), rel=1e-10)

    @pytest.mark.parametrize("A", [0.1, 0.33, 1.0, 3.0])
    def test_squared_convention(self, A):
        v = relative_velocity_antiparallel(A)
        assert clock_ratio_antiparallel(A, ClockConvention.SQUARED) == pytest.approx(1.0 - v * v, rel=1e-10)

    def test_large_A_underflows_to_zero(self):
        assert clock_ratio_antiparallel(400.0) == 0.0

    def test_relative_velocity_bounded(self):
        assert relative_velocity_antiparallel(0.0) == 0.0
        assert -1.0 < relative_velocity_antiparallel(5.0) < -0.99


class TestStageAlphas:
    def test_parallel_keeps_signs(self):
        alphas = stage_alphas(MotionKind.PARALLEL, 0.5, 0.4, 1.0)
        assert (alphas.alpha_v, alphas.alpha_heat_signed, alphas.alpha_cool_signed) == (1.0, 0.5, 0.4)

    def test_antiparallel_flips_stage_signs(self):
        alphas = stage_alphas(MotionKind.ANTIPARALLEL, 0.2, 0.1, 1.0)
        assert alphas.alpha_heat_signed == -0.2
        assert alphas.alpha_cool_signed == -0.1
        assert alphas.alpha_v == pytest.approx(1.0 / math.cosh(2.0))

    def test_convention_reaches_free_flight_ratio(self):
        lorentz = stage_alphas(MotionKind.ANTIPARALLEL, 0.2, 0.1, 0.5, ClockConvention.LORENTZ)
        squared = stage_alphas(MotionKind.ANTIPARALLEL, 0.2, 0.1, 0.5, ClockConvention.SQUARED)
        assert squared.alpha_v == pytest.approx(lorentz.alpha_v**2)


class TestOmega1:
    @pytest.mark.parametrize(
        "W,alpha_H,alpha_C,expected",
        [
            (0.2, 0.5, 0.4, 0.2 * 0.5 / 0.6),
            (0.2, 0.2, 0.1, 0.2 * 0.8 / 0.9),
            (1.0, 2.0, 2.5, 1.0 / 1.5),
            (0.5, 1.5, 1.25, 1.0),
        ],
    )
    def test_energy_balance_value(self, W, alpha_H, alpha_C, expected):
        omega1 = solve_omega1_hat(W, alpha_H, alpha_C)
        assert omega1 == pytest.approx(expected, rel=1e-14)
        assert W / omega1 * (alpha_H - 1.0) == pytest.approx(alpha_C - 1.0, abs=1e-12)

    def test_both_degenerate(self):
        with pytest.raises(UnderdeterminedOmega1):
            solve_omega1_hat(0.2, 1.0, 1.0 + 1e-12)

    @pytest.mark.parametrize("alpha_H,alpha_C", [(0.5, 1.5), (2.0, 0.5), (0.5, 1.0)])
    def test_straddling_or_cool_degenerate(self, alpha_H, alpha_C):
        with pytest.raises(NonPositiveOmega1):
            solve_omega1_hat(0.2, alpha_H, alpha_C)

    def test_heat_degenerate_alone(self):
        with pytest.raises(NonPositiveOmega1) as exc_info:
            solve_omega1_hat(0.2, 1.0 + 1e-12, 0.1)
        assert exc_info.value.alpha_C == 0.1


class TestCoolingDurations:
    def test_magnitude_constraint(self):
        durations = cooling_duration_constraints(1.0, 0.5, 0.4, 2.0)
        assert durations.T_AC_over_T_AH == pytest.approx(0.5)
        assert durations.T_BC_over_T_AH == pytest.approx(0.2)

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            cooling_duration_constraints(1.0, 0.5, 0.4, 0.0)
