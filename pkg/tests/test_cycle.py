"""Tests for the Otto cycle assessment"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from unruh_otto.constants import INV_SQRT2, SCENARIO_EXPECTED, THRESHOLD_ROWS
from unruh_otto.cycle import (
    EngineParams,
    EntangledState,
    Reason,
    ScenarioGrid,
    StateClass,
    assess,
    classify_scenarios,
    compliant_alpha_cool,
    epsilon0,
    epsilon_threshold_exact,
    free_hamiltonian,
    maximal_traces,
    otto_efficiency,
    threshold_table,
    trace_at_epsilon0,
    trace_quantity,
)
from unruh_otto.errors import DomainError, NearSingularA, ValidationError
from unruh_otto.kinematics import ClockConvention, MotionKind, clock_ratio_antiparallel
from unruh_otto.response import ResponsePoint, p_a, response_set, singular_band

PAR = MotionKind.PARALLEL
ANTI = MotionKind.ANTIPARALLEL


def antiparallel_nonmax(A, W=0.2, b2=0.9, clock=ClockConvention.LORENTZ):
    return EngineParams(ANTI, A, W, 0.2, 0.1, EntangledState.from_b2(b2), clock)


def random_params(rng, size, motion):
    params = []
    while len(params) < size:
        A = float(rng.uniform(0.1, 10.0))
        if singular_band(A):
            continue
        W = float(rng.uniform(0.05, 2.0))
        alpha_H = float(rng.choice([0.2, 0.5, 1.2, 1.5, 2.0]))
        b2 = float(rng.uniform(0.7, 0.99))
        params.append(EngineParams(motion, A, W, alpha_H, compliant_alpha_cool(alpha_H), EntangledState.from_b2(b2)))
    return params


class TestEntangledState:
    def test_bell_states(self):
        assert EntangledState.symmetric().state_class() == StateClass.SYMMETRIC
        assert EntangledState.antisymmetric().state_class() == StateClass.ANTISYMMETRIC
        assert EntangledState.from_b2(0.9).state_class() == StateClass.NON_MAXIMAL

    def test_from_b2_sign(self):
        state = EntangledState.from_b2(0.6, sign=-1)
        assert state.b1 == pytest.approx(-0.8)
        assert state.b2 == 0.6

    def test_normalization_enforced(self):
        with pytest.raises(ValidationError):
            EntangledState(0.6, 0.6)

    def test_b2_above_one(self):
        with pytest.raises(ValidationError):
            EntangledState.from_b2(1.2)

    def test_concurrence(self):
        assert EntangledState.symmetric().concurrence() == pytest.approx(1.0)
        assert EntangledState.from_b2(1.0).concurrence() == 0.0

    @pytest.mark.parametrize("alpha", [0.2, 1.0, 2.5])
    def test_energy_matches_hamiltonian(self, alpha):
        state = EntangledState.from_b2(0.9)
        vec = state.vector()
        assert vec @ free_hamiltonian(alpha) @ vec == pytest.approx(state.energy(alpha), abs=1e-15)

    def test_hamiltonian_traceless(self):
        h = free_hamiltonian(0.3)
        assert np.trace(h) == pytest.approx(0.0, abs=1e-15)
        assert h.shape == (4, 4)


class TestEngineParams:
    @pytest.mark.parametrize("alpha_H,alpha_C", [(0.5, 1.5), (2.0, 0.5), (1.0, 0.5), (0.5, 1.0)])
    def test_rejects_mixed_sides(self, alpha_H, alpha_C):
        with pytest.raises(ValidationError):
            EngineParams(PAR, 1.0, 0.2, alpha_H, alpha_C, EntangledState.symmetric())

    def test_accepts_both_degenerate(self):
        params = EngineParams(PAR, 1.0, 0.2, 1.0, 1.0 + 1e-12, EntangledState.symmetric())
        assert params.point == ResponsePoint(1.0, 0.2, 1.0, PAR)

    def test_rejects_non_positive(self):
        with pytest.raises(ValidationError):
            EngineParams(PAR, -1.0, 0.2, 0.5, 0.4, EntangledState.symmetric())

    def test_coerces_enums(self):
        params = EngineParams("antiparallel", 1.0, 0.2, 0.5, 0.4, EntangledState.symmetric(), "squared")
        assert params.motion is ANTI
        assert params.clock is ClockConvention.SQUARED


class TestTraces:
    def test_trace_quantity_by_hand(self):
        point = ResponsePoint(1.0, 0.5, 0.5, PAR)
        resp = response_set(point)
        state = EntangledState.from_b2(0.8)
        b1, b2 = state.b1, state.b2
        by_hand = (
            b2**2 * resp.pA_plus - b1**2 * resp.pA_minus + b1 * b2 * resp.dP_AB
            + 0.3 * (b1**2 * resp.pB_plus - b2**2 * resp.pB_minus + b1 * b2 * resp.dP_AB)
        )
        assert trace_quantity(resp, state, 0.3) == pytest.approx(by_hand, rel=1e-14)

    @pytest.mark.parametrize("A,W,alpha_H", [(0.5, 0.2, 0.2), (1.0, 1.0, 0.5), (3.0, 0.5, 1.5), (8.0, 2.0, 2.0)])
    @pytest.mark.parametrize("state", [EntangledState.symmetric(), EntangledState.antisymmetric()])
    def test_maximal_antiparallel_closed_forms(self, A, W, alpha_H, state):
        params = EngineParams(ANTI, A, W, alpha_H, compliant_alpha_cool(alpha_H), state)
        result = assess(params)
        resp = response_set(params.point)
        alpha_v = clock_ratio_antiparallel(A)
        work, heat_in = maximal_traces(resp, alpha_v, alpha_H)
        assert result.trace_work == pytest.approx(work, abs=1e-12)
        assert result.trace_heat_in == pytest.approx(heat_in, abs=1e-12)
        assert work == pytest.approx(0.5 * (1.0 + alpha_v * alpha_H) * (-W / 8.0), abs=1e-12)
        assert heat_in == pytest.approx(0.5 * (1.0 - alpha_H**2) * (-W / 8.0), abs=1e-12)

    def test_bell_signs_agree_antiparallel(self):
        sym = assess(EngineParams(ANTI, 2.0, 0.5, 0.5, 0.25, EntangledState.symmetric()))
        anti = assess(EngineParams(ANTI, 2.0, 0.5, 0.5, 0.25, EntangledState.antisymmetric()))
        assert sym == anti

    def test_parallel_antisymmetric_heat_vanishes_at_alpha_one(self):
        params = EngineParams(PAR, 1.5, 0.4, 1.0, 1.0, EntangledState.antisymmetric())
        result = assess(params)
        assert result.trace_heat_in == pytest.approx(0.0, abs=1e-12)
        assert result.omega1_hat is None
        assert Reason.OMEGA1_INVALID in result.reasons
        assert result.eta_0 is None and result.energy_residual is None


class TestAssess:
    def test_feasible_antiparallel_point(self):
        result = assess(antiparallel_nonmax(1.0))
        assert result.feasible
        assert not result.reasons
        assert result.omega1_hat == pytest.approx(0.2 * 0.8 / 0.9)
        assert 0.0 < result.eta_ratio < 1.0
        assert result.eta_E == pytest.approx(result.eta_0 * result.eta_ratio, rel=1e-15)
        assert result.omega1_residual == pytest.approx(0.0, abs=1e-12)

    def test_parallel_symmetric_has_negative_work(self):
        result = assess(EngineParams(PAR, 2.0, 0.5, 0.5, 0.4, EntangledState.symmetric()))
        assert result.trace_work < 0.0
        assert Reason.WORK_NON_POSITIVE in result.reasons
        assert not result.feasible

    def test_eta_ratio_undefined_without_heat_in(self):
        result = assess(EngineParams(ANTI, 2.0, 0.5, 0.5, 0.25, EntangledState.symmetric()))
        assert result.trace_heat_in < 0.0
        assert result.eta_ratio is None
        assert result.eta_E is None

    @pytest.mark.parametrize(
        "clock,below,above",
        [(ClockConvention.LORENTZ, 0.40, 0.60), (ClockConvention.SQUARED, 0.30, 0.36)],
    )
    def test_work_sign_boundary(self, clock, below, above):
        assert assess(antiparallel_nonmax(below, clock=clock)).trace_work < 0.0
        assert assess(antiparallel_nonmax(above, clock=clock)).trace_work > 0.0

    def test_squared_clock_work_root(self):
        def work(A):
            return assess(antiparallel_nonmax(A, clock=ClockConvention.SQUARED)).trace_work

        root = brentq(work, 0.2, 0.5, xtol=1e-6)
        assert root == pytest.approx(0.33, abs=0.03)

    def test_squared_clock_feasible_above_boundary(self):
        for A in np.linspace(0.37, 10.0, 80):
            A = float(A)
            if singular_band(A):
                continue
            result = assess(antiparallel_nonmax(A, clock=ClockConvention.SQUARED))
            assert result.trace_work > 0.0, A
            assert result.trace_heat_in > 0.0, A
            assert result.trace_heat_out > 0.0, A
            assert result.feasible, A
            assert 0.0 < result.eta_E < 1.0
            assert result.eta_ratio < 1.0

    def test_efficiency_curve_above_boundary(self):
        for A in np.linspace(0.7, 10.0, 40):
            A = float(A)
            if singular_band(A):
                continue
            result = assess(antiparallel_nonmax(A))
            assert result.feasible, A
            assert 0.0 < result.eta_ratio < 1.0

    def test_sign_invariance_antiparallel(self, rng):
        for params in random_params(rng, 1000, ANTI):
            flipped = EngineParams(
                ANTI, params.A, params.W, params.alpha_H, params.alpha_C, EntangledState(params.state.b1, -params.state.b2)
            )
            a, b = assess(params), assess(flipped)
            assert a.trace_work == pytest.approx(b.trace_work, rel=1e-12, abs=1e-15)
            assert a.trace_heat_in == pytest.approx(b.trace_heat_in, rel=1e-12, abs=1e-15)
            assert a.trace_heat_out == pytest.approx(b.trace_heat_out, rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("motion", [PAR, ANTI])
    def test_feasible_efficiency_in_unit_interval(self, rng, motion):
        for params in random_params(rng, 1000, motion):
            result = assess(params)
            if result.feasible:
                assert 0.0 < result.eta_E < 1.0
                assert result.eta_E == pytest.approx(result.eta_0 * result.eta_ratio, rel=1e-15)

    def test_singular_band_raises(self):
        with pytest.raises(NearSingularA):
            assess(antiparallel_nonmax(2.0 * math.pi))

    def test_one_sided_degeneracy_rejected(self):
        with pytest.raises(ValidationError, match="same side"):
            EngineParams(PAR, 1.0, 0.2, 1.0 + 1e-10, 1.5, EntangledState.from_b2(0.9))

    def test_to_dict_reasons_sorted(self):
        result = assess(EngineParams(ANTI, 2.0, 0.5, 0.5, 0.25, EntangledState.symmetric()))
        data = result.to_dict()
        assert data["reasons"] == sorted(data["reasons"])
        assert data["feasible"] is False


class TestOttoBaseline:
    def test_otto_efficiency(self):
        assert otto_efficiency(0.1, 0.2) == pytest.approx(0.5)
        assert otto_efficiency(0.17778, 0.2) == pytest.approx(0.1111, abs=1e-4)

    @pytest.mark.parametrize("omega1", [0.0, 0.2, 0.3])
    def test_otto_efficiency_domain(self, omega1):
        with pytest.raises(DomainError):
            otto_efficiency(omega1, 0.2)

    @pytest.mark.parametrize("alpha_H,expected", [(0.2, 0.1), (0.5, 0.25), (1.0, 1.0), (2.0, 2.5)])
    def test_compliant_alpha_cool(self, alpha_H, expected):
        assert compliant_alpha_cool(alpha_H) == pytest.approx(expected)


class TestNearMaximalThreshold:
    @pytest.mark.parametrize("W,alpha_H,A,eps_ref,trace_ref", THRESHOLD_ROWS)
    def test_reference_rows(self, W, alpha_H, A, eps_ref, trace_ref):
        assert epsilon0(A, W) == pytest.approx(eps_ref, rel=5e-5)
        assert trace_at_epsilon0(A, W) == pytest.approx(trace_ref, rel=1e-2)

    def test_threshold_table_passes(self):
        rows = threshold_table()
        assert len(rows) == len(THRESHOLD_ROWS)
        assert all(row.passed for row in rows)
        assert rows[0].to_dict()["pass"] is True

    @pytest.mark.parametrize("W,alpha_H,A,eps_ref,trace_ref", THRESHOLD_ROWS)
    def test_detector_a_trace_at_threshold(self, W, alpha_H, A, eps_ref, trace_ref):
        eps = epsilon0(A, W)
        resp = response_set(ResponsePoint(A, W, alpha_H, ANTI))
        state = EntangledState.from_b2(INV_SQRT2 + eps)
        assert trace_quantity(resp, state, 0.0) == pytest.approx(trace_at_epsilon0(A, W), rel=1e-6)

    @pytest.mark.parametrize("W,alpha_H,A,eps_ref,trace_ref", THRESHOLD_ROWS)
    def test_work_trace_at_threshold(self, W, alpha_H, A, eps_ref, trace_ref):
        eps = epsilon0(A, W)
        resp = response_set(ResponsePoint(A, W, alpha_H, ANTI))
        state = EntangledState.from_b2(INV_SQRT2 + eps)
        work = trace_quantity(resp, state, clock_ratio_antiparallel(A))
        expected = trace_at_epsilon0(A, W)
        assert abs(work - expected) <= eps * expected

    @pytest.mark.parametrize("A,W", [(10.0, 0.1), (30.0, 0.01), (2.0, 0.5)])
    def test_exact_root_agrees_to_second_order(self, A, W):
        eps = epsilon0(A, W)
        assert abs(epsilon_threshold_exact(A, W) - eps) <= 2.0 * eps * eps

    def test_work_trace_changes_sign_at_exact_root(self):
        A, W = 10.0, 0.1
        plus = p_a(A, W)
        minus = plus + W / 8.0
        root = INV_SQRT2 + epsilon_threshold_exact(A, W)
        assert root**2 * plus - (1.0 - root**2) * minus == pytest.approx(0.0, abs=1e-14)


class TestScenarioTable:
    def test_small_grid_shape(self):
        grid = ScenarioGrid(A_values=[0.5, 1.0, 2.0 * math.pi], W_values=[0.2, 0.5], alpha_H_values=(0.2, 1.5))
        table = classify_scenarios(grid)
        assert len(table.rows) == 6
        assert table.skipped_A == [2.0 * math.pi]
        assert table.provenance["alpha_C"] == [0.1, 1.75]
        for row in table.rows:
            states = 2 if row.state_class == StateClass.NON_MAXIMAL else 1
            assert row.n_points == 2 * 2 * 2 * states

    def test_small_grid_antiparallel_nonmax_feasible(self):
        grid = ScenarioGrid(A_values=[1.0, 3.0], W_values=[0.2], alpha_H_values=(0.2,))
        table = classify_scenarios(grid)
        verdicts = {(r.motion, r.state_class): r.any_feasible for r in table.rows}
        assert verdicts[(ANTI, StateClass.NON_MAXIMAL)] is True
        assert verdicts[(ANTI, StateClass.SYMMETRIC)] is False

    @pytest.mark.slow
    def test_default_grid_matches_reference(self):
        table = classify_scenarios(ScenarioGrid.default(), workers=0)
        assert table.matches_reference(), [row.to_dict() for row in table.rows]
        assert {(r.motion.value, r.state_class.value) for r in table.rows} == set(SCENARIO_EXPECTED)
