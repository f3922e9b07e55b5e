"""Integration, event location, dense output, and trajectory invariants."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sirdvax import (
    DomainError,
    EVENT_EPIDEMIC_END,
    EVENT_PROGRAM_END,
    EVENT_RATE_KINK,
    EVENT_SUPPLY_EXHAUSTED,
    Scenario,
    SirdState,
    Tolerances,
    VaccinationPolicy,
    ValidationError,
    integrate,
    state_at,
)
from oracles import rk4_reference

# frozen from a 1e-11/1e-13 adaptive run cross-checked against the fixed-step
# RK4 oracle (they agree to 6e-9)
V_TOTAL_UNCONSTRAINED = 0.4582025544
J_TOTAL_FULL_PROGRAM = 41.3812610212
KINK_TIME = 3.1113937823


def event_times(traj, kind):
    return [e.time for e in traj.events if e.kind == kind]


class TestToleranceValidation:
    @pytest.mark.parametrize("field", ["rtol", "atol", "max_step", "event_tol"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(ValidationError):
            Tolerances(**{field: 0.0})

    def test_defaults_are_valid(self):
        tol = Tolerances()
        assert tol.rtol > 0 and tol.atol > 0


class TestFullProgramRun:
    def test_covers_horizon_with_strictly_increasing_times(self, full_program_traj):
        t = full_program_traj.times
        assert t[0] == 0.0
        assert t[-1] == 15.0
        assert np.all(np.diff(t) > 0)

    def test_mass_conserved_at_every_sample(self, full_program_traj):
        total = full_program_traj.values[:, :4].sum(axis=1)
        assert np.abs(total - 1.0).max() <= 1e-6

    def test_monotone_columns(self, full_program_traj):
        traj = full_program_traj
        assert np.all(np.diff(traj.s) <= 0)
        for column in (traj.rho, traj.d, traj.J, traj.V):
            assert np.all(np.diff(column) >= 0)

    def test_total_usage_and_cost(self, full_program_traj):
        assert full_program_traj.V[-1] == pytest.approx(V_TOTAL_UNCONSTRAINED, abs=1e-4)
        assert full_program_traj.J[-1] == pytest.approx(J_TOTAL_FULL_PROGRAM, abs=1e-3)

    def test_kink_event_located(self, full_program_traj):
        (t_kink,) = event_times(full_program_traj, EVENT_RATE_KINK)
        assert t_kink == pytest.approx(KINK_TIME, abs=1e-3)
        # at the kink the willingness branch meets the capacity branch
        s_kink = full_program_traj.state_at(t_kink).state.s
        assert 0.3 * s_kink == pytest.approx(0.1, abs=1e-8)

    def test_program_end_marker(self, full_program_traj):
        assert event_times(full_program_traj, EVENT_PROGRAM_END) == [15.0]

    def test_no_exhaustion_without_a_binding_stock(self, variant1_traj, variant2_traj):
        assert event_times(variant1_traj, EVENT_SUPPLY_EXHAUSTED) == []
        assert event_times(variant2_traj, EVENT_SUPPLY_EXHAUSTED) == []

    def test_inactive_stock_levels_give_identical_runs(
        self, full_program_traj, variant1_traj, variant2_traj
    ):
        # neither bundled stock level is ever reached, so all three runs match
        assert np.array_equal(variant1_traj.values, variant2_traj.values)
        assert np.array_equal(variant1_traj.values, full_program_traj.values)

    def test_values_are_immutable(self, full_program_traj):
        with pytest.raises(ValueError):
            full_program_traj.values[0, 0] = 2.0


class TestSupplyExhaustion:
    def test_exhaustion_time_is_stock_over_capacity(self, tight_supply_traj):
        # v == k up to the crossing: s stays above k/l (checked below), so the
        # usage integral is k*t and the stock m = 0.2 runs out at exactly m/k
        (t_e,) = event_times(tight_supply_traj, EVENT_SUPPLY_EXHAUSTED)
        assert t_e == pytest.approx(2.0, abs=1e-6)
        s_at = tight_supply_traj.state_at
        assert min(s_at(t).state.s for t in np.linspace(0.0, t_e, 50)) >= 1.0 / 3.0

    def test_usage_meets_the_stock_at_the_event(self, tight_supply_traj):
        (t_e,) = event_times(tight_supply_traj, EVENT_SUPPLY_EXHAUSTED)
        tol = tight_supply_traj.tolerances
        assert abs(tight_supply_traj.state_at(t_e).V - 0.2) <= tol.event_tol * 0.1

    def test_usage_never_exceeds_the_stock(self, tight_supply_traj):
        assert tight_supply_traj.V.max() <= 0.2 + 1e-6
        assert tight_supply_traj.V[-1] == pytest.approx(0.2, abs=1e-9)

    def test_vaccination_stops_at_exhaustion(self, tight_supply_traj):
        (t_e,) = event_times(tight_supply_traj, EVENT_SUPPLY_EXHAUSTED)
        assert tight_supply_traj.rate_at(t_e - 1e-6) > 0.0
        for t in (t_e, t_e + 1e-9, 5.0, 10.0, 15.0):
            assert tight_supply_traj.rate_at(t) == 0.0

    def test_zero_stock_never_vaccinates(self, scenario):
        policy = VaccinationPolicy(k=0.1, l=0.3, m=0.0, tau=15.0)
        traj = integrate(scenario, policy)
        assert event_times(traj, EVENT_SUPPLY_EXHAUSTED) == [0.0]
        assert traj.V[-1] == 0.0


class TestDegenerateRuns:
    def test_disease_free_is_constant(self, disease_free):
        policy = VaccinationPolicy(k=0.1, l=0.3, m=0.0, tau=0.0)
        traj = integrate(disease_free, policy)
        assert np.array_equal(traj.values, np.tile(traj.values[0], (len(traj.times), 1)))
        assert traj.values[0, 0] == 0.999

    def test_policy_none_runs_uncontrolled(self, unvaccinated_traj):
        assert unvaccinated_traj.V[-1] == 0.0
        assert event_times(unvaccinated_traj, EVENT_PROGRAM_END) == []
        assert unvaccinated_traj.rate_at(1.0) == 0.0

    def test_tau_beyond_horizon_rejected(self, scenario):
        with pytest.raises(ValidationError):
            integrate(scenario, VaccinationPolicy(k=0.1, l=0.3, m=1.0, tau=16.0))


class TestEpidemicEndEvent:
    def test_marker_recorded_once_infections_die_out(self, epidemic, cost):
        long_scenario = Scenario(
            epidemic=epidemic,
            cost=cost,
            initial=SirdState(s=0.999, i=0.001, rho=0.0, d=0.0),
            T=25.0,
        )
        traj = integrate(long_scenario, None)
        (t_end,) = event_times(traj, EVENT_EPIDEMIC_END)
        assert 15.0 < t_end < 25.0
        assert traj.state_at(t_end).state.i == pytest.approx(1e-6, rel=1e-3)

    def test_no_marker_within_short_horizon(self, full_program_traj):
        # infections are still just above the threshold at T = 15
        assert event_times(full_program_traj, EVENT_EPIDEMIC_END) == []
        assert full_program_traj.i[-1] > 1e-6


class TestDenseOutput:
    def test_initial_state_exact(self, full_program_traj, scenario):
        state = full_program_traj.state_at(0.0)
        assert state.state.as_tuple() == scenario.initial.as_tuple()
        assert state.J == 0.0 and state.V == 0.0

    def test_sample_points_exact(self, full_program_traj):
        for idx in (1, 250, 500, 777, -1):
            t = float(full_program_traj.times[idx])
            row = full_program_traj.values[idx]
            got = state_at(full_program_traj, t).as_vector()
            assert np.array_equal(np.array(got), row)

    def test_out_of_range_rejected(self, full_program_traj):
        with pytest.raises(DomainError):
            full_program_traj.state_at(-1e-9)
        with pytest.raises(DomainError):
            full_program_traj.state_at(15.0 + 1e-9)

    def test_between_samples_tracks_a_tighter_reference(self, scenario, tolerances):
        policy = VaccinationPolicy(k=0.1, l=0.3, m=math.inf, tau=15.0)
        coarse = integrate(scenario, policy, tolerances)
        tight = integrate(
            scenario,
            policy,
            Tolerances(rtol=tolerances.rtol / 10.0, atol=tolerances.atol / 10.0),
        )
        # interpolation error stays within a small multiple of the local
        # tolerance scale; the factor absorbs global error amplification
        rng = np.random.default_rng(7)
        for t in rng.uniform(0.0, 15.0, size=40):
            y = np.array(coarse.state_at(float(t)).as_vector())
            y_ref = np.array(tight.state_at(float(t)).as_vector())
            bound = 50.0 * (tolerances.rtol * np.abs(y_ref) + tolerances.atol)
            assert np.all(np.abs(y - y_ref) <= bound)


class TestAccuracy:
    def test_halving_tolerances_moves_the_final_state_less_than_rtol(
        self, scenario, tolerances
    ):
        policy = VaccinationPolicy(k=0.1, l=0.3, m=math.inf, tau=15.0)
        coarse = integrate(scenario, policy, tolerances)
        fine = integrate(
            scenario,
            policy,
            Tolerances(rtol=tolerances.rtol / 2.0, atol=tolerances.atol / 2.0),
        )
        diff = np.abs(coarse.values[-1] - fine.values[-1])
        assert diff[:4].max() < tolerances.rtol
        # the cost and usage accumulators are not unit-scale; compare on the
        # error-control scale rtol*|y| + atol
        scale = tolerances.rtol * np.abs(fine.values[-1][4:]) + tolerances.atol
        assert np.all(diff[4:] <= 2.0 * scale)

    def test_agrees_with_fixed_step_reference(self, scenario, full_program_traj):
        # h = 1e-3 keeps this quick; the acceptance suite runs h = 1e-4
        policy = VaccinationPolicy(k=0.1, l=0.3, m=math.inf, tau=15.0)
        ref = rk4_reference(scenario, policy, 1e-3, full_program_traj.times)
        err = np.abs(full_program_traj.values[:, :4] - ref[:, :4]).max()
        assert err <= 1e-4

    def test_reference_resolves_supply_exhaustion(self, scenario, tight_supply_traj):
        policy = VaccinationPolicy(k=0.1, l=0.3, m=0.2, tau=15.0)
        ref = rk4_reference(scenario, policy, 1e-3, tight_supply_traj.times)
        err = np.abs(tight_supply_traj.values[:, :4] - ref[:, :4]).max()
        assert err <= 1e-4
        assert abs(ref[-1, 5] - 0.2) <= 1e-9


class TestFinalSizeRelation:
    def test_unvaccinated_terminal_susceptibles(self, epidemic, cost):
        # classical final-size identity of the uncontrolled epidemic:
        # ln(s_inf/s0) = R0*(s_inf - s0 - i0) once infections have died out
        long_scenario = Scenario(
            epidemic=epidemic,
            cost=cost,
            initial=SirdState(s=0.999, i=0.001, rho=0.0, d=0.0),
            T=60.0,
        )
        traj = integrate(long_scenario, None)
        s_inf = traj.s[-1]
        r0 = epidemic.transmission_rate
        residual = math.log(s_inf / 0.999) - r0 * (s_inf - 0.999 - 0.001)
        assert abs(residual) <= 1e-3
