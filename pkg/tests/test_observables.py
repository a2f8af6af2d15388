# Copyright (C) 2026 Dicke Battery Developers
#
# dicke-battery is free software: you can redistribute it and/or modify it under the terms of the
# GNU General Public License as published by the Free Software Foundation,
# either version 3 of the License, or (at your option) any later version.
#
# dicke-battery is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY;
# without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.
# See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along with dicke-battery.
# If not, see <https://www.gnu.org/licenses/>.


"""
Stored energy, charge trace and maximum-power tests.
"""


from __future__ import annotations

import math

import numpy as np
import pytest

from dicke_battery.dynamics import diagonalize, evolve, evolve_rk4_oracle
from dicke_battery.exceptions import InvalidParameterError, NumericalError
from dicke_battery.hilbert import SpaceTag, StateVector, basis_state, composite_index, initial_state
from dicke_battery.model import ModelParams, build_dicke_hamiltonian, dicke_hamiltonian
from dicke_battery.observables import (
    ChargeTrace,
    average_power,
    converged_window,
    default_time_grid,
    find_max_power,
    first_local_max_power,
    peak_tail_mass,
    stored_energy,
    trace_charge,
)
from dicke_battery.types import CouplingScaling

# Grid maxima of the default 1000-point window at constant coupling 0.5 and auto cutoff,
# from a dense Jacobi rotation solver run independently of LAPACK.
SINGLE_TLS_P_MAX = 0.41669927685535108
TLS_PAIR_P_MAX = 1.191585893362078
PAIR_TO_SINGLE_POWER_RATIO = 2.8595823404217557
# First energy maximum at coupling 0.05 on a 3000-point grid over (0, 60].
WEAK_COUPLING_PEAK_ENERGY = 0.9991581532118825
WEAK_COUPLING_PEAK_TAU = 31.4


def _manual_trace(energy, taus=(1.0, 2.0), n=1):
    taus = np.asarray(taus, dtype=np.float64)
    energy = np.asarray(energy, dtype=np.float64)
    zeros = np.zeros_like(taus)
    return ChargeTrace(
        params=ModelParams(n=n),
        taus=taus,
        energy=energy,
        power=energy / taus,
        n_ph=zeros,
        jz=zeros,
        parity=zeros,
        norm_err=zeros,
    )


@pytest.mark.parametrize("n", [1, 3, 8])
def test_initial_state_stores_nothing(n):
    assert stored_energy(initial_state(n, 2 * n + 8), n, omega_a=1.7) == 0.0


@pytest.mark.parametrize("n", [1, 2, 5])
def test_inverted_battery_stores_capacity(n):
    cutoff = n + 2
    inverted = basis_state(SpaceTag.composite(n, cutoff), composite_index(n, 0, cutoff))
    assert stored_energy(inverted, n, omega_a=1.5) == n * 1.5


def test_superposition_stores_half_capacity():
    n, cutoff = 4, 6
    space = SpaceTag.composite(n, cutoff)
    amplitudes = np.zeros(space.dim, dtype=np.complex128)
    amplitudes[composite_index(0, 0, cutoff)] = 1 / math.sqrt(2)
    amplitudes[composite_index(n, 0, cutoff)] = 1 / math.sqrt(2)
    energy = stored_energy(StateVector(amplitudes, space), n, omega_a=1.0)
    assert energy == pytest.approx(n / 2, abs=1e-12)


def test_stored_energy_checks_space():
    with pytest.raises(InvalidParameterError):
        stored_energy(initial_state(2, 8), 3, omega_a=1.0)


@pytest.mark.parametrize(("energy", "tau", "expected"), [(0.0, 1.0, 0.0), (2.0, 4.0, 0.5)])
def test_average_power(energy, tau, expected):
    assert average_power(energy, tau) == expected


@pytest.mark.parametrize("tau", [0.0, -1.0])
def test_average_power_rejects_non_positive_time(tau):
    with pytest.raises(InvalidParameterError):
        average_power(1.0, tau)


def test_default_time_grid_follows_collective_rabi_time():
    params = ModelParams(n=4, lambda_base=0.5, scaling=CouplingScaling.inverse_sqrt_n)
    taus = default_time_grid(params)
    assert taus.shape == (2000,)
    assert taus[0] == pytest.approx(40.0 / 2000, rel=1e-15)
    assert taus[-1] == pytest.approx(40.0, rel=1e-15)
    constant = params.updated(scaling=CouplingScaling.constant)
    assert default_time_grid(constant)[-1] == pytest.approx(20.0, rel=1e-15)


def test_default_time_grid_without_coupling():
    taus = default_time_grid(ModelParams(n=2, lambda_base=0.0), steps=10)
    assert taus[-1] == 20.0
    assert np.all(np.diff(taus) > 0)


def test_default_time_grid_explicit_window():
    taus = default_time_grid(ModelParams(), steps=4, t_max=2.0)
    assert np.array_equal(taus, [0.5, 1.0, 1.5, 2.0])


@pytest.mark.parametrize("taus", [[], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [float("nan")]])
def test_trace_rejects_invalid_grids(taus):
    with pytest.raises(InvalidParameterError):
        trace_charge(ModelParams(), taus)


def test_uncoupled_battery_never_charges():
    params = ModelParams(n=3, lambda_base=0.0)
    trace = trace_charge(params, default_time_grid(params, steps=200))
    assert not np.any(trace.energy)
    assert not np.any(trace.power)
    assert np.allclose(trace.n_ph, 3.0, atol=1e-12)
    point = find_max_power(trace, refine=True)
    assert point.p_max == 0.0
    assert point.tau_star == trace.taus[0]
    assert point.degenerate


def test_trace_invariants(small_params):
    trace = trace_charge(small_params, default_time_grid(small_params, steps=500))
    assert len(trace) == 500
    assert np.array_equal(trace.power, trace.energy / trace.taus)
    assert np.max(trace.norm_err) < 1e-11
    assert np.max(np.abs(trace.parity - 1.0)) < 1e-9
    assert np.max(trace.energy) <= small_params.capacity + 1e-12
    assert np.min(trace.energy) >= -1e-12
    assert np.allclose(trace.jz + small_params.n / 2, trace.energy, atol=1e-12)
    assert np.all(trace.n_ph >= 0)
    assert trace.tail_mass is not None


def test_weak_coupling_single_tls_follows_vacuum_rabi_oscillation():
    params = ModelParams(n=1, lambda_base=0.05)
    trace = trace_charge(params, default_time_grid(params, steps=3000, t_max=60.0))
    peak = int(np.argmax(trace.energy))
    assert trace.taus[peak] == pytest.approx(math.pi / (2 * 0.05), rel=0.05)
    assert trace.taus[peak] == pytest.approx(WEAK_COUPLING_PEAK_TAU, rel=1e-12)
    assert trace.energy[peak] == pytest.approx(WEAK_COUPLING_PEAK_ENERGY, abs=1e-9)


def test_weak_coupling_peak_agrees_with_rk4_oracle():
    params = ModelParams(n=1, lambda_base=0.05)
    trace = trace_charge(params, default_time_grid(params, steps=3000, t_max=60.0))
    peak = int(np.argmax(trace.energy))
    psi = evolve_rk4_oracle(
        build_dicke_hamiltonian(params),
        initial_state(1, params.resolved_cutoff),
        float(trace.taus[peak]),
        steps=100_000,
    )
    assert stored_energy(psi, 1, params.omega_a) == pytest.approx(trace.energy[peak], abs=1e-8)


def test_monotone_power_is_flagged_degenerate():
    params = ModelParams(n=1, lambda_base=0.5)
    trace = trace_charge(params, default_time_grid(params, steps=50, t_max=0.5))
    assert np.all(np.diff(trace.power) > 0)
    point = find_max_power(trace)
    assert point.tau_star == trace.taus[-1]
    assert point.degenerate


def test_refinement_never_lowers_the_peak(small_params):
    trace = trace_charge(small_params, default_time_grid(small_params, steps=200))
    grid = find_max_power(trace)
    refined = find_max_power(trace, refine=True)
    assert not grid.degenerate
    assert refined.refined
    assert refined.p_max >= grid.p_max
    assert refined.p_max == refined.e_at_max / refined.tau_star
    # A finer grid cannot beat the refined peak by more than the search tolerance.
    fine = find_max_power(trace_charge(small_params, default_time_grid(small_params, 4000)))
    assert refined.p_max >= fine.p_max - 1e-8


def test_collective_charging_beats_single_tls_at_fixed_coupling():
    single = ModelParams(n=1, lambda_base=0.5, scaling=CouplingScaling.constant)
    pair = single.with_n(2)
    p1 = find_max_power(trace_charge(single, default_time_grid(single, steps=1000))).p_max
    p2 = find_max_power(trace_charge(pair, default_time_grid(pair, steps=1000))).p_max
    assert p2 > p1
    assert p1 == pytest.approx(SINGLE_TLS_P_MAX, rel=1e-9)
    assert p2 == pytest.approx(TLS_PAIR_P_MAX, rel=1e-9)
    assert p2 / p1 == pytest.approx(PAIR_TO_SINGLE_POWER_RATIO, rel=1e-9)


def test_first_local_maximum_is_not_above_global(small_params):
    trace = trace_charge(small_params, default_time_grid(small_params, steps=500))
    assert first_local_max_power(trace).p_max <= find_max_power(trace).p_max


def test_energy_is_even_in_the_coupling():
    n, cutoff = 2, 12
    psi0 = initial_state(n, cutoff)
    plus = diagonalize(dicke_hamiltonian(n, cutoff, 1.0, 1.0, 0.4))
    minus = diagonalize(dicke_hamiltonian(n, cutoff, 1.0, 1.0, -0.4))
    for t in (0.3, 1.0, 2.5, 7.0):
        e_plus = stored_energy(evolve(plus, psi0, t), n, 1.0)
        e_minus = stored_energy(evolve(minus, psi0, t), n, 1.0)
        assert e_plus == pytest.approx(e_minus, abs=1e-10)


def test_trace_rejects_energy_above_capacity():
    with pytest.raises(NumericalError):
        _manual_trace([0.5, 1.5])


def test_trace_rejects_inconsistent_power():
    taus = np.array([1.0, 2.0])
    energy = np.array([0.1, 0.2])
    with pytest.raises(InvalidParameterError):
        ChargeTrace(
            params=ModelParams(),
            taus=taus,
            energy=energy,
            power=energy,
            n_ph=np.zeros(2),
            jz=np.zeros(2),
            parity=np.zeros(2),
            norm_err=np.zeros(2),
        )


def test_refinement_requires_propagator():
    with pytest.raises(InvalidParameterError):
        find_max_power(_manual_trace([0.2, 0.1]), refine=True)


def test_peak_tail_mass_stops_after_the_power_maximum():
    trace = ChargeTrace(
        params=ModelParams(n=1),
        taus=np.array([1.0, 2.0, 3.0, 4.0, 5.0]),
        energy=np.array([0.1, 0.4, 0.3, 0.2, 0.1]),
        power=np.array([0.1, 0.4, 0.3, 0.2, 0.1]) / np.array([1.0, 2.0, 3.0, 4.0, 5.0]),
        n_ph=np.zeros(5),
        jz=np.zeros(5),
        parity=np.zeros(5),
        norm_err=np.zeros(5),
        tail_mass=np.array([1e-12, 1e-11, 1e-10, 1e-3, 1e-2]),
    )
    assert peak_tail_mass(trace) == 1e-10


def test_peak_tail_mass_requires_recorded_tail():
    with pytest.raises(InvalidParameterError):
        peak_tail_mass(_manual_trace([0.2, 0.1]))


def _tail_trace(tail_mass):
    taus = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    energy = np.array([0.1, 0.4, 0.3, 0.2, 0.1])
    return ChargeTrace(
        params=ModelParams(n=1),
        taus=taus,
        energy=energy,
        power=energy / taus,
        n_ph=np.zeros(5),
        jz=np.zeros(5),
        parity=np.zeros(5),
        norm_err=np.zeros(5),
        tail_mass=np.asarray(tail_mass, dtype=np.float64),
    )


def test_converged_window_cuts_where_the_tail_mass_breaks_the_bound():
    window = converged_window(_tail_trace([1e-12, 1e-11, 1e-10, 1e-3, 1e-2]))
    assert len(window) == 3
    assert window.verified_tmax == 3.0
    assert np.array_equal(window.taus, [1.0, 2.0, 3.0])
    assert np.array_equal(window.power, window.energy / window.taus)
    assert np.max(window.tail_mass) < 1e-8


def test_converged_window_keeps_a_fully_converged_trace():
    trace = _tail_trace([0.0, 1e-12, 1e-11, 1e-10, 1e-9])
    window = converged_window(trace)
    assert len(window) == len(trace)
    assert window.verified_tmax == 5.0


def test_converged_window_rejects_a_tail_broken_before_the_peak():
    with pytest.raises(NumericalError):
        converged_window(_tail_trace([1e-12, 1e-3, 1e-3, 1e-3, 1e-3]))


def test_converged_window_requires_recorded_tail():
    with pytest.raises(InvalidParameterError):
        converged_window(_manual_trace([0.2, 0.1]))


def test_converged_window_keeps_the_refinement_propagator(small_params):
    trace = trace_charge(small_params, default_time_grid(small_params, steps=200))
    window = converged_window(trace, tol=1.0)
    assert window.propagator is trace.propagator
    assert find_max_power(window, refine=True).p_max == find_max_power(trace, refine=True).p_max
