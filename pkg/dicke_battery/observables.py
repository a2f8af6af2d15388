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
Battery observables: stored energy, average charging power and the maximum-power search.
"""


from __future__ import annotations

from dataclasses import dataclass, replace
from logging import getLogger
from typing import Dict, List, Optional, Sequence

import numpy as np

from scipy.optimize import minimize_scalar

from .dynamics import Propagator, diagonalize, evolve, evolve_many
from .exceptions import InvalidParameterError, NumericalError
from .hilbert import StateVector, initial_state, spin_projections
from .model import ModelParams, build_dicke_hamiltonian, parity_sector, parity_signs
from .types import SpaceKind

logger = getLogger(__name__)

IMAGINARY_TOL = 1e-12
CAPACITY_TOL = 1e-9
TAIL_MASS_TOL = 1e-8
DEFAULT_STEPS = 2000
WINDOW_PERIODS = 20.0
REFINE_XTOL = 1e-4


@dataclass(frozen=True, eq=False)
class ChargeTrace:
    """
    Time series of battery observables over a charging-time grid.

    `power[i]` is stored exactly as `energy[i] / taus[i]`. The propagator and initial state
    the trace was computed with are kept (when available) so the maximum-power search can
    re-evaluate the energy off the grid. `verified_tmax` is set once the trace has been cut
    to the times its Fock cutoff is known to represent (see `converged_window`).
    """

    params: ModelParams
    taus: np.ndarray
    energy: np.ndarray
    power: np.ndarray
    n_ph: np.ndarray
    jz: np.ndarray
    parity: np.ndarray
    norm_err: np.ndarray
    tail_mass: Optional[np.ndarray] = None
    propagator: Optional[Propagator] = None
    psi0: Optional[StateVector] = None
    verified_tmax: Optional[float] = None

    def __post_init__(self) -> None:
        validate_time_grid(self.taus)
        length = self.taus.shape[0]
        for name in ("energy", "power", "n_ph", "jz", "parity", "norm_err"):
            if getattr(self, name).shape != (length,):
                raise InvalidParameterError(
                    f"Trace column '{name}' has shape {getattr(self, name).shape}, "
                    f"expected ({length},)",
                )
        if not np.array_equal(self.power, self.energy / self.taus):
            raise InvalidParameterError("Trace power column is not energy / tau")
        peak = float(np.max(self.energy))
        if peak > self.params.capacity + CAPACITY_TOL:
            raise NumericalError(
                f"Stored energy {peak!r} exceeds the battery capacity {self.params.capacity!r}",
            )

    def __len__(self) -> int:
        return self.taus.shape[0]

    def head(self, count: int) -> ChargeTrace:
        """
        The first `count` grid points of the trace.
        """

        columns = {
            name: getattr(self, name)[:count]
            for name in ("taus", "energy", "power", "n_ph", "jz", "parity", "norm_err")
        }
        tail_mass = self.tail_mass[:count] if self.tail_mass is not None else None
        return replace(self, tail_mass=tail_mass, **columns)


@dataclass(frozen=True)
class MaxPowerPoint:
    """
    Peak average charging power of a trace.

    `degenerate` is set when the trace never charges, or when the peak sits on the last grid
    point (the charging window is too short to contain it).
    """

    p_max: float
    tau_star: float
    e_at_max: float
    refined: bool = False
    degenerate: bool = False


def validate_time_grid(taus: Sequence[float]) -> np.ndarray:
    times = np.asarray(taus, dtype=np.float64)
    if times.ndim != 1 or times.shape[0] == 0:
        raise InvalidParameterError("Time grid must be a non-empty one-dimensional sequence")
    if not np.all(np.isfinite(times)) or times[0] <= 0:
        raise InvalidParameterError("Time grid values must be finite and strictly positive")
    if np.any(np.diff(times) <= 0):
        raise InvalidParameterError("Time grid must be strictly increasing")
    return times


def default_time_grid(
    params: ModelParams,
    steps: int = DEFAULT_STEPS,
    t_max: Optional[float] = None,
) -> np.ndarray:
    """
    Uniform grid of `steps` points on `(0, t_max]`.

    When `t_max` is not given it follows the collective Rabi time scale,
    `20 / (omega_c * lambda_eff * sqrt(n))`, which shrinks as `sqrt(n)` at constant coupling.
    """

    if steps < 1:
        raise InvalidParameterError(f"Time grid needs at least one step, got {steps}")
    if t_max is None:
        rate = params.omega_c * params.lambda_eff * np.sqrt(params.n)
        t_max = WINDOW_PERIODS / rate if rate > 0 else WINDOW_PERIODS / params.omega_c
    if not t_max > 0:
        raise InvalidParameterError(f"Charging window must be positive, got {t_max}")
    return t_max * np.arange(1, steps + 1, dtype=np.float64) / steps


def stored_energy(psi: StateVector, n: int, omega_a: float) -> float:
    """
    Energy stored in the TLS, `omega_a * (<J_z> + N/2)`.

    The expectation value is taken of `J_z + N/2` (the excited-TLS count) directly,
    so a battery with every TLS in the ground state stores exactly zero.

    Args:
        psi (StateVector): Composite state
        n (int): Number of TLS
        omega_a (float): TLS level splitting

    Raises:
        InvalidParameterError: If the state does not belong to an `n`-TLS composite space.
        NumericalError: If the expectation value has a significant imaginary part.

    Returns:
        Stored energy
    """

    if psi.space.kind != SpaceKind.composite or psi.space.n != n:
        raise InvalidParameterError(f"State on {psi.space} is not a composite state of {n} TLS")
    cutoff = int(psi.space.cutoff)  # type: ignore[arg-type]
    excitations = np.repeat(spin_projections(n) + n / 2, cutoff + 1)
    value = np.vdot(psi.amplitudes, excitations * psi.amplitudes)
    if abs(value.imag) > IMAGINARY_TOL:
        raise NumericalError(
            f"Stored energy has imaginary part {value.imag!r}",
            dim=psi.dim,
        )
    return float(omega_a * value.real)


def average_power(energy: float, tau: float) -> float:
    """
    Average charging power `E / tau`.
    """

    if not tau > 0:
        raise InvalidParameterError(f"Charging time must be positive, got {tau}")
    return energy / tau


def trace_charge(params: ModelParams, taus: Sequence[float]) -> ChargeTrace:
    """
    Charge a battery over a time grid and record its observables.

    The Hamiltonian is diagonalised once, on the parity sector of the initial state only;
    every grid time then costs one matrix-vector product.

    Args:
        params (ModelParams): Battery parameters
        taus (Sequence[float]): Strictly increasing positive charging times

    Returns:
        Charge trace
    """

    times = validate_time_grid(taus)
    n = params.n
    cutoff = params.resolved_cutoff
    psi0 = initial_state(n, cutoff)
    # The initial state has no excited TLS and n photons.
    sector = parity_sector(n, cutoff, -1 if n % 2 else 1)
    propagator = diagonalize(build_dicke_hamiltonian(params), subspace=sector)

    excitations = spin_projections(n) + n / 2
    projections = spin_projections(n)
    photons = np.arange(cutoff + 1, dtype=np.float64)
    signs = parity_signs(n, cutoff).reshape(n + 1, cutoff + 1)

    columns: Dict[str, List[np.ndarray]] = {
        name: [] for name in ("energy", "n_ph", "jz", "parity", "norm_err", "tail")
    }
    for block in evolve_many(propagator, psi0, times):
        probs = (np.abs(block) ** 2).reshape(n + 1, cutoff + 1, -1)
        spin_marginal = probs.sum(axis=1)
        photon_marginal = probs.sum(axis=0)
        columns["energy"].append(params.omega_a * (excitations @ spin_marginal))
        columns["jz"].append(projections @ spin_marginal)
        columns["n_ph"].append(photons @ photon_marginal)
        columns["parity"].append(np.einsum("mn,mnk->k", signs, probs))
        columns["norm_err"].append(np.abs(np.sqrt(spin_marginal.sum(axis=0)) - 1))
        columns["tail"].append(photon_marginal[-1])

    energy = np.concatenate(columns["energy"])
    logger.debug(
        "Charge trace: N=%i cutoff=%i lambda_eff=%g points=%i max E=%g",
        n,
        cutoff,
        params.lambda_eff,
        times.shape[0],
        float(np.max(energy)),
    )
    return ChargeTrace(
        params=params,
        taus=times,
        energy=energy,
        power=energy / times,
        n_ph=np.concatenate(columns["n_ph"]),
        jz=np.concatenate(columns["jz"]),
        parity=np.concatenate(columns["parity"]),
        norm_err=np.concatenate(columns["norm_err"]),
        tail_mass=np.concatenate(columns["tail"]),
        propagator=propagator,
        psi0=psi0,
    )


def find_max_power(trace: ChargeTrace, refine: bool = False) -> MaxPowerPoint:
    """
    Locate the maximum average charging power of a trace.

    The grid maximum is refined, on request, by a bounded scalar search of
    `tau -> E(tau) / tau` between the grid neighbours of the grid maximum, re-evolving
    the state at each trial time. The refined peak is never lower than the grid peak.

    Args:
        trace (ChargeTrace): Charge trace
        refine (bool, optional): Refine the peak off the grid. Defaults to `False`.

    Returns:
        Maximum power point
    """

    if len(trace) == 0:
        raise InvalidParameterError("Cannot find the maximum power of an empty trace")
    if not np.max(trace.power) > 0:
        return MaxPowerPoint(
            p_max=0.0,
            tau_star=float(trace.taus[0]),
            e_at_max=0.0,
            refined=False,
            degenerate=True,
        )
    index = int(np.argmax(trace.power))
    last = len(trace) - 1
    degenerate = index == last
    tau_grid = float(trace.taus[index])
    e_grid = float(trace.energy[index])
    best = MaxPowerPoint(
        p_max=e_grid / tau_grid,
        tau_star=tau_grid,
        e_at_max=e_grid,
        degenerate=degenerate,
    )
    if not refine:
        return best
    if trace.propagator is None or trace.psi0 is None:
        raise InvalidParameterError("Trace does not carry a propagator, so it cannot be refined")

    propagator = trace.propagator
    psi0 = trace.psi0
    params = trace.params

    def energy_at(tau: float) -> float:
        return stored_energy(evolve(propagator, psi0, tau), params.n, params.omega_a)

    lower = float(trace.taus[index - 1]) if index > 0 else tau_grid / 2
    upper = float(trace.taus[index + 1]) if index < last else tau_grid
    result = minimize_scalar(
        lambda tau: -average_power(energy_at(tau), tau),
        bounds=(lower, upper),
        method="bounded",
        options={"xatol": REFINE_XTOL * tau_grid},
    )
    tau_refined = float(result.x)
    e_refined = energy_at(tau_refined)
    if e_refined / tau_refined > best.p_max:
        best = MaxPowerPoint(
            p_max=e_refined / tau_refined,
            tau_star=tau_refined,
            e_at_max=e_refined,
            degenerate=degenerate,
        )
    logger.debug(
        "Refined max power: grid %r at %r -> %r at %r (%i evaluations)",
        e_grid / tau_grid,
        tau_grid,
        best.p_max,
        best.tau_star,
        result.nfev,
    )
    return MaxPowerPoint(
        p_max=best.p_max,
        tau_star=best.tau_star,
        e_at_max=best.e_at_max,
        refined=True,
        degenerate=best.degenerate,
    )


def peak_tail_mass(trace: ChargeTrace) -> float:
    """
    Largest top Fock level probability over the part of the trace the maximum power depends on,
    up to the grid point following the grid maximum.
    """

    if trace.tail_mass is None:
        raise InvalidParameterError("Trace does not record the Fock tail mass")
    index = int(np.argmax(trace.power))
    return float(np.max(trace.tail_mass[: index + 2]))


def converged_window(trace: ChargeTrace, tol: float = TAIL_MASS_TOL) -> ChargeTrace:
    """
    Cut a trace before the first grid time at which the top Fock level holds `tol` or more.

    Past that time the truncated Fock space no longer represents the dynamics, so the energy,
    photon number and `J_z` columns are dropped there. The cut always keeps the maximum power
    point and its right grid neighbour.

    Args:
        trace (ChargeTrace): Trace recording its tail mass
        tol (float, optional): Tail mass bound. Defaults to `1e-8`.

    Raises:
        InvalidParameterError: If the trace does not record the tail mass.
        NumericalError: If the bound is already broken before the maximum power is reached.

    Returns:
        Leading part of the trace, with `verified_tmax` set to its last time
    """

    if trace.tail_mass is None:
        raise InvalidParameterError("Trace does not record the Fock tail mass")
    broken = np.flatnonzero(trace.tail_mass >= tol)
    count = int(broken[0]) if broken.shape[0] else len(trace)
    needed = min(int(np.argmax(trace.power)) + 2, len(trace))
    if count < needed:
        raise NumericalError(
            (
                f"Top Fock level holds {float(trace.tail_mass[count])!r} probability at "
                f"tau={float(trace.taus[count])!r}, before the maximum power"
            ),
            dim=trace.params.resolved_cutoff + 1,
        )
    window = trace
    if count < len(trace):
        window = trace.head(count)
        logger.debug(
            "N=%i cutoff=%i: trace cut at tau=%r (%i of %i points)",
            trace.params.n,
            trace.params.resolved_cutoff,
            float(window.taus[-1]),
            count,
            len(trace),
        )
    return replace(window, verified_tmax=float(window.taus[-1]))


def first_local_max_power(trace: ChargeTrace) -> MaxPowerPoint:
    """
    Power at the first local maximum of the grid, falling back to the global maximum.
    """

    power = trace.power
    for i in range(1, len(trace) - 1):
        if power[i] > 0 and power[i] >= power[i - 1] and power[i] > power[i + 1]:
            return MaxPowerPoint(
                p_max=float(trace.energy[i]) / float(trace.taus[i]),
                tau_star=float(trace.taus[i]),
                e_at_max=float(trace.energy[i]),
            )
    return find_max_power(trace)
