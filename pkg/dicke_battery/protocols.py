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
Experiment protocols: coupling-policy N-sweeps with scaling fits, Fock cutoff convergence,
and the classical-drive separability check.
"""


from __future__ import annotations

import math

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from logging import getLogger
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from scipy.stats import linregress

from .dynamics import diagonalize, evolve
from .exceptions import CutoffConvergenceError, InvalidParameterError
from .hilbert import Operator, SpaceTag, StateVector, basis_state, identity, kron, kron_state
from .model import ModelParams, build_classical_hamiltonian, field_enhancement
from .observables import (
    ChargeTrace,
    TAIL_MASS_TOL,
    MaxPowerPoint,
    converged_window,
    default_time_grid,
    find_max_power,
    peak_tail_mass,
    trace_charge,
    validate_time_grid,
)
from .types import CouplingScaling

logger = getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_CUTOFF = 4096
CONSECUTIVE_CONVERGED = 2
MIN_FIT_POINTS = 3
MAX_SEPARABILITY_N = 4
DEFAULT_DRIVE_NORMALIZATION = 2.0


@dataclass(frozen=True)
class PowerLawFit:
    """
    Least-squares fit of `log P_max = exponent * log N + intercept`.

    `residual` is the root-mean-square log residual, `stderr` the standard error
    of the exponent.
    """

    exponent: float
    intercept: float
    residual: float
    stderr: float
    points: int


@dataclass(frozen=True)
class SweepRow:
    n: int
    lambda_eff: float
    cutoff: int
    p_max: float
    tau_star: float
    e_at_max: float
    degenerate: bool = False
    tail_mass: float = 0.0
    verified_tmax: Optional[float] = None


@dataclass(frozen=True, eq=False)
class SweepResult:
    """
    Per-N maximum-power summary of one coupling policy, with its scaling fit.

    The fit is only present with at least three rows; it is marked untrusted
    when any row hit a degenerate maximum.
    """

    policy: CouplingScaling
    rows: Tuple[SweepRow, ...]
    fit: Optional[PowerLawFit]
    trusted: bool
    traces: Dict[int, ChargeTrace] = field(default_factory=dict)


@dataclass(frozen=True)
class CutoffStep:
    cutoff: int
    p_max: float
    tail_mass: float


@dataclass(frozen=True, eq=False)
class CutoffConvergence:
    """
    Outcome of the cutoff doubling protocol.

    `evidence` holds the relative maximum-power change of every doubling step. `trace` is
    the accepted trace cut to its converged window (see `converged_window`).
    """

    cutoff: int
    evidence: Tuple[float, ...]
    tail_mass: float
    trace: ChargeTrace
    steps: Tuple[CutoffStep, ...] = ()


@dataclass(frozen=True, eq=False)
class SeparabilityReport:
    """
    Comparison of full register evolution with a product of single-TLS evolutions.

    `fidelity_deficit` is the worst `1 - |<full|product>|` over the sampled times, and
    `energy_ratio` the sampled `E_total / (N E_single)` furthest from one.
    """

    n: int
    fidelity_deficit: float
    energy_ratio: float
    times: np.ndarray
    deficits: np.ndarray
    ratios: np.ndarray


@dataclass(frozen=True, eq=False)
class ClassicalTrace:
    """
    Energy and average power of `n` independently driven TLS.
    """

    n: int
    omega_a: float
    drive: float
    taus: np.ndarray
    e_single: np.ndarray
    e_total: np.ndarray
    p_total: np.ndarray


def _relative_delta(previous: float, current: float) -> float:
    if previous == current:
        return 0.0
    if current == 0:
        return math.inf
    return abs(previous - current) / abs(current)


def converge_cutoff(
    params: ModelParams,
    taus: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_cutoff: int = DEFAULT_MAX_CUTOFF,
) -> CutoffConvergence:
    """
    Double the Fock cutoff until the maximum charging power stops changing.

    Starting from the parameter set's cutoff (`2n + 8` when `auto`), the grid maximum power
    is compared between successive doublings. A cutoff is accepted once the two doubling
    steps following it both change the maximum power by less than `tol` (relative), and the
    top Fock level never holds more than `1e-8` probability up to the maximum power time.
    The accepted trace is then cut where its tail mass first reaches `1e-8`.

    Args:
        params (ModelParams): Battery parameters
        taus (Sequence[float]): Charging-time grid
        tol (float, optional): Relative tolerance. Defaults to `1e-6`.
        max_cutoff (int, optional): Hard cap on the cutoff. Defaults to `4096`.

    Raises:
        CutoffConvergenceError: If the cap is reached before convergence.

    Returns:
        Accepted cutoff, the delta evidence, the accepted tail mass and trace
    """

    if not tol > 0:
        raise InvalidParameterError(f"Convergence tolerance must be positive, got {tol}")
    times = validate_time_grid(taus)
    cutoff = params.resolved_cutoff
    if cutoff > max_cutoff:
        raise CutoffConvergenceError(
            f"Seed cutoff {cutoff} already exceeds the cap {max_cutoff}",
            cutoff=cutoff,
            evidence=[],
        )
    history: List[Tuple[int, ChargeTrace, float, float]] = []
    evidence: List[float] = []
    steps: List[CutoffStep] = []
    while True:
        trace = trace_charge(params.with_cutoff(cutoff), times)
        p_max = find_max_power(trace).p_max
        tail = peak_tail_mass(trace)
        steps.append(CutoffStep(cutoff=cutoff, p_max=p_max, tail_mass=tail))
        if history:
            evidence.append(_relative_delta(history[-1][2], p_max))
            logger.info(
                "N=%i cutoff %i -> %i: max power %r (relative change %.3e)",
                params.n,
                history[-1][0],
                cutoff,
                p_max,
                evidence[-1],
            )
        # At most three traces are held, without their propagators.
        stripped = replace(trace, propagator=None, psi0=None)
        history = [*history[-CONSECUTIVE_CONVERGED:], (cutoff, stripped, p_max, tail)]
        if len(evidence) >= CONSECUTIVE_CONVERGED and all(
            delta < tol for delta in evidence[-CONSECUTIVE_CONVERGED:]
        ):
            accepted_cutoff, accepted_trace, _, tail_mass = history[0]
            if tail_mass < TAIL_MASS_TOL:
                logger.info(
                    "N=%i: accepted cutoff %i (tail mass %.3e)",
                    params.n,
                    accepted_cutoff,
                    tail_mass,
                )
                return CutoffConvergence(
                    cutoff=accepted_cutoff,
                    evidence=tuple(evidence),
                    tail_mass=tail_mass,
                    trace=converged_window(accepted_trace),
                    steps=tuple(steps),
                )
            logger.info(
                "N=%i: cutoff %i converged in power but tail mass is %.3e, doubling further",
                params.n,
                accepted_cutoff,
                tail_mass,
            )
        cutoff *= 2
        if cutoff > max_cutoff:
            raise CutoffConvergenceError(
                (
                    f"Fock cutoff for N={params.n} did not converge below the cap {max_cutoff} "
                    f"(relative changes: {', '.join(f'{d:.3e}' for d in evidence)})"
                ),
                cutoff=cutoff // 2,
                evidence=evidence,
            )


def fit_power_law(
    ns: Sequence[int],
    p_max: Sequence[float],
    exclude_n1: bool = False,
) -> Optional[PowerLawFit]:
    """
    Fit `P_max ∝ N^exponent` by unweighted least squares on `(log N, log P_max)`.

    Args:
        ns (Sequence[int]): TLS counts
        p_max (Sequence[float]): Maximum powers
        exclude_n1 (bool, optional): Leave the `N = 1` point out. Defaults to `False`.

    Returns:
        Fit, or `None` when fewer than three usable (positive-power) points remain
    """

    points = [
        (n, p) for n, p in zip(ns, p_max) if p > 0 and not (exclude_n1 and n == 1)
    ]
    if len(points) < MIN_FIT_POINTS:
        return None
    log_n = np.log([float(n) for n, _ in points])
    log_p = np.log([p for _, p in points])
    result = linregress(log_n, log_p)
    residuals = log_p - (result.slope * log_n + result.intercept)
    return PowerLawFit(
        exponent=float(result.slope),
        intercept=float(result.intercept),
        residual=float(np.sqrt(np.mean(residuals**2))),
        stderr=float(result.stderr),
        points=len(points),
    )


@dataclass(frozen=True)
class _RowJob:
    params: ModelParams
    steps: int
    t_max: Optional[float]
    refine: bool
    converge: bool
    tol: float
    max_cutoff: int


def _run_row(job: _RowJob) -> Tuple[SweepRow, ChargeTrace]:
    params = job.params
    taus = default_time_grid(params, steps=job.steps, t_max=job.t_max)
    if job.converge:
        convergence = converge_cutoff(params, taus, tol=job.tol, max_cutoff=job.max_cutoff)
        params = params.with_cutoff(convergence.cutoff)
        trace = convergence.trace
        if job.refine:
            trace = converged_window(trace_charge(params, taus))
    else:
        trace = trace_charge(params, taus)
    point: MaxPowerPoint = find_max_power(trace, refine=job.refine)
    row = SweepRow(
        n=params.n,
        lambda_eff=params.lambda_eff,
        cutoff=trace.params.resolved_cutoff,
        p_max=point.p_max,
        tau_star=point.tau_star,
        e_at_max=point.e_at_max,
        degenerate=point.degenerate,
        tail_mass=float(np.max(trace.tail_mass)),  # type: ignore[arg-type]
        verified_tmax=trace.verified_tmax,
    )
    logger.info(
        "N=%i lambda_eff=%r cutoff=%i: P_max=%r at tau=%r%s",
        row.n,
        row.lambda_eff,
        row.cutoff,
        row.p_max,
        row.tau_star,
        " (degenerate)" if row.degenerate else "",
    )
    return row, replace(trace, propagator=None, psi0=None)


def run_sweep(
    n_list: Iterable[int],
    base: ModelParams,
    policy: CouplingScaling,
    steps: int = 2000,
    t_max: Optional[float] = None,
    refine: bool = True,
    exclude_n1: bool = False,
    tol: float = DEFAULT_TOL,
    max_cutoff: int = DEFAULT_MAX_CUTOFF,
    jobs: int = 1,
) -> SweepResult:
    """
    Sweep the number of TLS under one coupling policy and fit the power scaling exponent.

    Rows are independent and may be computed by a pool of `jobs` worker processes;
    the result is ordered by N whatever the pool size. With an `auto` cutoff in `base`,
    every row's cutoff goes through the doubling protocol and its trace is cut to the converged
    window; an explicit cutoff is used as given for every row.

    Args:
        n_list (Iterable[int]): TLS counts (duplicates are dropped)
        base (ModelParams): Template parameters; `n` and `scaling` are overridden
        policy (CouplingScaling): Coupling scaling policy
        steps (int, optional): Time grid points per row. Defaults to 2000.
        t_max (Optional[float], optional): Fixed charging window, or adaptive when `None`.
        refine (bool, optional): Refine each maximum off the grid. Defaults to `True`.
        exclude_n1 (bool, optional): Leave `N = 1` out of the fit. Defaults to `False`.
        tol (float, optional): Cutoff convergence tolerance. Defaults to `1e-6`.
        max_cutoff (int, optional): Cutoff hard cap. Defaults to `4096`.
        jobs (int, optional): Worker processes. Defaults to 1 (in-process).

    Returns:
        Sweep result
    """

    ns = sorted(set(int(n) for n in n_list))
    if not ns:
        raise InvalidParameterError("Sweep needs at least one TLS count")
    if jobs < 1:
        raise InvalidParameterError(f"Worker count must be at least 1, got {jobs}")
    if base.cutoff != "auto" and int(base.cutoff) < ns[-1]:
        raise InvalidParameterError(
            f"Explicit cutoff {base.cutoff} cannot represent the {ns[-1]} initial photons "
            "of the largest sweep row",
        )
    row_jobs = [
        _RowJob(
            params=base.with_n(n).updated(scaling=policy),
            steps=steps,
            t_max=t_max,
            refine=refine,
            converge=base.cutoff == "auto",
            tol=tol,
            max_cutoff=max_cutoff,
        )
        for n in ns
    ]
    logger.info("Sweeping N=%s under '%s' scaling with %i job(s)", ns, policy.value, jobs)
    if jobs == 1:
        outcomes = [_run_row(job) for job in row_jobs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(_run_row, row_jobs))
    rows = tuple(row for row, _ in outcomes)
    fit = fit_power_law([r.n for r in rows], [r.p_max for r in rows], exclude_n1=exclude_n1)
    trusted = fit is not None and not any(r.degenerate for r in rows)
    if fit is not None:
        logger.info(
            "'%s' scaling: exponent %.6f ± %.6f (residual %.3e)%s",
            policy.value,
            fit.exponent,
            fit.stderr,
            fit.residual,
            "" if trusted else " [untrusted: degenerate maximum]",
        )
    return SweepResult(
        policy=policy,
        rows=rows,
        fit=fit,
        trusted=trusted,
        traces={row.n: trace for row, trace in outcomes},
    )


def classical_rabi_energy(omega_a: float, drive: float, t: float) -> float:
    """
    Closed-form energy of one classically driven TLS started in its ground state.

    `E(t) = omega_a * d^2 / (d^2 + (omega_a/2)^2) * sin^2(sqrt(d^2 + (omega_a/2)^2) * t)`
    where `d` is the drive.
    """

    if not omega_a > 0:
        raise InvalidParameterError(f"TLS splitting must be positive, got {omega_a}")
    rabi_sq = drive**2 + (omega_a / 2) ** 2
    return omega_a * drive**2 / rabi_sq * math.sin(math.sqrt(rabi_sq) * t) ** 2


def default_drive(params: ModelParams, normalization: float = DEFAULT_DRIVE_NORMALIZATION) -> float:
    """
    Classical drive matching the cavity field of `n` photons at the effective coupling,
    `normalization * lambda_eff * omega_c * sqrt(n)`.
    """

    return normalization * params.lambda_eff * params.omega_c * field_enhancement(params.n)


def _register_hamiltonian(single: Operator, n: int) -> Operator:
    qubit_identity = identity(SpaceTag.qubits(1))
    total = np.zeros((2**n, 2**n), dtype=np.complex128)
    for site in range(n):
        term = single if site == 0 else qubit_identity
        for other in range(1, n):
            term = kron(term, single if other == site else qubit_identity)
        total = total + term.entries
    return Operator(total, SpaceTag.qubits(n), hermitian=True)


def _excited_counts(n: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(2**n)], dtype=np.float64)


def classical_separability_check(
    n: int,
    omega_a: float,
    drive: float,
    t_samples: Sequence[float],
) -> SeparabilityReport:
    """
    Check that a classically driven register stays a product of single-TLS states.

    The full `2^n`-dimensional register is evolved under the summed Hamiltonian and compared,
    at every sampled time, with the tensor product of `n` independently evolved TLS.

    Args:
        n (int): Number of TLS, at most 4
        omega_a (float): TLS level splitting
        drive (float): Classical drive `F d`
        t_samples (Sequence[float]): Times to compare at

    Raises:
        InvalidParameterError: If `n` is outside `1..4`.

    Returns:
        Separability report
    """

    if not 1 <= n <= MAX_SEPARABILITY_N:
        raise InvalidParameterError(
            f"Separability check materialises the full register and is limited to "
            f"1 <= N <= {MAX_SEPARABILITY_N}, got {n}",
        )
    single = build_classical_hamiltonian(omega_a, drive, n)
    single_prop = diagonalize(single)
    full_prop = diagonalize(_register_hamiltonian(single, n))
    ground_single = basis_state(SpaceTag.qubits(1), 0)
    ground_full = basis_state(SpaceTag.qubits(n), 0)
    counts = _excited_counts(n)

    times = np.asarray(t_samples, dtype=np.float64)
    deficits = np.zeros(times.shape[0])
    ratios = np.ones(times.shape[0])
    for i, t in enumerate(times):
        psi_single = evolve(single_prop, ground_single, float(t))
        psi_full = evolve(full_prop, ground_full, float(t))
        product: StateVector = psi_single
        for _ in range(1, n):
            product = kron_state(product, psi_single)
        deficits[i] = 1 - psi_full.fidelity(product)
        e_single = omega_a * float(psi_single.probabilities[1])
        e_total = omega_a * float(counts @ psi_full.probabilities)
        if e_single > 0:
            ratios[i] = e_total / (n * e_single)
        elif e_total != 0:
            ratios[i] = math.inf
    worst = int(np.argmax(np.abs(ratios - 1))) if times.shape[0] else 0
    report = SeparabilityReport(
        n=n,
        fidelity_deficit=float(np.max(deficits)) if times.shape[0] else 0.0,
        energy_ratio=float(ratios[worst]) if times.shape[0] else 1.0,
        times=times,
        deficits=deficits,
        ratios=ratios,
    )
    logger.info(
        "Classical drive N=%i Fd=%r: fidelity deficit %.3e, energy ratio %r",
        n,
        drive,
        report.fidelity_deficit,
        report.energy_ratio,
    )
    return report


def classical_charge_trace(
    omega_a: float,
    drive: float,
    n: int,
    taus: Sequence[float],
) -> ClassicalTrace:
    """
    Charge `n` independent TLS with a classical drive.

    The TLS never interact, so the total stored energy is exactly `n` times that of one TLS.
    """

    if n < 1:
        raise InvalidParameterError(f"Number of TLS must be at least 1, got {n}")
    times = validate_time_grid(taus)
    e_single = np.array([classical_rabi_energy(omega_a, drive, float(t)) for t in times])
    e_total = n * e_single
    return ClassicalTrace(
        n=n,
        omega_a=omega_a,
        drive=drive,
        taus=times,
        e_single=e_single,
        e_total=e_total,
        p_total=e_total / times,
    )
