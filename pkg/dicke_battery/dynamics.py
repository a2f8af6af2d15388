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
Unitary time evolution under a time-independent Hamiltonian.

The production path diagonalises the Hamiltonian once and reuses the eigendecomposition for
every sampled time. A classic fourth-order Runge-Kutta integrator is kept as an independent
oracle for cross-checking.
"""


from __future__ import annotations

from dataclasses import dataclass
from logging import getLogger
from typing import Iterator, Optional, Sequence

import numpy as np
import scipy.linalg

from .exceptions import ContractViolationError, InvalidParameterError, NumericalError
from .hilbert import Operator, SpaceTag, StateVector, hermiticity_error

logger = getLogger(__name__)

HERMITIAN_CHECK_TOL = 1e-10
EVOLVED_NORM_TOL = 1e-10
RK4_NORM_TOL = 1e-6
TIME_CHUNK = 256


@dataclass(frozen=True, eq=False)
class Propagator:
    """
    Eigendecomposition `H = V diag(E) V†` of a Hamiltonian, used to apply `exp(-iHt)`.

    When `subspace` is set, only the block of `H` on those basis indices was decomposed
    (the block must be invariant under `H`, e.g. a parity sector), and the propagator
    only accepts states supported on it.

    Immutable once built, so one propagator can serve concurrent `evolve` calls.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    space: SpaceTag
    subspace: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        for name in ("eigenvalues", "eigenvectors", "subspace"):
            if getattr(self, name) is None:
                continue
            array = np.array(getattr(self, name))
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def dim(self) -> int:
        """
        Dimension of the full space the propagator acts on.
        """

        return self.space.dim

    @property
    def rank(self) -> int:
        """
        Number of eigenpairs held (the subspace dimension).
        """

        return self.eigenvalues.shape[0]

    @property
    def spectral_norm(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.rank else 0.0

    def orthonormality_error(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.conj().T @ v - np.eye(self.rank))))

    def reconstruction_error(self, hamiltonian: Operator) -> float:
        v = self.eigenvectors
        rebuilt = (v * self.eigenvalues[None, :]) @ v.conj().T
        entries = hamiltonian.entries
        if self.subspace is not None:
            entries = entries[np.ix_(self.subspace, self.subspace)]
        return float(np.max(np.abs(rebuilt - entries)))

    def coefficients(self, psi0: StateVector) -> np.ndarray:
        """
        Expansion coefficients of a state in the eigenbasis.

        Raises:
            InvalidParameterError: On a dimension mismatch, or a state with weight
                outside the subspace.
        """

        if psi0.space != self.space:
            raise InvalidParameterError(
                f"State on {psi0.space} does not match the propagator space {self.space}",
            )
        amplitudes = psi0.amplitudes
        if self.subspace is not None:
            outside = np.ones(self.dim, dtype=bool)
            outside[self.subspace] = False
            if np.any(amplitudes[outside]):
                raise InvalidParameterError("State has weight outside the propagator subspace")
            amplitudes = amplitudes[self.subspace]
        return self.eigenvectors.conj().T @ amplitudes

    def embed(self, block: np.ndarray) -> np.ndarray:
        """
        Map subspace amplitudes (one column per state) back to the full space.
        """

        if self.subspace is None:
            return block
        full = np.zeros((self.dim,) + block.shape[1:], dtype=np.complex128)
        full[self.subspace] = block
        return full


def diagonalize(hamiltonian: Operator, subspace: Optional[Sequence[int]] = None) -> Propagator:
    """
    Diagonalise a Hermitian Hamiltonian, optionally restricted to an invariant subspace.

    Already-diagonal matrices are decomposed exactly, with permutation-matrix eigenvectors.

    Args:
        hamiltonian (Operator): Hamiltonian to diagonalise
        subspace (Optional[Sequence[int]], optional): Basis indices of an invariant block.
            Defaults to the full space.

    Raises:
        ContractViolationError: If the matrix is not Hermitian to `1e-10`,
            or the block is not invariant under it.
        NumericalError: If the eigensolver fails to converge.

    Returns:
        Propagator with ascending eigenvalues
    """

    entries = hamiltonian.entries
    error = hermiticity_error(entries)
    if error >= HERMITIAN_CHECK_TOL:
        raise ContractViolationError(
            f"Cannot diagonalise a non-Hermitian matrix (max |H - H†| = {error:.3e})",
        )
    indices: Optional[np.ndarray] = None
    if subspace is not None:
        indices = np.unique(np.asarray(subspace, dtype=np.intp))
        outside = np.ones(hamiltonian.dim, dtype=bool)
        outside[indices] = False
        if np.any(entries[np.ix_(outside, indices)]):
            raise ContractViolationError("Subspace is not invariant under the Hamiltonian")
        entries = entries[np.ix_(indices, indices)]
    dim = entries.shape[0]
    diagonal = np.diag(entries).real
    if not np.any(entries - np.diag(np.diag(entries))):
        order = np.argsort(diagonal, kind="stable")
        eigenvectors = np.eye(dim, dtype=np.complex128)[:, order]
        logger.debug("Diagonal Hamiltonian of dimension %i, skipping eigensolver", dim)
        return Propagator(diagonal[order], eigenvectors, hamiltonian.space, indices)
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(entries)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise NumericalError(
            f"Eigensolver failed for a Hamiltonian of dimension {dim}: {err}",
            dim=dim,
        ) from err
    logger.debug(
        "Diagonalised Hamiltonian of dimension %i (spectrum %g .. %g)",
        dim,
        eigenvalues[0],
        eigenvalues[-1],
    )
    return Propagator(
        np.asarray(eigenvalues, dtype=np.float64),
        np.asarray(eigenvectors, dtype=np.complex128),
        hamiltonian.space,
        indices,
    )


def evolve(prop: Propagator, psi0: StateVector, t: float) -> StateVector:
    """
    Evolve a state for time `t` (negative times evolve backwards).

    Args:
        prop (Propagator): Decomposed Hamiltonian
        psi0 (StateVector): Initial state
        t (float): Evolution time

    Raises:
        InvalidParameterError: On a space mismatch or a non-finite time.

    Returns:
        `V exp(-iEt) V† psi0`
    """

    coefficients = prop.coefficients(psi0)
    if not np.isfinite(t):
        raise InvalidParameterError(f"Evolution time must be finite, got {t}")
    if t == 0:
        return psi0
    amplitudes = prop.embed(
        prop.eigenvectors @ (np.exp(-1j * prop.eigenvalues * t) * coefficients),
    )
    return StateVector(amplitudes, psi0.space, norm_tol=EVOLVED_NORM_TOL)


def evolve_many(
    prop: Propagator,
    psi0: StateVector,
    taus: Sequence[float],
    chunk: int = TIME_CHUNK,
) -> Iterator[np.ndarray]:
    """
    Evolve a state to every time of a grid, yielding amplitude blocks.

    Each yielded block has shape `(dim, k)`, holding the states of `k` consecutive times,
    so memory stays bounded on long grids.
    """

    coefficients = prop.coefficients(psi0)
    times = np.asarray(taus, dtype=np.float64)
    for start in range(0, times.shape[0], chunk):
        block = times[start : start + chunk]
        phases = np.exp(-1j * prop.eigenvalues[:, None] * block[None, :])
        yield prop.embed(prop.eigenvectors @ (phases * coefficients[:, None]))


def evolve_rk4_oracle(
    hamiltonian: Operator,
    psi0: StateVector,
    t: float,
    steps: int,
) -> StateVector:
    """
    Integrate `dψ/dt = -iHψ` with the classic fourth-order Runge-Kutta scheme.

    The step count must be chosen by the caller so that `(‖H‖ t / steps)^5 * steps`
    is below the wanted accuracy. The result is not renormalised.

    Args:
        hamiltonian (Operator): Hamiltonian
        psi0 (StateVector): Initial state
        t (float): Evolution time
        steps (int): Number of equal integration steps

    Returns:
        State at time `t`
    """

    if steps < 1:
        raise InvalidParameterError(f"RK4 step count must be at least 1, got {steps}")
    if psi0.dim != hamiltonian.dim:
        raise InvalidParameterError(
            f"State dimension {psi0.dim} does not match Hamiltonian dimension {hamiltonian.dim}",
        )
    if t == 0:
        return psi0
    h = -1j * np.asarray(hamiltonian.entries)
    dt = t / steps
    half = dt / 2
    psi = np.array(psi0.amplitudes)
    for _ in range(steps):
        k1 = h @ psi
        k2 = h @ (psi + half * k1)
        k3 = h @ (psi + half * k2)
        k4 = h @ (psi + dt * k3)
        psi = psi + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    logger.debug("RK4 oracle: dim=%i t=%g steps=%i", hamiltonian.dim, t, steps)
    return StateVector(psi, psi0.space, norm_tol=RK4_NORM_TOL)


@dataclass(frozen=True)
class ConservationReport:
    """
    Largest drifts of conserved quantities over a time grid.
    """

    norm_drift: float
    energy_drift: float
    spectral_norm: float
    parity_drift: Optional[float] = None


def conservation_drifts(
    hamiltonian: Operator,
    prop: Propagator,
    psi0: StateVector,
    taus: Sequence[float],
    parity: Optional[Operator] = None,
) -> ConservationReport:
    """
    Measure norm, energy and (optionally) parity drift of the evolved state over a time grid.
    """

    h = np.asarray(hamiltonian.entries)
    energy0 = hamiltonian.expectation(psi0).real
    parity_diag = np.diag(parity.entries).real if parity is not None else None
    parity0 = parity.expectation(psi0).real if parity is not None else 0.0
    norm_drift = energy_drift = parity_drift = 0.0
    for block in evolve_many(prop, psi0, taus):
        norms = np.linalg.norm(block, axis=0)
        norm_drift = max(norm_drift, float(np.max(np.abs(norms - 1))))
        energies = np.einsum("ij,ij->j", block.conj(), h @ block).real
        energy_drift = max(energy_drift, float(np.max(np.abs(energies - energy0))))
        if parity_diag is not None:
            parities = (np.abs(block) ** 2).T @ parity_diag
            parity_drift = max(parity_drift, float(np.max(np.abs(parities - parity0))))
    return ConservationReport(
        norm_drift=norm_drift,
        energy_drift=energy_drift,
        spectral_norm=prop.spectral_norm,
        parity_drift=parity_drift if parity is not None else None,
    )
