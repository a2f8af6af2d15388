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
Collective-spin and truncated-boson operators, and the composite states they act on.

Basis ordering of the composite (spin ⊗ Fock) space is spin index major, Fock index minor,
both ascending: the amplitude of `|j, m> ⊗ |n>` lives at index `(m + j) * (cutoff + 1) + n`.
Only the symmetric (maximal spin, `j = N/2`) sector is represented.
"""


from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger
from typing import Optional, Tuple

import numpy as np

from .exceptions import InvalidParameterError, UnsupportedTagError
from .types import SpaceKind

logger = getLogger(__name__)

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12


@dataclass(frozen=True)
class SpaceTag:
    """
    Provenance of an operator or state: which Hilbert space it lives in.
    """

    kind: SpaceKind
    n: Optional[int] = None
    cutoff: Optional[int] = None

    @classmethod
    def spin(cls, n: int) -> SpaceTag:
        return cls(kind=SpaceKind.spin, n=n)

    @classmethod
    def boson(cls, cutoff: int) -> SpaceTag:
        return cls(kind=SpaceKind.boson, cutoff=cutoff)

    @classmethod
    def composite(cls, n: int, cutoff: int) -> SpaceTag:
        return cls(kind=SpaceKind.composite, n=n, cutoff=cutoff)

    @classmethod
    def qubits(cls, n: int) -> SpaceTag:
        return cls(kind=SpaceKind.qubits, n=n)

    @property
    def dim(self) -> int:
        if self.kind == SpaceKind.spin:
            return int(self.n) + 1  # type: ignore[arg-type]
        if self.kind == SpaceKind.boson:
            return int(self.cutoff) + 1  # type: ignore[arg-type]
        if self.kind == SpaceKind.composite:
            return (int(self.n) + 1) * (int(self.cutoff) + 1)  # type: ignore[arg-type]
        return 2 ** int(self.n)  # type: ignore[arg-type]


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Dense complex square matrix tagged with the Hilbert space it acts on.

    The matrix is stored read-only, so operators can be shared freely between threads
    and worker processes.
    """

    entries: np.ndarray
    space: SpaceTag
    hermitian: bool = False

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidParameterError(
                f"Operator matrix must be square, got shape {entries.shape}",
            )
        if entries.shape[0] != self.space.dim:
            raise InvalidParameterError(
                f"Operator matrix side {entries.shape[0]} does not match "
                f"the {self.space.kind.value} space dimension {self.space.dim}",
            )
        if self.hermitian and hermiticity_error(entries) >= HERMITIAN_TOL:
            raise InvalidParameterError(
                "Operator flagged Hermitian deviates from its adjoint by "
                f"{hermiticity_error(entries):.3e}",
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> Operator:
        return Operator(self.entries.conj().T, self.space, self.hermitian)

    def apply(self, psi: StateVector) -> np.ndarray:
        """
        Apply the operator to a state, returning the (generally unnormalised) amplitudes.
        """

        if psi.space != self.space:
            raise InvalidParameterError(
                f"Cannot apply a {self.space} operator to a {psi.space} state",
            )
        return self.entries @ psi.amplitudes

    def expectation(self, psi: StateVector) -> complex:
        return complex(np.vdot(psi.amplitudes, self.apply(psi)))


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    Normalised complex state vector tagged with its Hilbert space.
    """

    amplitudes: np.ndarray
    space: SpaceTag
    norm_tol: float = field(default=NORM_TOL, compare=False, repr=False)

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.shape[0] != self.space.dim:
            raise InvalidParameterError(
                f"State vector length {amplitudes.shape[0]} does not match "
                f"the {self.space.kind.value} space dimension {self.space.dim}",
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1) > self.norm_tol:
            raise InvalidParameterError(f"State vector is not normalised (norm = {norm!r})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def fidelity(self, other: StateVector) -> float:
        """
        Phase-insensitive overlap `|<self|other>|`.
        """

        return float(abs(np.vdot(self.amplitudes, other.amplitudes)))


def hermiticity_error(entries: np.ndarray) -> float:
    """
    Largest elementwise deviation of a matrix from its adjoint.
    """

    return float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0


def commutator(a: Operator, b: Operator) -> np.ndarray:
    if a.space != b.space:
        raise UnsupportedTagError(f"Cannot commute operators on {a.space} and {b.space}")
    return a.entries @ b.entries - b.entries @ a.entries


def _check_n(n: int) -> None:
    if n < 1:
        raise InvalidParameterError(f"Number of TLS must be at least 1, got {n}")


def _check_cutoff(cutoff: int) -> None:
    if cutoff < 1:
        raise InvalidParameterError(f"Fock cutoff must be at least 1, got {cutoff}")


def spin_projections(n: int) -> np.ndarray:
    """
    Ascending spin projections `m = -N/2, ..., +N/2` of the symmetric sector.
    """

    _check_n(n)
    return np.arange(n + 1, dtype=np.float64) - n / 2


def build_jz(n: int) -> Operator:
    """
    Collective `J_z` on the `j = N/2` sector, diagonal in ascending `m` order.

    Args:
        n (int): Number of two-level systems

    Returns:
        `(N+1) x (N+1)` Hermitian operator
    """

    return Operator(np.diag(spin_projections(n)), SpaceTag.spin(n), hermitian=True)


def build_jplus(n: int) -> Operator:
    """
    Collective raising operator, `J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>`.
    """

    j = n / 2
    m = spin_projections(n)[:-1]
    return Operator(np.diag(np.sqrt(j * (j + 1) - m * (m + 1)), k=-1), SpaceTag.spin(n))


def build_jx(n: int) -> Operator:
    """
    Collective `J_x = (J+ + J-) / 2`, real symmetric and tridiagonal.

    Args:
        n (int): Number of two-level systems

    Returns:
        `(N+1) x (N+1)` Hermitian operator
    """

    jplus = build_jplus(n).entries.real
    return Operator(0.5 * (jplus + jplus.T), SpaceTag.spin(n), hermitian=True)


def build_jy(n: int) -> Operator:
    jplus = build_jplus(n).entries.real
    return Operator(-0.5j * (jplus - jplus.T), SpaceTag.spin(n), hermitian=True)


def build_boson(cutoff: int) -> Tuple[Operator, Operator, Operator]:
    """
    Truncated Fock space ladder operators.

    The truncation breaks `[a, a†] = 1` at the top level only, where the commutator
    diagonal entry is `-cutoff`.

    Args:
        cutoff (int): Largest photon number kept

    Returns:
        Tuple of annihilation, creation and number operators, each `(cutoff+1)`-dimensional
    """

    _check_cutoff(cutoff)
    space = SpaceTag.boson(cutoff)
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=np.float64)), k=1)
    adag = a.T.copy()
    number = np.diag(np.arange(cutoff + 1, dtype=np.float64))
    return (
        Operator(a, space),
        Operator(adag, space),
        Operator(number, space, hermitian=True),
    )


def identity(space: SpaceTag) -> Operator:
    return Operator(np.eye(space.dim), space, hermitian=True)


def kron(a: Operator, b: Operator) -> Operator:
    """
    Tensor product of a spin operator with a boson operator (or of two qubit registers).

    Args:
        a (Operator): Left factor (spin, or qubits)
        b (Operator): Right factor (boson, or qubits)

    Raises:
        UnsupportedTagError: If the pair of spaces has no composite representation.

    Returns:
        Operator on the composite space, spin index major
    """

    if a.space.kind == SpaceKind.spin and b.space.kind == SpaceKind.boson:
        space = SpaceTag.composite(a.space.n, b.space.cutoff)  # type: ignore[arg-type]
    elif a.space.kind == SpaceKind.qubits and b.space.kind == SpaceKind.qubits:
        space = SpaceTag.qubits(a.space.n + b.space.n)  # type: ignore[operator]
    else:
        raise UnsupportedTagError(
            f"Unsupported tensor product: {a.space.kind.value} ⊗ {b.space.kind.value}",
        )
    return Operator(np.kron(a.entries, b.entries), space, a.hermitian and b.hermitian)


def kron_state(a: StateVector, b: StateVector) -> StateVector:
    """
    Tensor product of two state vectors, with the same space rules as `kron`.
    """

    if a.space.kind == SpaceKind.spin and b.space.kind == SpaceKind.boson:
        space = SpaceTag.composite(a.space.n, b.space.cutoff)  # type: ignore[arg-type]
    elif a.space.kind == SpaceKind.qubits and b.space.kind == SpaceKind.qubits:
        space = SpaceTag.qubits(a.space.n + b.space.n)  # type: ignore[operator]
    else:
        raise UnsupportedTagError(
            f"Unsupported tensor product: {a.space.kind.value} ⊗ {b.space.kind.value}",
        )
    return StateVector(
        np.kron(a.amplitudes, b.amplitudes),
        space,
        norm_tol=max(a.norm_tol, b.norm_tol),
    )


def basis_state(space: SpaceTag, index: int) -> StateVector:
    amplitudes = np.zeros(space.dim, dtype=np.complex128)
    amplitudes[index] = 1
    return StateVector(amplitudes, space)


def composite_index(m_index: int, n_photons: int, cutoff: int) -> int:
    return m_index * (cutoff + 1) + n_photons


def initial_state(n: int, cutoff: int) -> StateVector:
    """
    Empty battery and charged cavity: `|j=N/2, m=-N/2> ⊗ |n=N>`.

    Args:
        n (int): Number of two-level systems (and initial photons)
        cutoff (int): Largest photon number kept

    Raises:
        InvalidParameterError: If the cutoff cannot represent `N` photons.

    Returns:
        Composite state vector
    """

    _check_n(n)
    _check_cutoff(cutoff)
    if cutoff < n:
        raise InvalidParameterError(
            f"Fock cutoff {cutoff} cannot represent the initial {n} photons",
        )
    logger.debug("Initial state for N=%i, cutoff=%i", n, cutoff)
    return basis_state(SpaceTag.composite(n, cutoff), composite_index(0, n, cutoff))
