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
Dicke quantum battery Hamiltonian, coupling-scaling policies and cavity field relations.

All quantities are in units with `ħ = 1`; frequencies and energies share one reference unit.
"""


from __future__ import annotations

import math

from logging import getLogger
from typing import Any, Dict

import numpy as np

from pydantic import NonNegativeFloat, PositiveFloat, PositiveInt, model_validator
from typing_extensions import Self

from .config.types import DickeConfigBase
from .exceptions import InvalidParameterError
from .hilbert import (
    Operator,
    SpaceTag,
    build_boson,
    build_jx,
    build_jz,
    identity,
    kron,
    spin_projections,
)
from .types import CouplingScaling, Cutoff

logger = getLogger(__name__)

AUTO_CUTOFF_OFFSET = 8


class ModelParams(DickeConfigBase):
    """
    Parameters of one Dicke quantum battery.

    ```python
    ModelParams(n=8, lambda_base=0.5, scaling=CouplingScaling.inverse_sqrt_n)
    ```
    """

    n: PositiveInt = 1
    """
    Number of two-level systems (TLS). Also the number of photons initially in the cavity.
    """

    omega_a: PositiveFloat = 1.0
    """
    TLS level splitting.
    """

    omega_c: PositiveFloat = 1.0
    """
    Cavity mode frequency. Resonant with the TLS by default.
    """

    lambda_base: NonNegativeFloat = 0.5
    """
    Dimensionless photon-TLS coupling of a single-TLS (Rabi) battery.
    """

    scaling: CouplingScaling = CouplingScaling.inverse_sqrt_n
    """
    How the coupling depends on `n`.

    Values:

    * `constant`: the same coupling for every `n` (mode volume held fixed)
    * `invsqrt`: coupling divided by `sqrt(n)` (mode volume growing with `n`)
    """

    cutoff: Cutoff = "auto"
    """
    Largest photon number kept in the truncated Fock space, or `auto` for `2n + 8`.
    """

    @model_validator(mode="after")
    def validate_cutoff(self) -> Self:
        if self.resolved_cutoff < self.n:
            raise ValueError(
                f"cutoff ({self.resolved_cutoff}) must be at least n ({self.n}) "
                "to represent the initial photons",
            )
        return self

    @property
    def resolved_cutoff(self) -> int:
        return 2 * self.n + AUTO_CUTOFF_OFFSET if self.cutoff == "auto" else int(self.cutoff)

    @property
    def lambda_eff(self) -> float:
        return effective_coupling(self)

    @property
    def capacity(self) -> float:
        """
        Largest energy the battery can store, `n * omega_a`.
        """

        return self.n * self.omega_a

    def updated(self, **changes: Any) -> Self:
        """
        Return a validated copy with some fields changed.
        """

        values: Dict[str, Any] = {**self.model_dump(), **changes}
        return type(self).model_validate(values)

    def with_cutoff(self, cutoff: int) -> Self:
        return self.updated(cutoff=cutoff)

    def with_n(self, n: int) -> Self:
        """
        Return a copy for `n` TLS, keeping the cutoff.

        Raises:
            InvalidParameterError: If an explicit cutoff cannot hold `n` initial photons.
        """

        if self.cutoff != "auto" and int(self.cutoff) < n:
            raise InvalidParameterError(
                f"Explicit cutoff {self.cutoff} cannot represent the {n} initial photons",
            )
        return self.updated(n=n)


class CavityGeometry(DickeConfigBase):
    """
    Reference cavity of a single-TLS battery, against which other cavities are compared.
    """

    v_rabi: PositiveFloat = 1.0
    """
    Reference mode volume (arbitrary units).
    """

    f_zpf_rabi: PositiveFloat = 1.0
    """
    Zero-point field of the reference cavity (arbitrary units).
    """


REFERENCE_CAVITY = CavityGeometry()


def coupling_from_volume(geom: CavityGeometry, volume_ratio: float) -> float:
    """
    Coupling (and zero-point field) enhancement of a cavity relative to the reference one.

    The coupling is proportional to the zero-point field, which scales as `1/sqrt(V)`.

    Args:
        geom (CavityGeometry): Reference cavity
        volume_ratio (float): Mode volume divided by the reference mode volume

    Raises:
        InvalidParameterError: If the ratio is not strictly positive.

    Returns:
        `sqrt(v_rabi / V)`, i.e. `1 / sqrt(volume_ratio)`
    """

    if not volume_ratio > 0:
        raise InvalidParameterError(f"Mode volume ratio must be positive, got {volume_ratio}")
    volume = geom.v_rabi * volume_ratio
    return math.sqrt(geom.v_rabi / volume)


def effective_coupling(params: ModelParams) -> float:
    """
    Coupling actually used in the Hamiltonian after applying the scaling policy.

    Under `inverse_sqrt_n` the cavity is `n` reference cavities merged into one,
    so its mode volume is `n` times larger.
    """

    if params.scaling == CouplingScaling.constant:
        return params.lambda_base
    return params.lambda_base * coupling_from_volume(REFERENCE_CAVITY, params.n)


def field_enhancement(photons: float) -> float:
    """
    Cavity field strength in units of the zero-point field for a given photon number.
    """

    if photons < 0:
        raise InvalidParameterError(f"Photon number must be non-negative, got {photons}")
    return math.sqrt(photons)


def field_strength(geom: CavityGeometry, photons: float, volume_ratio: float = 1.0) -> float:
    """
    Absolute cavity field strength.

    One photon in a cavity shrunk by a factor `n` gives the same field as `n` photons
    in the reference cavity.

    Args:
        geom (CavityGeometry): Reference cavity
        photons (float): Photon number in the cavity
        volume_ratio (float, optional): Mode volume relative to the reference. Defaults to 1.

    Returns:
        Field strength in the units of `geom.f_zpf_rabi`
    """

    return geom.f_zpf_rabi * coupling_from_volume(geom, volume_ratio) * field_enhancement(photons)


def dicke_hamiltonian(
    n: int,
    cutoff: int,
    omega_a: float,
    omega_c: float,
    coupling: float,
) -> Operator:
    """
    Assemble `H = ω_c a†a + ω_a J_z + 2 ω_c λ J_x (a + a†)` on the composite space.

    Unlike `build_dicke_hamiltonian`, the coupling is taken as given and may be negative.
    """

    if cutoff < n:
        raise InvalidParameterError(
            f"Fock cutoff {cutoff} cannot represent the initial {n} photons",
        )
    a, adag, number = build_boson(cutoff)
    spin_identity = identity(SpaceTag.spin(n))
    boson_identity = identity(SpaceTag.boson(cutoff))
    quadrature = Operator(a.entries + adag.entries, a.space, hermitian=True)
    entries = (
        omega_c * kron(spin_identity, number).entries
        + omega_a * kron(build_jz(n), boson_identity).entries
        + (2 * omega_c * coupling) * kron(build_jx(n), quadrature).entries
    )
    logger.debug(
        "Dicke Hamiltonian: N=%i cutoff=%i omega_a=%g omega_c=%g coupling=%g dim=%i",
        n,
        cutoff,
        omega_a,
        omega_c,
        coupling,
        entries.shape[0],
    )
    return Operator(entries, SpaceTag.composite(n, cutoff), hermitian=True)


def build_dicke_hamiltonian(params: ModelParams) -> Operator:
    """
    Dicke quantum battery Hamiltonian for a parameter set, with the coupling scaling applied.

    Args:
        params (ModelParams): Battery parameters

    Returns:
        Hermitian operator on the `(n+1)(cutoff+1)`-dimensional composite space
    """

    return dicke_hamiltonian(
        n=params.n,
        cutoff=params.resolved_cutoff,
        omega_a=params.omega_a,
        omega_c=params.omega_c,
        coupling=effective_coupling(params),
    )


def excitation_operator(n: int, cutoff: int) -> Operator:
    """
    Number of excited TLS, `J_z + N/2`, on the composite space.
    """

    excitations = spin_projections(n) + n / 2
    diagonal = np.repeat(excitations, cutoff + 1)
    return Operator(np.diag(diagonal), SpaceTag.composite(n, cutoff), hermitian=True)


def photon_number_operator(n: int, cutoff: int) -> Operator:
    _, _, number = build_boson(cutoff)
    return kron(identity(SpaceTag.spin(n)), number)


def parity_signs(n: int, cutoff: int) -> np.ndarray:
    """
    Parity eigenvalue `(-1)^(k + n_ph)` of every composite basis state, where `k` counts
    excited TLS.
    """

    excitations = np.arange(n + 1)
    photons = np.arange(cutoff + 1)
    return (1 - 2 * ((excitations[:, None] + photons[None, :]) % 2)).reshape(-1)


def parity_sector(n: int, cutoff: int, parity: int) -> np.ndarray:
    """
    Composite basis indices of the `parity = ±1` sector, which the Hamiltonian leaves invariant.
    """

    if parity not in (-1, 1):
        raise InvalidParameterError(f"Parity must be +1 or -1, got {parity}")
    return np.flatnonzero(parity_signs(n, cutoff) == parity)


def parity_operator(n: int, cutoff: int) -> Operator:
    """
    Parity `Π = exp{iπ(n_ph + J_z + N/2)}`, a diagonal matrix of `±1`.
    """

    return Operator(
        np.diag(parity_signs(n, cutoff).astype(np.float64)),
        SpaceTag.composite(n, cutoff),
        hermitian=True,
    )


def build_classical_hamiltonian(omega_a: float, drive: float, n: int = 1) -> Operator:
    """
    Single-TLS Hamiltonian under a classical drive, `½ ω_a σ_z + F d σ_x`.

    The basis is ordered ground state first, so `σ_z = diag(-1, +1)`.
    The `n`-TLS Hamiltonian is the sum of `n` commuting copies of this one.

    Args:
        omega_a (float): TLS level splitting
        drive (float): Product of the field strength and the transition dipole
        n (int, optional): Number of TLS the drive acts on. Defaults to 1.

    Returns:
        2 x 2 Hermitian operator
    """

    if not omega_a > 0:
        raise InvalidParameterError(f"TLS splitting must be positive, got {omega_a}")
    if n < 1:
        raise InvalidParameterError(f"Number of TLS must be at least 1, got {n}")
    sigma_z = np.diag([-1.0, 1.0])
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    return Operator(
        0.5 * omega_a * sigma_z + float(drive) * sigma_x,
        SpaceTag.qubits(1),
        hermitian=True,
    )
