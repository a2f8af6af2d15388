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
Collective-spin, boson and composite-space construction tests.
"""


from __future__ import annotations

import numpy as np
import pytest

from dicke_battery.exceptions import InvalidParameterError, UnsupportedTagError
from dicke_battery.hilbert import (
    SpaceTag,
    StateVector,
    basis_state,
    build_boson,
    build_jx,
    build_jy,
    build_jz,
    commutator,
    composite_index,
    identity,
    initial_state,
    kron,
    kron_state,
)
from dicke_battery.model import excitation_operator, photon_number_operator


@pytest.mark.parametrize(
    ("n", "expected"),
    [(1, [-0.5, 0.5]), (2, [-1.0, 0.0, 1.0]), (4, [-2.0, -1.0, 0.0, 1.0, 2.0])],
)
def test_jz_ascending_projections(n, expected):
    jz = build_jz(n)
    assert jz.dim == n + 1
    assert jz.hermitian
    assert np.array_equal(np.diag(jz.entries).real, expected)
    assert not np.any(jz.entries - np.diag(np.diag(jz.entries)))


@pytest.mark.parametrize("builder", [build_jz, build_jx])
def test_spin_builders_reject_zero_tls(builder):
    with pytest.raises(InvalidParameterError):
        builder(0)


def test_jx_single_tls_is_half_pauli_x():
    assert np.array_equal(build_jx(1).entries, [[0, 0.5], [0.5, 0]])


def test_jx_spin_one_ladder_coefficients():
    jx = build_jx(2).entries
    assert np.allclose(np.diag(jx, k=1), [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)
    assert np.allclose(np.diag(jx, k=-1), [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)
    assert np.array_equal(jx, jx.T)
    assert not np.any(jx.imag)


@pytest.mark.parametrize("n", range(1, 13))
def test_jx_is_traceless_and_tridiagonal(n):
    jx = build_jx(n).entries
    assert abs(np.trace(jx)) == 0
    assert not np.any(np.triu(jx, k=2))
    assert not np.any(np.tril(jx, k=-2))


@pytest.mark.parametrize("n", range(1, 13))
def test_angular_momentum_algebra(n):
    jx, jz = build_jx(n), build_jz(n)
    jy = 1j * commutator(jx, jz)
    assert np.max(np.abs(jy - build_jy(n).entries)) < 1e-12
    assert np.max(np.abs(commutator(jx, jz) + 1j * jy)) < 1e-12
    j = n / 2
    casimir = jx.entries @ jx.entries + jy @ jy + jz.entries @ jz.entries
    assert np.max(np.abs(casimir - j * (j + 1) * np.eye(n + 1))) < 1e-10


def test_builders_are_deterministic():
    assert np.array_equal(build_jx(7).entries, build_jx(7).entries)
    assert np.array_equal(build_boson(9)[0].entries, build_boson(9)[0].entries)


def test_boson_single_level():
    a, adag, number = build_boson(1)
    assert np.array_equal(a.entries, [[0, 1], [0, 0]])
    assert np.array_equal(adag.entries, a.entries.conj().T)
    assert np.array_equal(np.diag(number.entries).real, [0, 1])


def test_boson_ladder_and_truncation_boundary():
    cutoff = 3
    a, adag, number = build_boson(cutoff)
    assert np.array_equal(np.diag(a.entries, k=1), np.sqrt([1.0, 2.0, 3.0]))
    assert np.array_equal(adag.entries, a.dagger().entries)
    assert np.allclose(number.entries, adag.entries @ a.entries, atol=1e-12)
    comm = a.entries @ adag.entries - adag.entries @ a.entries
    expected = np.eye(cutoff + 1)
    expected[-1, -1] = -cutoff
    assert np.allclose(comm, expected, atol=1e-12)


def test_boson_rejects_zero_cutoff():
    with pytest.raises(InvalidParameterError):
        build_boson(0)


def test_kron_identities():
    product = kron(identity(SpaceTag.spin(1)), identity(SpaceTag.boson(2)))
    assert np.array_equal(product.entries, np.eye(6))
    assert product.space == SpaceTag.composite(1, 2)


@pytest.mark.parametrize(("n", "cutoff"), [(1, 4), (3, 7), (6, 20)])
def test_kron_dimension(n, cutoff):
    op = kron(build_jz(n), build_boson(cutoff)[2])
    assert op.dim == (n + 1) * (cutoff + 1)


def test_kron_acts_factorwise(rng):
    jx = build_jx(3)
    a = build_boson(5)[0]
    x = rng.normal(size=4) + 1j * rng.normal(size=4)
    y = rng.normal(size=6) + 1j * rng.normal(size=6)
    lhs = kron(jx, a).entries @ np.kron(x, y)
    rhs = np.kron(jx.entries @ x, a.entries @ y)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_kron_preserves_jz_eigenvectors():
    n, cutoff = 4, 6
    op = kron(build_jz(n), identity(SpaceTag.boson(cutoff)))
    for m_index in range(n + 1):
        for photons in (0, 3, cutoff):
            index = composite_index(m_index, photons, cutoff)
            state = basis_state(SpaceTag.composite(n, cutoff), index)
            assert np.array_equal(op.apply(state), (m_index - n / 2) * state.amplitudes)


def test_kron_rejects_composite_factors():
    composite = kron(build_jz(1), build_boson(1)[2])
    with pytest.raises(UnsupportedTagError):
        kron(composite, composite)
    with pytest.raises(UnsupportedTagError):
        kron(build_boson(2)[0], build_jz(2))


def test_initial_state_single_tls():
    psi = initial_state(1, 4)
    expected = np.zeros(10)
    expected[composite_index(0, 1, 4)] = 1
    assert np.array_equal(psi.amplitudes, expected)


@pytest.mark.parametrize(("n", "cutoff"), [(1, 4), (3, 12), (8, 24)])
def test_initial_state_observables(n, cutoff):
    psi = initial_state(n, cutoff)
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12
    jz = kron(build_jz(n), identity(SpaceTag.boson(cutoff)))
    assert jz.expectation(psi).real == -n / 2
    assert photon_number_operator(n, cutoff).expectation(psi).real == n
    assert excitation_operator(n, cutoff).expectation(psi).real == 0


def test_initial_state_requires_representable_photons():
    with pytest.raises(InvalidParameterError):
        initial_state(5, 4)


def test_state_vector_rejects_unnormalised_amplitudes():
    with pytest.raises(InvalidParameterError):
        StateVector(np.array([1.0, 1.0]), SpaceTag.qubits(1))


def test_kron_state_builds_product_register():
    plus = StateVector(np.array([1, 1]) / np.sqrt(2), SpaceTag.qubits(1))
    register = kron_state(plus, plus)
    assert register.space == SpaceTag.qubits(2)
    assert np.allclose(register.amplitudes, 0.5)
