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
Package exception classes.
"""


from __future__ import annotations

from typing import Optional, Sequence


class DickeBatteryError(Exception):
    """
    Package exception base class.
    """

    pass


class InvalidParameterError(DickeBatteryError, ValueError):
    """
    Error raised when a function receives a parameter outside its valid range.
    """

    pass


class UnsupportedTagError(DickeBatteryError):
    """
    Error raised when two operators with incompatible Hilbert space tags are combined.
    """

    pass


class ContractViolationError(DickeBatteryError):
    """
    Error raised when an input breaks a documented precondition (e.g. a non-Hermitian Hamiltonian).
    """

    pass


class NumericalError(DickeBatteryError):
    """
    Numerical failure exception class.

    The `dim` attribute holds the Hilbert space dimension of the failing problem, when known.
    """

    def __init__(self, msg: str, dim: Optional[int] = None) -> None:
        self.dim = dim
        super().__init__(msg)


class CutoffConvergenceError(NumericalError):
    """
    Error raised when the Fock cutoff doubling protocol hits its hard cap.

    The `evidence` attribute holds the relative maximum power deltas seen so far,
    and `cutoff` the last cutoff that was tried.
    """

    def __init__(self, msg: str, cutoff: int, evidence: Sequence[float]) -> None:
        self.cutoff = cutoff
        self.evidence = list(evidence)
        super().__init__(msg)


class ConfigError(DickeBatteryError):
    """
    Configuration exception class.

    The `key` attribute names the offending configuration key or command line token.
    """

    def __init__(self, msg: str, key: Optional[str] = None) -> None:
        self.key = key
        super().__init__(msg)


class OutputError(DickeBatteryError):
    """
    Error raised when a result file cannot be written or read back.
    """

    def __init__(self, msg: str, path: str) -> None:
        self.path = path
        super().__init__(msg)
