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
Package type hints and enumerations.
"""


from __future__ import annotations

from enum import Enum
from typing import Literal, Union

from pydantic import PositiveInt


class CouplingScaling(str, Enum):
    """
    How the dimensionless photon-TLS coupling depends on the number of TLS.

    * `constant`: the same coupling for every N (cavity mode volume held fixed).
    * `inverse_sqrt_n`: coupling divided by the square root of N
      (mode volume growing linearly with N).
    """

    constant = "constant"
    inverse_sqrt_n = "invsqrt"

    @classmethod
    def _missing_(cls, value: object) -> CouplingScaling | None:
        if isinstance(value, str):
            normalized = value.strip().lower().replace("-", "_")
            if normalized in ("inverse_sqrt_n", "invsqrt", "inv_sqrt"):
                return cls.inverse_sqrt_n
            if normalized == "constant":
                return cls.constant
        return None


class SpaceKind(str, Enum):
    """
    Kinds of Hilbert space an operator or state vector can live in.
    """

    spin = "spin"
    boson = "boson"
    composite = "composite"
    qubits = "qubits"


Command = Literal["charge", "sweep", "classical", "converge"]

Cutoff = Union[PositiveInt, Literal["auto"]]
