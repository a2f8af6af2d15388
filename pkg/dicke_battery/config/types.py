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
Configuration base class.
"""


from __future__ import annotations

from pydantic import BaseModel, ConfigDict


class DickeConfigBase(BaseModel):
    """
    Base class for validated, immutable parameter records.

    Unknown keys are rejected, so typos in configuration files surface as errors
    naming the offending key.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", validate_default=True)
