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
Package utility functions.
"""


from __future__ import annotations

import logging
import math


LOG_FORMAT = "%(asctime)s %(name)s [%(levelname)s] %(message)s"


def configure_logging(level: str = "WARNING") -> None:
    """
    Configure the root logger for command line use.

    Library modules only ever create their own loggers, so this is called
    exactly once, from the command line entry point.

    Args:
        level (str, optional): Log level name. Defaults to `WARNING`.
    """

    logging.basicConfig(format=LOG_FORMAT, level=level.upper(), force=True)


def format_float(value: float) -> str:
    """
    Render a float with 17 significant digits, so that parsing it back is exact.

    Zeros of either sign are rendered as `0`.

    Args:
        value (float): Value to render

    Returns:
        Round-trip exact decimal string
    """

    value = float(value)
    if value == 0:
        return "0"
    if not math.isfinite(value):
        return repr(value)
    return format(value, ".17g")
