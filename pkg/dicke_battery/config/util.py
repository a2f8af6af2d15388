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
Configuration utility functions.
"""


from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Union

from ..exceptions import ConfigError

ConfigValue = Union[str, List[str]]


def normalize_key(key: str) -> str:
    """
    Normalise a configuration key or command line option name.

    * `n-list` -> `n_list`
    * `--fit-exclude-n1` -> `fit_exclude_n1`
    * ` Omega_A ` -> `omega_a`
    """

    return key.strip().lstrip("-").lower().replace("-", "_")


def parse_flat_lines(lines: Iterable[str], source: str = "<config>") -> Dict[str, str]:
    """
    Parse flat `key = value` configuration lines.

    Blank lines and `#` comments (whole-line or trailing) are ignored.

    Args:
        lines (Iterable[str]): Lines of the configuration document
        source (str, optional): Name used in error messages. Defaults to `<config>`.

    Raises:
        ConfigError: On lines without `=`, empty keys, or repeated keys.

    Returns:
        Mapping of normalised keys to raw string values
    """

    values: Dict[str, str] = {}
    for lineno, raw_line in enumerate(lines, start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}", key=line)
        key, value = (part.strip() for part in line.split("=", 1))
        key = normalize_key(key)
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key", key=raw_line.strip())
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}", key=key)
        values[key] = value
    return values


def parse_header_lines(lines: Iterable[str], source: str = "<header>") -> Dict[str, str]:
    """
    Parse the `# key = value` provenance block at the top of a result file.

    Parsing stops at the first line that is not a comment.
    """

    block: List[str] = []
    for line in lines:
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" in body:
            block.append(body)
    return parse_flat_lines(block, source=source)


def render_flat_lines(values: Mapping[str, str], prefix: str = "") -> List[str]:
    return [f"{prefix}{key} = {value}" for key, value in values.items()]
