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
Run configuration: command line flags and flat configuration files, merged and validated.
"""


from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Optional

from pydantic import (
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)
from typing_extensions import Self

from ..exceptions import ConfigError
from ..types import Command, CouplingScaling, Cutoff
from ..util import format_float
from .types import DickeConfigBase
from .util import normalize_key

if TYPE_CHECKING:
    from ..model import ModelParams

DEFAULT_OUTPUTS: Dict[str, str] = {
    "charge": "charge.csv",
    "sweep": "sweep.csv",
    "classical": "classical.csv",
    "converge": "converge.csv",
}
DEFAULT_SVG = "sweep.svg"
AUTO_VALUES = ("auto", "none", "")


class RunConfig(DickeConfigBase):
    """
    Fully resolved configuration of one command line run.

    Values come from, in increasing order of precedence, the field defaults,
    a flat configuration file, and command line flags:

    ```
    # battery.conf
    n_list = 2, 4, 6, 8, 10, 12
    coupling = 0.5
    scaling = constant
    refine = true
    ```
    """

    command: Command = "charge"
    """
    Experiment to run: `charge`, `sweep`, `classical` or `converge`.
    """

    n: PositiveInt = 1
    """
    Number of TLS for single-battery commands.
    """

    n_list: List[PositiveInt] = [1, 2, 4, 6, 8, 10, 12]
    """
    TLS counts of a sweep. Written as a comma-separated list in configuration files.
    """

    coupling: NonNegativeFloat = 0.5
    """
    Dimensionless single-TLS coupling, before the scaling policy is applied.
    """

    scaling: CouplingScaling = CouplingScaling.inverse_sqrt_n
    """
    Coupling scaling policy, `constant` or `invsqrt`.
    """

    omega_a: PositiveFloat = 1.0
    """
    TLS level splitting.
    """

    omega_c: PositiveFloat = 1.0
    """
    Cavity mode frequency.
    """

    cutoff: Cutoff = "auto"
    """
    Fock cutoff, or `auto` to run the cutoff doubling protocol from `2n + 8`.
    """

    tmax: Optional[PositiveFloat] = None
    """
    Charging window length, or `auto` to follow the collective Rabi time scale.
    """

    steps: PositiveInt = 2000
    """
    Number of charging-time grid points.
    """

    refine: bool = False
    """
    Refine maximum-power points off the grid.
    """

    jobs: PositiveInt = 1
    """
    Worker processes used by sweeps.
    """

    out: Optional[Path] = None
    """
    CSV output path. Defaults to `<command>.csv`.
    """

    svg: Optional[Path] = None
    """
    SVG plot path of sweeps. Defaults to `sweep.svg`.
    """

    fit_exclude_n1: bool = False
    """
    Leave `N = 1` out of the scaling exponent fit.
    """

    drive: Optional[float] = None
    """
    Classical drive `F d`, or `auto` for `drive_normalization * lambda_eff * omega_c * sqrt(n)`.
    """

    drive_normalization: PositiveFloat = 2.0
    """
    Zero-point normalisation of the automatic classical drive.
    """

    tol: PositiveFloat = 1e-6
    """
    Relative tolerance of the cutoff doubling protocol.
    """

    max_cutoff: PositiveInt = 4096
    """
    Hard cap of the cutoff doubling protocol.
    """

    times: List[NonNegativeFloat] = [0.5, 1.0, 2.0, 5.0, 10.0]
    """
    Sample times of the classical separability check.
    """

    seed: Optional[int] = None
    """
    Random seed, only used by property tests.
    """

    @model_validator(mode="before")
    @classmethod
    def parse_text_values(cls, values: Any) -> Any:
        if not isinstance(values, Mapping):
            return values
        parsed: Dict[str, Any] = {}
        for key, value in values.items():
            if isinstance(value, str):
                text = value.strip()
                if key in ("n_list", "times"):
                    value = [item.strip() for item in text.split(",") if item.strip()]
                elif key in ("tmax", "out", "svg", "drive", "seed") and text.lower() in AUTO_VALUES:
                    value = None
                elif key == "cutoff":
                    value = text.lower()
                else:
                    value = text
            parsed[key] = value
        if parsed.get("out") is None:
            parsed["out"] = DEFAULT_OUTPUTS.get(str(parsed.get("command", "charge")), "out.csv")
        if parsed.get("svg") is None and parsed.get("command") == "sweep":
            parsed["svg"] = DEFAULT_SVG
        return parsed

    @field_validator("scaling", mode="before")
    @classmethod
    def validate_scaling(cls, value: Any) -> Any:
        return CouplingScaling(value) if isinstance(value, str) else value

    @field_validator("cutoff")
    @classmethod
    def validate_cutoff(cls, value: Cutoff, info: ValidationInfo) -> Cutoff:
        if value == "auto":
            return value
        if info.data.get("command") == "sweep":
            n_list = info.data.get("n_list") or []
            largest = max(n_list, default=0)
            if int(value) < largest:
                raise ValueError(
                    f"cutoff ({value}) must be at least the largest n_list entry ({largest}) "
                    "to represent the initial photons",
                )
        elif int(value) < info.data.get("n", 0):
            raise ValueError(
                f"cutoff ({value}) must be at least n ({info.data['n']}) "
                "to represent the initial photons",
            )
        return value

    def model_params(self, n: Optional[int] = None) -> ModelParams:
        from ..model import ModelParams

        return ModelParams(
            n=self.n if n is None else n,
            omega_a=self.omega_a,
            omega_c=self.omega_c,
            lambda_base=self.coupling,
            scaling=self.scaling,
            cutoff=self.cutoff,
        )

    def to_flat(self) -> Dict[str, str]:
        """
        Render every field as a flat configuration value, in declaration order.

        Floats use round-trip exact formatting, so parsing the result back
        yields an equal configuration.
        """

        flat: Dict[str, str] = {}
        for name in type(self).model_fields:
            flat[name] = _render_value(getattr(self, name))
        return flat

    @classmethod
    def from_sources(
        cls,
        command: str,
        file_values: Optional[Mapping[str, str]] = None,
        flag_values: Optional[Mapping[str, Any]] = None,
    ) -> Self:
        """
        Merge defaults, configuration file values and command line flags.

        Args:
            command (str): Command being run
            file_values (Optional[Mapping[str, str]]): Parsed configuration file, if any
            flag_values (Optional[Mapping[str, Any]]): Command line flags; `None` means unset

        Raises:
            ConfigError: On unknown keys, malformed values or a conflicting `command` key.

        Returns:
            Validated run configuration
        """

        values: Dict[str, Any] = {}
        for key, value in (file_values or {}).items():
            values[normalize_key(key)] = value
        file_command = values.get("command")
        if file_command is not None and str(file_command).strip() != command:
            raise ConfigError(
                f"Configuration file is for command '{file_command}', not '{command}'",
                key="command",
            )
        for key, value in (flag_values or {}).items():
            if value is not None:
                values[normalize_key(key)] = value
        values["command"] = command
        try:
            return cls.model_validate(values)
        except ValidationError as err:
            error = err.errors()[0]
            key = ".".join(str(part) for part in error["loc"]) or "<config>"
            raise ConfigError(f"Invalid value for '{key}': {error['msg']}", key=key) from None


def _render_value(value: Any) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, CouplingScaling):
        return value.value
    if isinstance(value, (list, tuple)):
        return ", ".join(_render_value(item) for item in value)
    return str(value)
