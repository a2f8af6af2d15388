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
Command line interface.
"""


from __future__ import annotations

import functools

from logging import getLogger
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, TypeVar

import click

from . import __version__
from .config import RunConfig
from .config.util import parse_flat_lines
from .exceptions import (
    ConfigError,
    DickeBatteryError,
    InvalidParameterError,
    NumericalError,
    OutputError,
)
from .observables import converged_window, default_time_grid, find_max_power, trace_charge
from .protocols import (
    MAX_SEPARABILITY_N,
    classical_charge_trace,
    classical_separability_check,
    converge_cutoff,
    default_drive,
    run_sweep,
)
from .report import (
    write_classical_csv,
    write_convergence_csv,
    write_sweep_report,
    write_trace_csv,
)
from .util import configure_logging, format_float

logger = getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_OUTPUT = 4


class NumericalFailure(click.ClickException):
    exit_code = EXIT_NUMERICAL


class OutputFailure(click.ClickException):
    exit_code = EXIT_OUTPUT


def parse_config(
    command: str,
    flags: Mapping[str, Any],
    config_file: Optional[Path] = None,
) -> RunConfig:
    """
    Resolve the run configuration of a command.

    Command line flags override configuration file values, which override defaults.

    Args:
        command (str): Command being run
        flags (Mapping[str, Any]): Command line flag values, `None` where unset
        config_file (Optional[Path], optional): Flat `key = value` configuration file.

    Raises:
        ConfigError: On unreadable files, unknown keys, malformed values
            or a conflicting command.

    Returns:
        Resolved run configuration
    """

    file_values: Dict[str, str] = {}
    if config_file is not None:
        try:
            text = Path(config_file).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(
                f"Unable to read configuration file '{config_file}': {err.strerror or err}",
                key="config",
            ) from err
        file_values = parse_flat_lines(text.splitlines(), source=str(config_file))
    return RunConfig.from_sources(command, file_values=file_values, flag_values=flags)


def handle_errors(func: F) -> F:
    """
    Translate package errors into click exceptions with distinct exit statuses.
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (ConfigError, InvalidParameterError) as err:
            raise click.UsageError(str(err)) from err
        except NumericalError as err:
            raise NumericalFailure(str(err)) from err
        except OutputError as err:
            raise OutputFailure(str(err)) from err
        except DickeBatteryError as err:
            raise click.ClickException(str(err)) from err

    return wrapper  # type: ignore[return-value]


def shared_options(func: F) -> F:
    """
    Attach the options shared by every experiment command.

    Every option defaults to `None`, meaning "not given on the command line",
    so configuration file values are only overridden by flags actually passed.
    """

    options = [
        click.option(
            "--config",
            "config_file",
            type=click.Path(path_type=Path),
            default=None,
            help="Flat 'key = value' configuration file.",
        ),
        click.option("--n", "n", type=int, default=None, help="Number of TLS."),
        click.option(
            "--n-list",
            "n_list",
            type=str,
            default=None,
            help="Comma-separated TLS counts for sweeps.",
        ),
        click.option(
            "--coupling",
            "coupling",
            type=float,
            default=None,
            help="Dimensionless single-TLS coupling.",
        ),
        click.option(
            "--scaling",
            "scaling",
            type=click.Choice(["constant", "invsqrt", "inverse_sqrt_n"]),
            default=None,
            help="Coupling scaling policy.",
        ),
        click.option("--omega-a", "omega_a", type=float, default=None, help="TLS splitting."),
        click.option("--omega-c", "omega_c", type=float, default=None, help="Cavity frequency."),
        click.option(
            "--cutoff",
            "cutoff",
            type=str,
            default=None,
            help="Fock cutoff, or 'auto' for the doubling protocol.",
        ),
        click.option(
            "--tmax",
            "tmax",
            type=str,
            default=None,
            help="Charging window length, or 'auto'.",
        ),
        click.option("--steps", "steps", type=int, default=None, help="Time grid points."),
        click.option(
            "--refine/--no-refine",
            "refine",
            default=None,
            help="Refine maximum power off the grid.",
        ),
        click.option("--jobs", "jobs", type=int, default=None, help="Sweep worker processes."),
        click.option("--out", "out", type=str, default=None, help="CSV output path."),
        click.option("--svg", "svg", type=str, default=None, help="SVG output path (sweep)."),
        click.option(
            "--fit-exclude-n1/--fit-include-n1",
            "fit_exclude_n1",
            default=None,
            help="Leave N = 1 out of the scaling fit.",
        ),
        click.option(
            "--drive",
            "drive",
            type=str,
            default=None,
            help="Classical drive F·d, or 'auto'.",
        ),
        click.option(
            "--drive-normalization",
            "drive_normalization",
            type=float,
            default=None,
            help="Normalisation of the automatic classical drive.",
        ),
        click.option(
            "--tol",
            "tol",
            type=float,
            default=None,
            help="Cutoff convergence relative tolerance.",
        ),
        click.option(
            "--max-cutoff",
            "max_cutoff",
            type=int,
            default=None,
            help="Cutoff convergence hard cap.",
        ),
        click.option(
            "--times",
            "times",
            type=str,
            default=None,
            help="Comma-separated sample times of the separability check.",
        ),
        click.option("--seed", "seed", type=int, default=None, help="Random seed."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _resolve(command: str, config_file: Optional[Path], flags: Mapping[str, Any]) -> RunConfig:
    config = parse_config(command, flags, config_file)
    logger.debug("Resolved configuration: %s", config.to_flat())
    return config


@click.group(help="Charging-power simulator for Dicke and classically driven quantum batteries.")
@click.version_option(__version__, prog_name="dicke-battery")
@click.option(
    "--log-level",
    "log_level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    show_default=True,
    help="Logging level (messages go to standard error).",
)
def main(log_level: str) -> None:
    """
    Charging-power simulator for Dicke and classically driven quantum batteries.
    """

    configure_logging(log_level)


@main.command(help="Charge one Dicke battery and write its trace as CSV.")
@shared_options
@handle_errors
def charge(config_file: Optional[Path], **flags: Any) -> None:
    config = _resolve("charge", config_file, flags)
    params = config.model_params()
    taus = default_time_grid(params, steps=config.steps, t_max=config.tmax)
    if params.cutoff == "auto":
        convergence = converge_cutoff(params, taus, tol=config.tol, max_cutoff=config.max_cutoff)
        params = params.with_cutoff(convergence.cutoff)
        trace = converged_window(trace_charge(params, taus))
    else:
        trace = trace_charge(params, taus)
    point = find_max_power(trace, refine=config.refine)
    write_trace_csv(trace, config.out, config=config)  # type: ignore[arg-type]
    click.echo(
        f"N={params.n} lambda_eff={format_float(params.lambda_eff)} "
        f"cutoff={params.resolved_cutoff} P_max={format_float(point.p_max)} "
        f"tau_star={format_float(point.tau_star)}"
        + (" (degenerate)" if point.degenerate else ""),
    )


@main.command(help="Sweep the number of TLS, fit the power scaling exponent, write CSV and SVG.")
@shared_options
@handle_errors
def sweep(config_file: Optional[Path], **flags: Any) -> None:
    config = _resolve("sweep", config_file, flags)
    result = run_sweep(
        config.n_list,
        base=config.model_params(n=min(config.n_list)),
        policy=config.scaling,
        steps=config.steps,
        t_max=config.tmax,
        refine=config.refine,
        exclude_n1=config.fit_exclude_n1,
        tol=config.tol,
        max_cutoff=config.max_cutoff,
        jobs=config.jobs,
    )
    write_sweep_report(result, config.out, config.svg, config=config)  # type: ignore[arg-type]
    if result.fit is not None:
        click.echo(
            f"scaling={result.policy.value} exponent={format_float(result.fit.exponent)} "
            f"stderr={format_float(result.fit.stderr)}"
            + ("" if result.trusted else " (untrusted)"),
        )
    else:
        click.echo(f"scaling={result.policy.value} exponent=n/a ({len(result.rows)} row(s))")


@main.command(help="Charge N independent TLS with a classical drive and check separability.")
@shared_options
@handle_errors
def classical(config_file: Optional[Path], **flags: Any) -> None:
    config = _resolve("classical", config_file, flags)
    params = config.model_params()
    drive = (
        config.drive
        if config.drive is not None
        else default_drive(params, normalization=config.drive_normalization)
    )
    taus = default_time_grid(params, steps=config.steps, t_max=config.tmax)
    trace = classical_charge_trace(params.omega_a, drive, params.n, taus)
    report = None
    if params.n <= MAX_SEPARABILITY_N:
        report = classical_separability_check(params.n, params.omega_a, drive, config.times)
    else:
        logger.warning(
            "Separability check skipped: N=%i exceeds the full-register limit %i",
            params.n,
            MAX_SEPARABILITY_N,
        )
    write_classical_csv(trace, config.out, report=report, config=config)  # type: ignore[arg-type]
    message = (
        f"N={params.n} drive={format_float(drive)} "
        f"P_total_max={format_float(max(trace.p_total))}"
    )
    if report is not None:
        message += (
            f" fidelity_deficit={format_float(report.fidelity_deficit)}"
            f" energy_ratio={format_float(report.energy_ratio)}"
        )
    click.echo(message)


@main.command(help="Run the Fock cutoff doubling protocol and write its evidence as CSV.")
@shared_options
@handle_errors
def converge(config_file: Optional[Path], **flags: Any) -> None:
    config = _resolve("converge", config_file, flags)
    params = config.model_params()
    taus = default_time_grid(params, steps=config.steps, t_max=config.tmax)
    convergence = converge_cutoff(params, taus, tol=config.tol, max_cutoff=config.max_cutoff)
    write_convergence_csv(convergence, config.out, config=config)  # type: ignore[arg-type]
    click.echo(
        f"N={params.n} accepted_cutoff={convergence.cutoff} "
        f"tail_mass={format_float(convergence.tail_mass)}",
    )
