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
Result serialisation: CSV traces and tables, and the SVG sweep plot.

Every file starts with the resolved run configuration as `# key = value` comment lines,
uses LF line endings, and renders floats with 17 significant digits, so identical runs
produce byte-identical files.
"""


from __future__ import annotations

import csv
import io

from logging import getLogger
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import RunConfig
from .config.util import parse_header_lines, render_flat_lines
from .exceptions import ConfigError, OutputError
from .observables import ChargeTrace
from .util import format_float

if TYPE_CHECKING:
    from .protocols import ClassicalTrace, CutoffConvergence, SeparabilityReport, SweepResult

logger = getLogger(__name__)

TRACE_COLUMNS = ("tau", "E", "P", "n_ph", "jz", "parity", "norm_err")
SWEEP_COLUMNS = ("N", "lambda_eff", "cutoff", "P_max", "tau_star", "E_at_max")
CLASSICAL_COLUMNS = ("t", "E_single", "E_total", "P_total")
CONVERGE_COLUMNS = ("cutoff", "P_max", "delta", "tail_mass")

SVG_WIDTH = 800
SVG_HEIGHT = 500
SVG_MARGIN = (70, 30, 40, 60)  # left, right, top, bottom
SVG_TICKS = 5
SVG_PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)

PathLike = Union[str, Path]


def _header(config: Optional[RunConfig], fallback: Optional[Dict[str, str]] = None) -> List[str]:
    values = config.to_flat() if config is not None else (fallback or {})
    return render_flat_lines(values, prefix="# ")


def _read_lines(path: PathLike) -> List[str]:
    source = Path(path)
    try:
        return source.read_text(encoding="utf-8").split("\n")
    except OSError as err:
        raise OutputError(
            f"Unable to read '{source}': {err.strerror or err}",
            path=str(source),
        ) from err


def _write_text(path: PathLike, text: str) -> None:
    target = Path(path)
    try:
        if target.parent != Path():
            target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as err:
        raise OutputError(
            f"Unable to write '{target}': {err.strerror or err}",
            path=str(target),
        ) from err
    logger.info("Wrote %s", target)


def _csv_text(
    header: Sequence[str],
    columns: Sequence[str],
    rows: Sequence[Sequence[str]],
    footer: Sequence[str] = (),
) -> str:
    buffer = io.StringIO()
    for line in header:
        buffer.write(f"{line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    for line in footer:
        buffer.write(f"{line}\n")
    return buffer.getvalue()


def write_trace_csv(
    trace: ChargeTrace,
    path: PathLike,
    config: Optional[RunConfig] = None,
) -> None:
    """
    Write a charge trace as CSV, one row per charging time.

    Args:
        trace (ChargeTrace): Trace to write
        path (PathLike): Output file
        config (Optional[RunConfig], optional): Run configuration echoed into the header.
            When not given, the trace's model parameters are echoed instead. A trace cut to
            its converged window also records that window as `verified_tmax`.

    Raises:
        OutputError: If the file cannot be written.
    """

    params = trace.params
    fallback = {
        "command": "charge",
        "n": str(params.n),
        "coupling": format_float(params.lambda_base),
        "scaling": params.scaling.value,
        "omega_a": format_float(params.omega_a),
        "omega_c": format_float(params.omega_c),
        "cutoff": str(params.cutoff),
    }
    columns = (
        trace.taus,
        trace.energy,
        trace.power,
        trace.n_ph,
        trace.jz,
        trace.parity,
        trace.norm_err,
    )
    rows = [[format_float(value) for value in row] for row in zip(*columns)]
    header = _header(config, fallback)
    if trace.verified_tmax is not None:
        header.append(f"# verified_tmax = {format_float(trace.verified_tmax)}")
    _write_text(path, _csv_text(header, TRACE_COLUMNS, rows))


def read_trace_csv(path: PathLike) -> Tuple[RunConfig, ChargeTrace]:
    """
    Read a charge trace CSV written by `write_trace_csv` with a run configuration header.

    Raises:
        OutputError: If the file cannot be read or is not a trace CSV.

    Returns:
        Run configuration from the header, and the trace (without propagator)
    """

    source = Path(path)
    lines = _read_lines(source)
    try:
        values = parse_header_lines(lines, source=str(source))
        verified_tmax = values.pop("verified_tmax", None)
        window = float(verified_tmax) if verified_tmax is not None else None
        config = RunConfig.from_sources(
            command=values.get("command", "charge"),
            file_values=values,
        )
    except (ConfigError, ValueError) as err:
        raise OutputError(
            f"Invalid configuration header in '{source}': {err}",
            path=str(source),
        ) from err
    body = [line for line in lines if line and not line.startswith("#")]
    reader = csv.reader(body)
    if tuple(next(reader, ())) != TRACE_COLUMNS:
        raise OutputError(f"'{source}' is not a charge trace CSV", path=str(source))
    data = np.array([[float(value) for value in row] for row in reader], dtype=np.float64)
    taus, energy, power, n_ph, jz, parity, norm_err = data.T
    return config, ChargeTrace(
        params=config.model_params(),
        taus=taus.copy(),
        energy=energy.copy(),
        power=power.copy(),
        n_ph=n_ph.copy(),
        jz=jz.copy(),
        parity=parity.copy(),
        norm_err=norm_err.copy(),
        verified_tmax=window,
    )


def write_sweep_report(
    result: SweepResult,
    csv_path: PathLike,
    svg_path: Optional[PathLike] = None,
    config: Optional[RunConfig] = None,
) -> None:
    """
    Write a sweep table as CSV, and its stored-energy curves as an SVG plot.

    The CSV ends with the fitted exponent as `# key = value` footer lines,
    unless the sweep had too few rows to fit. Rows whose traces were cut to their converged
    window list it in a `# verified_tmax = N:tau, ...` header line.

    Args:
        result (SweepResult): Sweep to write
        csv_path (PathLike): Table output file
        svg_path (Optional[PathLike], optional): Plot output file, skipped when `None`.
        config (Optional[RunConfig], optional): Run configuration echoed into the headers.

    Raises:
        OutputError: If a file cannot be written.
    """

    fallback = {"scaling": result.policy.value}
    rows = [
        [
            str(row.n),
            format_float(row.lambda_eff),
            str(row.cutoff),
            format_float(row.p_max),
            format_float(row.tau_star),
            format_float(row.e_at_max),
        ]
        for row in result.rows
    ]
    footer: List[str] = []
    if result.fit is not None:
        footer = [
            f"# exponent = {format_float(result.fit.exponent)}",
            f"# exponent_stderr = {format_float(result.fit.stderr)}",
            f"# intercept = {format_float(result.fit.intercept)}",
            f"# residual = {format_float(result.fit.residual)}",
            f"# fit_points = {result.fit.points}",
            f"# trusted = {'true' if result.trusted else 'false'}",
        ]
    header = _header(config, fallback)
    windows = [
        f"{row.n}:{format_float(row.verified_tmax)}"
        for row in result.rows
        if row.verified_tmax is not None
    ]
    if windows:
        header.append(f"# verified_tmax = {', '.join(windows)}")
    _write_text(csv_path, _csv_text(header, SWEEP_COLUMNS, rows, footer))
    if svg_path is not None:
        _write_text(svg_path, render_sweep_svg(result, header))


def read_sweep_footer(path: PathLike) -> Dict[str, str]:
    """
    Read the fit footer of a sweep CSV (empty when the sweep had no fit).
    """

    source = Path(path)
    lines = _read_lines(source)
    data = [i for i, line in enumerate(lines) if line and not line.startswith("#")]
    if not data:
        raise OutputError(f"'{source}' has no table rows", path=str(source))
    data_end = data[-1]
    return parse_header_lines(lines[data_end + 1 :], source=str(source))


def write_classical_csv(
    trace: ClassicalTrace,
    path: PathLike,
    report: Optional[SeparabilityReport] = None,
    config: Optional[RunConfig] = None,
) -> None:
    """
    Write a classical-drive charge trace, with the separability report as footer lines.
    """

    fallback = {
        "n": str(trace.n),
        "omega_a": format_float(trace.omega_a),
        "drive": format_float(trace.drive),
    }
    rows = [
        [format_float(value) for value in row]
        for row in zip(trace.taus, trace.e_single, trace.e_total, trace.p_total)
    ]
    footer: List[str] = []
    if report is not None:
        footer = [
            f"# fidelity_deficit = {format_float(report.fidelity_deficit)}",
            f"# energy_ratio = {format_float(report.energy_ratio)}",
        ]
    _write_text(path, _csv_text(_header(config, fallback), CLASSICAL_COLUMNS, rows, footer))


def write_convergence_csv(
    convergence: CutoffConvergence,
    path: PathLike,
    config: Optional[RunConfig] = None,
) -> None:
    """
    Write every step of a cutoff doubling run, with the accepted cutoff and the converged
    window of its trace as footer lines.
    """

    rows = [
        [
            str(step.cutoff),
            format_float(step.p_max),
            format_float(convergence.evidence[i - 1]) if i > 0 else "",
            format_float(step.tail_mass),
        ]
        for i, step in enumerate(convergence.steps)
    ]
    footer = [f"# accepted_cutoff = {convergence.cutoff}"]
    if convergence.trace.verified_tmax is not None:
        footer.append(f"# verified_tmax = {format_float(convergence.trace.verified_tmax)}")
    _write_text(path, _csv_text(_header(config), CONVERGE_COLUMNS, rows, footer))


def _coord(value: float) -> str:
    text = f"{value:.3f}"
    return "0.000" if text == "-0.000" else text


def _tick_label(value: float) -> str:
    return f"{value:.4g}"


def render_sweep_svg(result: SweepResult, header: Sequence[str] = ()) -> str:
    """
    Render the stored energy of every sweep row against charging time as a static SVG.

    The markup is self-contained (no scripts, fonts or external references), and
    coordinates are rounded to three decimals so repeated runs produce identical bytes.
    """

    left, right, top, bottom = SVG_MARGIN
    plot_w = SVG_WIDTH - left - right
    plot_h = SVG_HEIGHT - top - bottom
    traces = [(n, result.traces[n]) for n in sorted(result.traces)]
    x_max = max((float(trace.taus[-1]) for _, trace in traces), default=1.0)
    y_max = max((float(np.max(trace.energy)) for _, trace in traces), default=0.0)
    y_max = y_max if y_max > 0 else 1.0

    def x_of(tau: float) -> float:
        return left + plot_w * tau / x_max

    def y_of(energy: float) -> float:
        return top + plot_h * (1 - energy / y_max)

    out: List[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        *(f"<!-- {line.lstrip('# ').replace('--', '- -')} -->" for line in header),
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" '
            f'height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">'
        ),
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        (
            f'<text x="{_coord(left + plot_w / 2)}" y="{_coord(top / 2 + 5)}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="14">'
            f"Stored energy vs charging time ({result.policy.value} coupling)</text>"
        ),
        (
            f'<path d="M{_coord(left)},{_coord(top)} V{_coord(top + plot_h)} '
            f'H{_coord(left + plot_w)}" fill="none" stroke="black" stroke-width="1"/>'
        ),
    ]
    for i in range(SVG_TICKS + 1):
        tau = x_max * i / SVG_TICKS
        energy = y_max * i / SVG_TICKS
        x = x_of(tau)
        y = y_of(energy)
        out.append(
            f'<line x1="{_coord(x)}" y1="{_coord(top + plot_h)}" x2="{_coord(x)}" '
            f'y2="{_coord(top + plot_h + 5)}" stroke="black"/>',
        )
        out.append(
            f'<text x="{_coord(x)}" y="{_coord(top + plot_h + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_tick_label(tau)}</text>',
        )
        out.append(
            f'<line x1="{_coord(left - 5)}" y1="{_coord(y)}" x2="{_coord(left)}" '
            f'y2="{_coord(y)}" stroke="black"/>',
        )
        out.append(
            f'<text x="{_coord(left - 8)}" y="{_coord(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_tick_label(energy)}</text>',
        )
    out.append(
        f'<text x="{_coord(left + plot_w / 2)}" y="{_coord(SVG_HEIGHT - 15)}" '
        'text-anchor="middle" font-family="sans-serif" font-size="12">'
        "charging time τ (1/ω_a)</text>",
    )
    out.append(
        f'<text x="15" y="{_coord(top + plot_h / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 15 {_coord(top + plot_h / 2)})">stored energy E (ħω_a)</text>',
    )
    for index, (n, trace) in enumerate(traces):
        colour = SVG_PALETTE[index % len(SVG_PALETTE)]
        points = " ".join(
            f"{_coord(x_of(float(tau)))},{_coord(y_of(float(energy)))}"
            for tau, energy in zip(trace.taus, trace.energy)
        )
        out.append(
            f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{points}"/>',
        )
        legend_y = top + 10 + 16 * index
        legend_x = left + plot_w - 90
        out.append(
            f'<line x1="{_coord(legend_x)}" y1="{_coord(legend_y)}" '
            f'x2="{_coord(legend_x + 20)}" y2="{_coord(legend_y)}" '
            f'stroke="{colour}" stroke-width="2"/>',
        )
        out.append(
            f'<text x="{_coord(legend_x + 26)}" y="{_coord(legend_y + 4)}" '
            f'font-family="sans-serif" font-size="11">N = {n}</text>',
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
