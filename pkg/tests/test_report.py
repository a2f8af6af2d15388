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
Result file formatting and configuration round-trip tests.
"""


from __future__ import annotations

import numpy as np
import pytest

from dicke_battery.config import RunConfig
from dicke_battery.config.util import parse_flat_lines, parse_header_lines
from dicke_battery.exceptions import ConfigError, OutputError
from dicke_battery.model import ModelParams
from dicke_battery.observables import default_time_grid, trace_charge
from dicke_battery.protocols import run_sweep
from dicke_battery.report import (
    SWEEP_COLUMNS,
    TRACE_COLUMNS,
    read_sweep_footer,
    read_trace_csv,
    render_sweep_svg,
    write_sweep_report,
    write_trace_csv,
)
from dicke_battery.types import CouplingScaling
from dicke_battery.util import format_float


@pytest.fixture(scope="module")
def small_sweep():
    base = ModelParams(lambda_base=0.5, cutoff=10)
    return run_sweep([1, 2, 3], base, CouplingScaling.constant, steps=100, refine=False)


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        (0.0, "0"),
        (-0.0, "0"),
        (1.0, "1"),
        (0.1, "0.10000000000000001"),
        (1e-6, "9.9999999999999995e-07"),
        (-2.5, "-2.5"),
    ],
)
def test_format_float(value, expected):
    assert format_float(value) == expected


@pytest.mark.parametrize("value", [0.1, 1 / 3, np.pi * 1e-9, 123456.789, 2.0**-40])
def test_format_float_round_trips(value):
    assert float(format_float(value)) == value


def test_parse_flat_lines():
    values = parse_flat_lines(
        ["# comment", "", "n = 4", "N-List = 1, 2, 3  # trailing", "scaling=constant"],
    )
    assert values == {"n": "4", "n_list": "1, 2, 3", "scaling": "constant"}


@pytest.mark.parametrize("lines", [["n 4"], ["n = 1", "n = 2"], [" = 3"]])
def test_parse_flat_lines_rejects_malformed_documents(lines):
    with pytest.raises(ConfigError):
        parse_flat_lines(lines)


def test_header_parsing_stops_at_data():
    lines = ["# n = 2", "# a note", "tau,E", "# n = 3"]
    assert parse_header_lines(lines) == {"n": "2"}


def test_run_config_flat_round_trip():
    config = RunConfig.from_sources(
        "sweep",
        flag_values={"n_list": "2, 4, 8", "coupling": 0.3, "scaling": "constant", "tmax": "12.5"},
    )
    assert config.svg is not None
    again = RunConfig.from_sources("sweep", file_values=config.to_flat())
    assert again == config


def test_trace_csv_layout(tmp_path, small_params):
    trace = trace_charge(small_params, default_time_grid(small_params, steps=50))
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").split("\n")
    assert lines[-1] == ""
    comments = [line for line in lines if line.startswith("#")]
    data = [line for line in lines if line and not line.startswith("#")]
    assert comments == lines[: len(comments)]
    assert "# scaling = constant" in comments
    assert data[0] == ",".join(TRACE_COLUMNS)
    assert len(data) == 51
    first = data[1].split(",")
    assert float(first[0]) == trace.taus[0]
    assert float(first[1]) == trace.energy[0]


def test_uncoupled_trace_serialises_exact_zeros(tmp_path):
    params = ModelParams(n=2, lambda_base=0.0, cutoff=8)
    path = tmp_path / "zero.csv"
    write_trace_csv(trace_charge(params, default_time_grid(params, steps=20)), path)
    rows = [line.split(",") for line in path.read_text().splitlines() if line[:1].isdigit()]
    assert len(rows) == 20
    assert all(row[1] == "0" and row[2] == "0" for row in rows)


def test_trace_csv_round_trip_is_byte_identical(tmp_path):
    config = RunConfig.from_sources(
        "charge",
        flag_values={"n": 2, "coupling": 0.4, "cutoff": "12", "steps": 40},
    )
    params = config.model_params()
    trace = trace_charge(params, default_time_grid(params, steps=config.steps))
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    write_trace_csv(trace, first, config=config)
    read_config, read_trace = read_trace_csv(first)
    assert read_config == config
    assert np.array_equal(read_trace.energy, trace.energy)
    assert np.array_equal(read_trace.power, trace.power)
    write_trace_csv(read_trace, second, config=read_config)
    assert first.read_bytes() == second.read_bytes()


def test_read_trace_rejects_other_tables(tmp_path, small_sweep):
    path = tmp_path / "sweep.csv"
    write_sweep_report(small_sweep, path)
    with pytest.raises(OutputError):
        read_trace_csv(path)


def test_unwritable_path_raises_output_error(tmp_path, small_params):
    trace = trace_charge(small_params, default_time_grid(small_params, steps=5))
    with pytest.raises(OutputError) as excinfo:
        write_trace_csv(trace, tmp_path)
    assert excinfo.value.path == str(tmp_path)


def test_sweep_report_table_and_footer(tmp_path, small_sweep):
    path = tmp_path / "sweep.csv"
    write_sweep_report(small_sweep, path)
    lines = path.read_text().splitlines()
    data = [line for line in lines if line and not line.startswith("#")]
    assert data[0] == ",".join(SWEEP_COLUMNS)
    assert [row.split(",")[0] for row in data[1:]] == ["1", "2", "3"]
    footer = read_sweep_footer(path)
    assert float(footer["exponent"]) == small_sweep.fit.exponent
    assert float(footer["residual"]) == small_sweep.fit.residual
    assert footer["fit_points"] == "3"


def test_single_row_sweep_has_no_footer(tmp_path):
    result = run_sweep([2], ModelParams(cutoff=10), CouplingScaling.constant, steps=50)
    path = tmp_path / "single.csv"
    write_sweep_report(result, path)
    assert read_sweep_footer(path) == {}
    assert len([line for line in path.read_text().splitlines() if line[:1].isdigit()]) == 1


def test_sweep_footer_needs_table_rows(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("# command = sweep\n# exponent = 1.5\n")
    with pytest.raises(OutputError, match="no table rows"):
        read_sweep_footer(path)


def test_auto_cutoff_sweep_lists_converged_windows(tmp_path):
    result = run_sweep([1, 2], ModelParams(lambda_base=0.5), CouplingScaling.constant, steps=80)
    path = tmp_path / "sweep.csv"
    write_sweep_report(result, path)
    header = [line for line in path.read_text().splitlines() if line.startswith("# verified_tmax")]
    windows = [f"{row.n}:{format_float(row.verified_tmax)}" for row in result.rows]
    assert header == [f"# verified_tmax = {', '.join(windows)}"]


def test_sweep_svg_is_static_markup(tmp_path, small_sweep):
    svg_path = tmp_path / "sweep.svg"
    write_sweep_report(small_sweep, tmp_path / "sweep.csv", svg_path)
    svg = svg_path.read_text()
    assert svg.startswith("<?xml")
    assert svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 3
    for n in (1, 2, 3):
        assert f"N = {n}</text>" in svg
    assert "charging time" in svg
    assert "stored energy" in svg
    assert "href" not in svg
    assert "<script" not in svg


def test_svg_rendering_is_deterministic(small_sweep):
    assert render_sweep_svg(small_sweep) == render_sweep_svg(small_sweep)
