import csv
import math
from pathlib import Path

import pytest

from neutron_ghz.config import RunConfig
from neutron_ghz.exceptions import ConfigError
from neutron_ghz.report import (
    SCAN_HEADER,
    SWEEP_HEADER,
    Report,
    format_float,
    write_report,
    write_scan_csv,
    write_sweep_csv,
)
from neutron_ghz.runner import ExperimentResult, run_experiment, run_scan, run_sweep


@pytest.fixture(scope="module")
def experiment() -> ExperimentResult:
    return run_experiment(RunConfig(repeats=1, seed=8))


def test_report_fields(experiment: ExperimentResult) -> None:
    report = Report.from_experiment(experiment, timestamp="2025-01-01T00:00:00+00:00")
    assert [entry.term for entry in report.expectations] == ["xxx", "xyy", "yxy", "yyx"]
    assert report.m_value == experiment.report.m_value
    assert report.nchv_bound == 2.0
    assert report.quantum_bound == 4.0
    assert report.scans_fitted == 16
    assert report.seed == 8
    assert report.config["seed"] == "8"
    assert report.verdict == ("violated" if report.nchv_violated else "not violated")


def test_sum_is_recomputable_from_report(experiment: ExperimentResult) -> None:
    report = Report.from_experiment(experiment)
    parsed = Report.parse_block(report.to_block())
    assert parsed.recomputed_m() == parsed.m_value


def test_block_round_trip(experiment: ExperimentResult) -> None:
    report = Report.from_experiment(experiment, timestamp="2025-01-01T00:00:00+00:00")
    block = report.to_block()
    assert "timestamp" not in block
    assert f"M = {report.m_value!r}" in block.splitlines()
    parsed = Report.parse_block(block)
    assert parsed == report.model_copy(update={"timestamp": None})
    assert parsed.to_block() == block


def test_parse_block_errors() -> None:
    with pytest.raises(ConfigError, match="line 1"):
        Report.parse_block("no separator here\n")
    with pytest.raises(ConfigError, match="missing key 'E_xxx'"):
        Report.parse_block("M = 1.0\n")


def test_text_summary(experiment: ExperimentResult) -> None:
    report = Report.from_experiment(experiment, timestamp="2025-01-01T00:00:00+00:00")
    text = report.to_text()
    assert "2025-01-01T00:00:00+00:00" in text
    assert f"M = {report.m_value:.4f} +/- {report.sigma_m:.4f}" in text
    assert "E[xyy]" in text
    assert f"verdict: {report.verdict}" in text


def test_write_report(tmp_path: Path, experiment: ExperimentResult) -> None:
    report = Report.from_experiment(experiment)
    path = tmp_path / "report.txt"
    write_report(report, path)
    assert path.read_bytes() == report.to_block().encode()


def test_scan_csv(tmp_path: Path) -> None:
    scan = run_scan(RunConfig(noiseless=True, visibility=1.0, points_per_scan=8), 0.0, 0.0)
    path = tmp_path / "scan.csv"
    write_scan_csv(scan, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == SCAN_HEADER
    assert len(rows) == 9
    chi, expected, counts, error = (float(value) for value in rows[2])
    assert chi == pytest.approx(math.pi / 4)
    assert expected == pytest.approx(250 * (1 + math.cos(math.pi / 4)))
    assert counts == expected
    assert error == pytest.approx(math.sqrt(expected))


def test_float_format_keeps_full_precision() -> None:
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(math.pi)) == math.pi
    assert format_float(250.0) == "250"


def test_sweep_csv(tmp_path: Path) -> None:
    results = run_sweep(RunConfig(noiseless=True, repeats=1), [0.25, 1.0])
    path = tmp_path / "sweep.csv"
    write_sweep_csv(results, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert len(lines) == 3
    visibility, m_value, _, exact, violated = lines[2].split(",")
    assert float(visibility) == 1.0
    assert float(m_value) == pytest.approx(4.0, abs=1e-6)
    assert float(exact) == pytest.approx(4.0)
    assert violated == "true"
    assert lines[1].endswith(",false")
