"""
Report Module

Output formats of the command-line tool:

- the Mermin report, as human-readable text for the terminal and as a
  line-oriented `key = value` block that parses back to identical values;
- plot-ready CSV for single scans and for visibility sweeps.

Floats are written with 17 significant digits, `.` as decimal separator and
LF line endings, so identical runs give byte-identical files.
"""

import csv
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Final

import structlog
from pydantic import BaseModel, ConfigDict

from neutron_ghz.analysis import ScanResult, signed_sum
from neutron_ghz.exceptions import ConfigError
from neutron_ghz.quantum import MERMIN_TERMS, NCHV_BOUND, QUANTUM_BOUND
from neutron_ghz.runner import ExperimentResult

logger = structlog.get_logger(__name__)

SCAN_HEADER: Final[tuple[str, ...]] = (
    "chi_rad",
    "expected_intensity",
    "counts",
    "count_error",
)
SWEEP_HEADER: Final[tuple[str, ...]] = (
    "visibility",
    "M",
    "sigma_M",
    "exact_M",
    "nchv_violated",
)
VIOLATED: Final[str] = "violated"
NOT_VIOLATED: Final[str] = "not violated"
CONFIG_PREFIX: Final[str] = "config."


def format_float(value: float) -> str:
    return format(value, ".17g")


def _format_bool(value: bool) -> str:  # noqa: FBT001
    return "true" if value else "false"


class ExpectationEntry(BaseModel):
    """One extracted expectation value of the report."""

    model_config = ConfigDict(frozen=True)

    term: str
    value: float
    sigma: float


class Report(BaseModel):
    """
    Result of one Mermin run.

    Attributes:
        expectations: The four terms in the order xxx, xyy, yxy, yyx
        m_value: The Mermin sum M
        sigma_m: Standard error of M
        nchv_bound: Noncontextual bound on |M|
        quantum_bound: Quantum bound on |M|
        significance_k: Standard errors by which |M| must exceed the bound
        nchv_violated: Whether |M| > nchv_bound + significance_k * sigma_m
        verdict: "violated" or "not violated"
        contrast: Mean fitted fringe contrast
        exact_m: trace(rho M) of the simulated state
        scans_fitted: Number of fitted scans
        seed: Root seed of the run
        config: Echo of the run configuration
        timestamp: Creation time, shown in the text form only
    """

    model_config = ConfigDict(frozen=True)

    expectations: tuple[ExpectationEntry, ...]
    m_value: float
    sigma_m: float
    nchv_bound: float = NCHV_BOUND
    quantum_bound: float = QUANTUM_BOUND
    significance_k: float
    nchv_violated: bool
    verdict: str
    contrast: float
    exact_m: float
    scans_fitted: int
    seed: int
    config: dict[str, str]
    timestamp: str | None = None

    @classmethod
    def from_experiment(
        cls, result: ExperimentResult, timestamp: str | None = None
    ) -> "Report":
        mermin = result.report
        return cls(
            expectations=tuple(
                ExpectationEntry(term=e.term.label, value=e.value, sigma=e.sigma)
                for e in mermin.estimates
            ),
            m_value=mermin.m_value,
            sigma_m=mermin.sigma_m,
            nchv_bound=mermin.nchv_bound,
            quantum_bound=mermin.quantum_bound,
            significance_k=mermin.significance_k,
            nchv_violated=mermin.nchv_violated,
            verdict=VIOLATED if mermin.nchv_violated else NOT_VIOLATED,
            contrast=result.contrast,
            exact_m=result.exact_m,
            scans_fitted=len(result.fits),
            seed=result.config.seed,
            config=result.config.echo(),
            timestamp=timestamp,
        )

    def recomputed_m(self) -> float:
        """E_xxx - E_xyy - E_yxy - E_yyx from the listed expectation values."""
        by_term = {entry.term: entry.value for entry in self.expectations}
        return signed_sum([by_term[term.label] for term in MERMIN_TERMS])

    def to_block(self) -> str:
        """The machine-readable `key = value` form, without the timestamp."""
        lines = []
        for entry in self.expectations:
            lines.append(f"E_{entry.term} = {entry.value!r}")
            lines.append(f"sigma_{entry.term} = {entry.sigma!r}")
        lines += [
            f"M = {self.m_value!r}",
            f"sigma_M = {self.sigma_m!r}",
            f"nchv_bound = {self.nchv_bound!r}",
            f"quantum_bound = {self.quantum_bound!r}",
            f"significance_k = {self.significance_k!r}",
            f"nchv_violated = {_format_bool(self.nchv_violated)}",
            f"verdict = {self.verdict}",
            f"contrast = {self.contrast!r}",
            f"exact_M = {self.exact_m!r}",
            f"scans_fitted = {self.scans_fitted}",
            f"seed = {self.seed}",
        ]
        lines += [f"{CONFIG_PREFIX}{key} = {value}" for key, value in self.config.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_block(cls, text: str) -> "Report":
        """Inverse of to_block."""
        values: dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            if not raw.strip():
                continue
            key, sep, value = raw.partition(" = ")
            if not sep:
                msg = f"expected 'key = value', got {raw!r}"
                raise ConfigError(msg, line=number)
            values[key.strip()] = value.strip()

        try:
            expectations = tuple(
                ExpectationEntry(
                    term=term.label,
                    value=float(values.pop(f"E_{term.label}")),
                    sigma=float(values.pop(f"sigma_{term.label}")),
                )
                for term in MERMIN_TERMS
            )
            config = {
                key.removeprefix(CONFIG_PREFIX): values.pop(key)
                for key in list(values)
                if key.startswith(CONFIG_PREFIX)
            }
            return cls(
                expectations=expectations,
                m_value=float(values.pop("M")),
                sigma_m=float(values.pop("sigma_M")),
                nchv_bound=float(values.pop("nchv_bound")),
                quantum_bound=float(values.pop("quantum_bound")),
                significance_k=float(values.pop("significance_k")),
                nchv_violated=values.pop("nchv_violated") == "true",
                verdict=values.pop("verdict"),
                contrast=float(values.pop("contrast")),
                exact_m=float(values.pop("exact_M")),
                scans_fitted=int(values.pop("scans_fitted")),
                seed=int(values.pop("seed")),
                config=config,
            )
        except KeyError as e:
            msg = f"report is missing key {e.args[0]!r}"
            raise ConfigError(msg) from e

    def to_text(self) -> str:
        """Terminal summary."""
        lines = ["Mermin test of the neutron GHZ state"]
        if self.timestamp is not None:
            lines.append(f"  created:    {self.timestamp}")
        lines.append(f"  seed:       {self.seed}")
        lines.append(f"  scans:      {self.scans_fitted}")
        lines.append(f"  contrast:   {self.contrast:.4f}")
        lines.extend(
            f"  E[{entry.term}] = {entry.value:+.4f} +/- {entry.sigma:.4f}"
            for entry in self.expectations
        )
        lines.append(f"  M = {self.m_value:.4f} +/- {self.sigma_m:.4f}")
        lines.append(f"  exact M = {self.exact_m:.4f}")
        lines.append(
            f"  bounds: noncontextual {self.nchv_bound:g}, quantum {self.quantum_bound:g}"
        )
        k_sigma = self.significance_k * self.sigma_m
        excess = abs(self.m_value) - self.nchv_bound
        margin = excess / self.sigma_m if self.sigma_m > 0 else math.inf
        lines.append(
            f"  verdict: {self.verdict} "
            f"(|M| - {self.nchv_bound:g} = {margin:.1f} sigma, "
            f"threshold {self.significance_k:g} sigma = {k_sigma:.4f})"
        )
        return "\n".join(lines) + "\n"


def write_report(report: Report, path: Path) -> None:
    Path(path).write_text(report.to_block(), encoding="utf-8", newline="\n")
    logger.info("report_written", path=str(path), m_value=report.m_value)


def write_scan_csv(scan: ScanResult, path: Path) -> None:
    """One row per chi point; expected_intensity is empty when unknown."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SCAN_HEADER)
        for point in scan.points:
            expected = (
                "" if point.expected_intensity is None
                else format_float(point.expected_intensity)
            )
            writer.writerow(
                (
                    format_float(point.chi),
                    expected,
                    format_float(point.counts),
                    format_float(point.count_error),
                )
            )
    logger.info("scan_written", path=str(path), points=len(scan.points))


def sweep_rows(results: Iterable[ExperimentResult]) -> list[tuple[str, ...]]:
    return [
        (
            format_float(result.config.visibility),
            format_float(result.report.m_value),
            format_float(result.report.sigma_m),
            format_float(result.exact_m),
            _format_bool(result.report.nchv_violated),
        )
        for result in results
    ]


def write_sweep_csv(results: Sequence[ExperimentResult], path: Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        writer.writerows(sweep_rows(results))
    logger.info("sweep_written", path=str(path), points=len(results))
