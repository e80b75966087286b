"""Soil moisture calibration, inversion, and figure-of-merit metrics.

Moisture is volumetric water content (VWC) in percent, frequencies in
hertz.  Permittivity ladders and frequency-vs-moisture curves are stored
as monotone piecewise-linear interpolants; any query outside their range
raises instead of clamping.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .configdir import COMPARISON_FILE, CURVE_FILE, SOIL_TABLE_FILE, find_default
from .errors import CalibrationError, DomainError, OutOfRangeError
from .microstrip import C0

COMPARISON_CSV_COLUMNS = ("label", "S", "eps_rm", "l", "fom")


def vwc_from_weights(w_dry: float, w_water: float) -> float:
    """VWC percent from dry-soil and water weights: 100 * w2 / (w1 + w2)."""
    if not (math.isfinite(w_dry) and math.isfinite(w_water)):
        raise DomainError("weights must be finite")
    if w_dry < 0.0 or w_water < 0.0:
        raise DomainError("weights must be non-negative")
    total = w_dry + w_water
    if total == 0.0:
        raise DomainError("dry and water weights cannot both be zero")
    return 100.0 * w_water / total


@dataclass(frozen=True)
class SoilCalibrationTable:
    """Complex-permittivity ladder vs VWC: rows of (vwc_pct, eps_real, eps_imag)."""

    rows: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        if len(self.rows) < 2:
            raise DomainError("calibration table needs at least two rows")
        vwc = [r[0] for r in self.rows]
        eps_r = [r[1] for r in self.rows]
        eps_i = [r[2] for r in self.rows]
        if any(b <= a for a, b in zip(vwc, vwc[1:])):
            raise CalibrationError("table VWC values must be strictly increasing")
        if any(b <= a for a, b in zip(eps_r, eps_r[1:])):
            raise CalibrationError("table eps_real values must be strictly increasing")
        if any(b < a for a, b in zip(eps_i, eps_i[1:])):
            raise CalibrationError("table eps_imag values must be non-decreasing")
        if any(e < 1.0 for e in eps_r) or any(e < 0.0 for e in eps_i):
            raise CalibrationError("table permittivities out of physical range")

    @property
    def vwc_range(self) -> tuple[float, float]:
        return self.rows[0][0], self.rows[-1][0]

    @classmethod
    def from_json(cls, path: str | Path) -> "SoilCalibrationTable":
        doc = json.loads(Path(path).read_text())
        return cls(tuple((float(v), float(er), float(ei)) for v, er, ei in doc["rows"]))


def default_soil_table() -> SoilCalibrationTable:
    """Sand permittivity ladder (0-30% VWC); bundled unless overridden via config dir."""
    return SoilCalibrationTable.from_json(find_default(SOIL_TABLE_FILE))


def permittivity_at_vwc(table: SoilCalibrationTable, vwc: float) -> tuple[float, float]:
    """Interpolated (eps_real, eps_imag) at a VWC inside the table range."""
    if not math.isfinite(vwc):
        raise DomainError(f"vwc must be finite, got {vwc!r}")
    lo, hi = table.vwc_range
    if vwc < lo or vwc > hi:
        raise OutOfRangeError(f"vwc {vwc} outside calibrated range [{lo}, {hi}]")
    grid = np.array([r[0] for r in table.rows])
    eps_r = float(np.interp(vwc, grid, [r[1] for r in table.rows]))
    eps_i = float(np.interp(vwc, grid, [r[2] for r in table.rows]))
    return eps_r, eps_i


@dataclass(frozen=True)
class CalibrationCurve:
    """Monotone piecewise-linear map between VWC (percent) and resonance (Hz).

    Loading always lowers the resonance, so frequency is strictly
    decreasing in VWC; the inverse lookup is exact at every anchor.
    """

    anchors: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.anchors) < 2:
            raise DomainError("calibration curve needs at least two anchors")
        vwc = [a[0] for a in self.anchors]
        freq = [a[1] for a in self.anchors]
        if any(b <= a for a, b in zip(vwc, vwc[1:])):
            raise DomainError("anchor VWC values must be strictly increasing")
        if any(b >= a for a, b in zip(freq, freq[1:])):
            raise CalibrationError(
                "anchor frequencies must be strictly decreasing in VWC "
                "(dielectric loading can only lower the resonance)"
            )
        if any(f <= 0.0 for f in freq):
            raise DomainError("anchor frequencies must be positive")

    @property
    def vwc_range(self) -> tuple[float, float]:
        return self.anchors[0][0], self.anchors[-1][0]

    @property
    def freq_range(self) -> tuple[float, float]:
        return self.anchors[-1][1], self.anchors[0][1]

    def to_json_dict(self) -> dict:
        return {"kind": "monotone-piecewise-linear",
                "anchors": [[v, f] for v, f in self.anchors]}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CalibrationCurve":
        return cls(tuple((float(v), float(f)) for v, f in doc["anchors"]))

    @classmethod
    def from_json(cls, path: str | Path) -> "CalibrationCurve":
        return cls.from_json_dict(json.loads(Path(path).read_text()))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")


def default_curve() -> CalibrationCurve:
    """Two-anchor curve, 158 MHz dry down to 115 MHz at 30% VWC, unless overridden."""
    return CalibrationCurve.from_json(find_default(CURVE_FILE))


def fit_calibration_curve(anchors: Sequence[tuple[float, float]]) -> CalibrationCurve:
    """Build a curve from (vwc_pct, f_hz) anchors, rejecting non-monotone data."""
    return CalibrationCurve(tuple((float(v), float(f)) for v, f in anchors))


def frequency_from_vwc(curve: CalibrationCurve, vwc: float) -> float:
    """Forward map: resonance (Hz) at a VWC inside the calibrated range."""
    if not math.isfinite(vwc):
        raise DomainError(f"vwc must be finite, got {vwc!r}")
    lo, hi = curve.vwc_range
    if vwc < lo or vwc > hi:
        raise OutOfRangeError(f"vwc {vwc} outside calibrated range [{lo}, {hi}]")
    grid = np.array([a[0] for a in curve.anchors])
    return float(np.interp(vwc, grid, [a[1] for a in curve.anchors]))


def vwc_from_frequency(curve: CalibrationCurve, f: float) -> float:
    """Inverse map: VWC at a measured resonance inside the calibrated band."""
    if not math.isfinite(f):
        raise DomainError(f"frequency must be finite, got {f!r}")
    f_lo, f_hi = curve.freq_range
    if f < f_lo or f > f_hi:
        raise OutOfRangeError(f"frequency {f} Hz outside calibrated band [{f_lo}, {f_hi}] Hz")
    # anchors run high-to-low in frequency; reverse for an ascending grid
    freqs = np.array([a[1] for a in reversed(curve.anchors)])
    vwcs = [a[0] for a in reversed(curve.anchors)]
    return float(np.interp(f, freqs, vwcs))


@dataclass(frozen=True)
class SensorDescriptor:
    """Unloaded sensor: resonance (Hz) and physical side length (m)."""

    f_unloaded: float
    physical_side: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.f_unloaded) and self.f_unloaded > 0.0):
            raise DomainError("unloaded resonance must be finite and > 0")
        if not (math.isfinite(self.physical_side) and self.physical_side > 0.0):
            raise DomainError("physical side must be finite and > 0")

    @property
    def electrical_side(self) -> float:
        """Side length as a fraction of the free-space wavelength."""
        return electrical_size(self.physical_side, self.f_unloaded)


def sensitivity(fu: float, f1: float, f2: float, eps1: float, eps2: float) -> float:
    """Relative shift per permittivity unit, percent.

    |(f1 - f2) / (fu * (eps1 - eps2))| * 100.  Symmetric under swapping the
    two measurement points; inversely proportional to fu.
    """
    if not (math.isfinite(fu) and fu > 0.0):
        raise DomainError("unloaded frequency fu must be finite and > 0")
    if eps1 == eps2:
        raise DomainError("the two permittivities must differ")
    return abs((f1 - f2) / (fu * (eps1 - eps2))) * 100.0


def figure_of_merit(s: float, eps_rm: float, l: float) -> float:
    """Sensitivity * max measurable permittivity / electrical length."""
    for name, v in (("sensitivity", s), ("eps_rm", eps_rm), ("electrical length", l)):
        if not (math.isfinite(v) and v > 0.0):
            raise DomainError(f"{name} must be finite and > 0, got {v!r}")
    return s * eps_rm / l


def electrical_size(side: float, f: float) -> float:
    """Physical side (m) at frequency f (Hz) as a fraction of lambda_0."""
    for name, v in (("side", side), ("frequency", f)):
        if not (math.isfinite(v) and v > 0.0):
            raise DomainError(f"{name} must be finite and > 0, got {v!r}")
    return side * f / C0


@dataclass(frozen=True)
class ComparisonRow:
    """One sensor in the comparison report, with its computed figure of merit."""

    label: str
    s: float
    eps_rm: float
    l: float
    fom: float


def comparison_report(rows: Iterable[tuple[str, float, float, float]]) -> list[ComparisonRow]:
    """Compute the figure of merit per row and sort best-first."""
    report = [ComparisonRow(label, s, eps_rm, l, figure_of_merit(s, eps_rm, l))
              for label, s, eps_rm, l in rows]
    report.sort(key=lambda r: r.fom, reverse=True)
    return report


def read_comparison_rows(path: str | Path) -> list[tuple[str, float, float, float]]:
    """Load (label, S, eps_rm, l) rows from a CSV with that header."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"label", "S", "eps_rm", "l"} - set(reader.fieldnames or ())
        if missing:
            raise DomainError(f"comparison CSV missing columns: {sorted(missing)}")
        try:
            return [(row["label"], float(row["S"]), float(row["eps_rm"]), float(row["l"]))
                    for row in reader]
        except (TypeError, ValueError) as exc:
            raise DomainError(f"malformed comparison CSV: {exc}") from exc


def default_comparison_rows() -> list[tuple[str, float, float, float]]:
    """Bundled comparison inputs for published resonant permittivity sensors."""
    return read_comparison_rows(find_default(COMPARISON_FILE))


def write_comparison_csv(report: Sequence[ComparisonRow], dest: str | Path | TextIO) -> None:
    """Emit the report as CSV with columns label,S,eps_rm,l,fom."""

    def _write(fh: TextIO) -> None:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_CSV_COLUMNS)
        for row in report:
            writer.writerow([row.label, row.s, row.eps_rm, row.l, row.fom])

    if hasattr(dest, "write"):
        _write(dest)  # type: ignore[arg-type]
    else:
        with open(dest, "w", newline="") as fh:
            _write(fh)
