"""Six-state pattern-reconfigurable antenna model.

Covers the loading-diode C-V law fitted to bench points, classification
of a bias pair into one of six named radiation patterns, a parabolic
main-lobe gain model per state, the free-space link budget, and the
standby energy-harvesting aperture.  Bias voltages are volts, junction
capacitances picofarads, gains dBi, angles degrees measured in the
azimuth cut.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from scipy.optimize import least_squares

from .configdir import PATTERN_FILE, find_default
from .errors import CalibrationError, DomainError, NoDefinedPatternError
from .microstrip import C0

# Bench C-V points for the loading diodes: (bias V, capacitance pF).
CV_POINTS: tuple[tuple[float, float], ...] = ((0.0, 2.35), (3.0, 0.970), (15.0, 0.466))
BIAS_MAX_V = 15.0

# Capacitance bands (pF) used to classify a bias pair; values falling in
# the gaps between bands do not select any pattern.
HIGH_BAND_MIN_PF = 1.8
MID_BAND_PF = (0.7, 1.3)
LOW_BAND_MAX_PF = 0.6

_BAND_TO_PATTERN = {
    ("high", "high"): "front",
    ("high", "mid"): "upper_left",
    ("high", "low"): "left",
    ("mid", "high"): "upper_right",
    ("low", "high"): "right",
    ("low", "low"): "back",
}


@dataclass(frozen=True)
class VaractorModel:
    """Reverse-biased junction capacitance law C(V) = cj0 / (1 + V/vj)^m."""

    cj0_pf: float
    vj: float
    m: float

    def __post_init__(self) -> None:
        for name, v in (("cj0_pf", self.cj0_pf), ("vj", self.vj), ("m", self.m)):
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")


def capacitance_from_bias(model: VaractorModel, v: float) -> float:
    """Junction capacitance (pF) at a reverse bias in [0, 15] V."""
    if not (math.isfinite(v) and 0.0 <= v <= BIAS_MAX_V):
        raise DomainError(f"bias must lie in [0, {BIAS_MAX_V}] V, got {v!r}")
    return model.cj0_pf / (1.0 + v / model.vj) ** model.m


def fit_varactor(points: Sequence[tuple[float, float]] = CV_POINTS,
                 tolerance: float = 0.05) -> VaractorModel:
    """Least-squares fit of the junction law through measured (V, pF) points.

    The fitted curve must pass through every point within ``tolerance``
    relative error, otherwise the data is rejected as inconsistent with a
    single-junction model.
    """
    if len(points) < 3:
        raise DomainError("need at least three C-V points to fit (cj0, vj, m)")

    def residuals(params):
        cj0, vj, m = params
        return [cj0 / (1.0 + v / vj) ** m - c for v, c in points]

    fit = least_squares(residuals, x0=[points[0][1], 0.7, 0.5],
                        bounds=([1e-6, 1e-6, 1e-6], [1e3, 1e2, 10.0]))
    model = VaractorModel(float(fit.x[0]), float(fit.x[1]), float(fit.x[2]))
    for v, c in points:
        got = capacitance_from_bias(model, v)
        if abs(got - c) > tolerance * c:
            raise CalibrationError(
                f"fitted C({v} V) = {got:.4f} pF misses {c} pF by more than "
                f"{tolerance:.0%}"
            )
    return model


@lru_cache(maxsize=None)
def default_varactor() -> VaractorModel:
    """Junction model fitted once to the bundled bench points."""
    return fit_varactor()


@dataclass(frozen=True)
class BiasState:
    """Reverse bias (V) applied to the two diode pairs."""

    v12: float
    v34: float

    def __post_init__(self) -> None:
        for name, v in (("v12", self.v12), ("v34", self.v34)):
            if not (math.isfinite(v) and 0.0 <= v <= BIAS_MAX_V):
                raise DomainError(f"{name} must lie in [0, {BIAS_MAX_V}] V, got {v!r}")


@dataclass(frozen=True)
class PatternState:
    """One selectable radiation pattern: peak gain (dBi) and lobe direction (deg)."""

    name: str
    gain_dbi: float
    lobe_deg: float
    simulated_gain_dbi: float | None = None
    simulated_lobe_deg: float | None = None


@dataclass(frozen=True)
class BeamModel:
    """Gain shape of one pattern: parabolic main lobe with a back-lobe floor."""

    state: PatternState
    hpbw_deg: float = 90.0
    backlobe_db: float = 15.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.hpbw_deg) and self.hpbw_deg > 0.0):
            raise DomainError("half-power beamwidth must be finite and > 0")
        if not (math.isfinite(self.backlobe_db) and self.backlobe_db > 0.0):
            raise DomainError("back-lobe suppression must be finite and > 0")


def load_beams(path: str | Path | None = None) -> list[BeamModel]:
    """Load the pattern table (states plus beam defaults) from JSON."""
    doc = json.loads(Path(path or find_default(PATTERN_FILE)).read_text())
    defaults = doc.get("beam_defaults", {})
    hpbw = float(defaults.get("hpbw_deg", 90.0))
    backlobe = float(defaults.get("backlobe_db", 15.0))
    beams = []
    for entry in doc["states"]:
        state = PatternState(
            name=entry["name"],
            gain_dbi=float(entry["gain_dbi"]),
            lobe_deg=float(entry["lobe_deg"]),
            simulated_gain_dbi=entry.get("simulated_gain_dbi"),
            simulated_lobe_deg=entry.get("simulated_lobe_deg"),
        )
        beams.append(BeamModel(state, float(entry.get("hpbw_deg", hpbw)),
                               float(entry.get("backlobe_db", backlobe))))
    if not beams:
        raise DomainError("pattern table defines no states")
    return beams


def default_beams() -> tuple[BeamModel, ...]:
    """Pattern table from the config dir override or the bundled JSON."""
    return tuple(load_beams())


def _band(c_pf: float) -> str | None:
    if c_pf >= HIGH_BAND_MIN_PF:
        return "high"
    if MID_BAND_PF[0] <= c_pf <= MID_BAND_PF[1]:
        return "mid"
    if c_pf <= LOW_BAND_MAX_PF:
        return "low"
    return None


def pattern_from_bias(bias: BiasState, model: VaractorModel | None = None,
                      beams: Sequence[BeamModel] | None = None) -> PatternState:
    """Radiation pattern selected by a bias pair.

    Each pair's capacitance is classified into high/mid/low bands; the
    band combination indexes the pattern table.  Capacitances in a band
    gap, or combinations with no defined pattern, raise.
    """
    model = model or default_varactor()
    beams = beams if beams is not None else default_beams()
    c12 = capacitance_from_bias(model, bias.v12)
    c34 = capacitance_from_bias(model, bias.v34)
    bands = (_band(c12), _band(c34))
    if None in bands:
        raise NoDefinedPatternError(
            f"capacitances ({c12:.3f}, {c34:.3f}) pF fall between classification bands"
        )
    name = _BAND_TO_PATTERN.get(bands)  # type: ignore[arg-type]
    if name is None:
        raise NoDefinedPatternError(f"band combination {bands} has no defined pattern")
    for beam in beams:
        if beam.state.name == name:
            return beam.state
    raise NoDefinedPatternError(f"pattern table has no state named {name!r}")


def _lobe_offset_deg(theta: float, lobe: float) -> float:
    d = abs(theta - lobe) % 360.0
    return min(d, 360.0 - d)


def gain_toward(beam: BeamModel, theta: float) -> float:
    """Gain (dBi) of the beam toward azimuth ``theta`` (any angle, wrapped).

    Parabolic-in-dB main lobe: peak minus 12*(offset/hpbw)^2, floored at
    peak minus the back-lobe suppression; exactly 3 dB down at
    lobe +/- hpbw/2.
    """
    if not math.isfinite(theta):
        raise DomainError(f"angle must be finite, got {theta!r}")
    offset = _lobe_offset_deg(theta, beam.state.lobe_deg)
    rolloff = 12.0 * (offset / beam.hpbw_deg) ** 2
    return beam.state.gain_dbi - min(rolloff, beam.backlobe_db)


def select_beam(beams: Sequence[BeamModel], bearing: float) -> BeamModel:
    """Beam whose lobe best covers the bearing (least loss off its own peak).

    Comparing gain relative to each beam's peak keeps low-gain states
    selectable at their own lobe directions; ties go to the
    earliest-declared state.
    """
    if not beams:
        raise DomainError("no beams to select from")
    best = beams[0]
    best_rel = -math.inf
    for beam in beams:
        rel = gain_toward(beam, bearing) - beam.state.gain_dbi
        if rel > best_rel:
            best, best_rel = beam, rel
    return best


def select_pattern(beams: Sequence[BeamModel], bearing: float) -> PatternState:
    """Pattern state chosen by :func:`select_beam`."""
    return select_beam(beams, bearing).state


def friis_received_power(pt_dbm: float, gt_dbi: float, gr_dbi: float,
                         d: float, f: float) -> float:
    """Free-space received power (dBm): Pt + Gt + Gr - 20*log10(4*pi*d*f/c).

    Distances below 1 m are rejected; the far-field expression is
    meaningless there.
    """
    if not (math.isfinite(d) and d >= 1.0):
        raise DomainError(f"distance must be >= 1 m, got {d!r}")
    if not (math.isfinite(f) and f > 0.0):
        raise DomainError(f"frequency must be finite and > 0, got {f!r}")
    fspl = 20.0 * math.log10(4.0 * math.pi * d * f / C0)
    return pt_dbm + gt_dbi + gr_dbi - fspl


def effective_aperture(state: PatternState, f: float) -> float:
    """Capture area (m^2) of the pattern at its peak: G * lambda^2 / (4*pi)."""
    if not (math.isfinite(f) and f > 0.0):
        raise DomainError(f"frequency must be finite and > 0, got {f!r}")
    g_linear = 10.0 ** (state.gain_dbi / 10.0)
    wavelength = C0 / f
    return g_linear * wavelength ** 2 / (4.0 * math.pi)


def harvest_energy(incident: float, state: PatternState, f: float,
                   duration: float, rectifier_eff: float) -> float:
    """Energy (J) banked from an incident flux (W/m^2) over ``duration`` s."""
    if incident < 0.0 or duration < 0.0:
        raise DomainError("incident flux and duration must be non-negative")
    if not (0.0 <= rectifier_eff <= 1.0):
        raise DomainError(f"rectifier efficiency must lie in [0, 1], got {rectifier_eff!r}")
    return incident * effective_aperture(state, f) * rectifier_eff * duration


def write_gain_sweep_csv(beam: BeamModel, path: str | Path, step_deg: float = 1.0) -> None:
    """Export the beam's azimuth gain sweep as CSV (theta_deg,gain_dbi)."""
    if step_deg <= 0.0:
        raise DomainError("sweep step must be > 0")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("theta_deg", "gain_dbi"))
        theta = 0.0
        while theta < 360.0:
            writer.writerow([theta, gain_toward(beam, theta)])
            theta += step_deg
