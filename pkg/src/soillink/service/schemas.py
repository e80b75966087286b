"""Pydantic request/response models for the HTTP service.

Schemas stay permissive about numeric values: physical validation lives
in the core package, whose errors the app translates into structured
4xx responses.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class SubstrateIn(BaseModel):
    eps_r: float = 4.3
    tan_delta: float = 0.025
    h_m: float = 0.0016


class SpiralIn(BaseModel):
    turns: int
    turn_width_m: float
    turn_spacing_m: float
    outer_side_m: float = 0.040


def default_family() -> list[SpiralIn]:
    """Stock three/four/five-turn family on the default substrate."""
    return [
        SpiralIn(turns=3, turn_width_m=0.001, turn_spacing_m=0.001),
        SpiralIn(turns=4, turn_width_m=0.0005, turn_spacing_m=0.0005),
        SpiralIn(turns=5, turn_width_m=0.0005, turn_spacing_m=0.0005),
    ]


class DesignRequest(BaseModel):
    substrate: SubstrateIn = SubstrateIn()
    family: list[SpiralIn] = Field(default_factory=default_family)
    anchor_turns: int = 3
    anchor_f_hz: float = 180e6


class FamilyMemberOut(BaseModel):
    turns: int
    turn_width_m: float
    turn_spacing_m: float
    outer_side_m: float
    eps_e: float
    z0_ohm: float
    turn_lengths_m: list[float]
    le_h: float
    ce_f: float
    f_hz: float


class DesignResponse(BaseModel):
    substrate: SubstrateIn
    anchor_turns: int
    anchor_f_hz: float
    members: list[FamilyMemberOut]


class SweepRequest(BaseModel):
    substrate: SubstrateIn = SubstrateIn()
    turns: list[int] = Field(default_factory=lambda: [3, 4, 5])
    turn_widths_m: list[float] = Field(default_factory=lambda: [0.0005, 0.001])
    turn_spacing_m: float = 0.001
    outer_side_m: float = 0.040
    anchor: SpiralIn = SpiralIn(turns=3, turn_width_m=0.001, turn_spacing_m=0.001)
    anchor_f_hz: float = 180e6


class SweepRow(BaseModel):
    turns: int
    turn_width_m: float
    eps_e: float
    z0_ohm: float
    le_h: float
    ce_f: float
    f_hz: float


class SweepResponse(BaseModel):
    rows: list[SweepRow]


class CurveModel(BaseModel):
    kind: str = "monotone-piecewise-linear"
    anchors: list[tuple[float, float]]


class CalibrateRequest(BaseModel):
    anchors: list[tuple[float, float]]


class CalibrateResponse(BaseModel):
    curve: CurveModel


class InvertRequest(BaseModel):
    f_hz: float
    curve: CurveModel | None = None


class InvertResponse(BaseModel):
    f_hz: float
    vwc_pct: float
    eps_real: float
    eps_imag: float


class ReportRowIn(BaseModel):
    label: str
    s: float
    eps_rm: float
    l: float


class ReportRowOut(ReportRowIn):
    fom: float


class ReportRequest(BaseModel):
    rows: list[ReportRowIn]


class ReportResponse(BaseModel):
    rows: list[ReportRowOut]


class TraceSynthesizeRequest(BaseModel):
    f0_hz: float
    bandwidth_hz: float = 4e6
    depth_db: float = -25.0
    floor_db: float = -0.5
    f_start_hz: float = 100e6
    f_stop_hz: float = 250e6
    points: int = 1501
    noise_std_db: float = 0.0
    seed: int = 1234


class TraceResponse(BaseModel):
    freq_hz: list[float]
    mag_db: list[float]


class TraceFindRequest(BaseModel):
    freq_hz: list[float]
    mag_db: list[float]
    min_depth_db: float = 3.0


class TraceFindResponse(BaseModel):
    f_hz: float


class AntennaSelectRequest(BaseModel):
    bearing_deg: float


class AntennaSelectResponse(BaseModel):
    pattern: str
    gain_toward_dbi: float
    peak_gain_dbi: float
    lobe_deg: float


class SimulateRequest(BaseModel):
    scenario: dict
    epochs: int = 1
    seed: int | None = None


class SimulateResponse(BaseModel):
    csv: str
    summary: dict
