"""HTTP service exposing the modeling toolkit.

Every endpoint wraps a core-package call; core exceptions map onto
structured 4xx responses with a machine-readable ``kind`` so clients can
distinguish bad input (400), inconsistent calibration/model state (409),
and out-of-range queries (416).
"""

from __future__ import annotations

import dataclasses

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..antenna import default_beams, gain_toward, select_beam
from ..errors import (
    CalibrationError,
    DomainError,
    NoDefinedPatternError,
    NoDipError,
    OutOfRangeError,
)
from ..microstrip import Substrate
from ..resonator import (
    SpiralSpec,
    calibrate_capacitance,
    characteristic_impedance,
    effective_permittivity,
    equivalent_inductance,
    predict_family,
    unwound_turn_lengths,
)
from ..sensing import (
    CalibrationCurve,
    comparison_report,
    default_curve,
    default_soil_table,
    fit_calibration_curve,
    permittivity_at_vwc,
    vwc_from_frequency,
)
from ..simulator import FarmSimulator, reports_to_csv_text, scenario_from_dict
from ..trace import NotchModel, S11Trace, find_resonance, synthesize_trace
from . import schemas

_ERROR_STATUS: dict[type, tuple[int, str]] = {
    DomainError: (400, "domain"),
    CalibrationError: (409, "calibration"),
    NoDipError: (409, "no_dip"),
    NoDefinedPatternError: (409, "no_pattern"),
    OutOfRangeError: (416, "out_of_range"),
}


def _spiral(spec_in: schemas.SpiralIn, substrate: Substrate) -> SpiralSpec:
    return SpiralSpec(spec_in.turns, spec_in.turn_width_m, spec_in.turn_spacing_m,
                      spec_in.outer_side_m, substrate)


def create_app() -> FastAPI:
    app = FastAPI(
        title="soillink",
        version=__version__,
        description="Soil-moisture resonator sensing and antenna link modeling service",
    )

    for exc_type, (status, kind) in _ERROR_STATUS.items():
        def handler(request: Request, exc: Exception,
                    status: int = status, kind: str = kind) -> JSONResponse:
            return JSONResponse(status_code=status,
                                content={"detail": {"kind": kind, "message": str(exc)}})

        app.add_exception_handler(exc_type, handler)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/design", response_model=schemas.DesignResponse)
    def design(req: schemas.DesignRequest) -> schemas.DesignResponse:
        substrate = Substrate(req.substrate.eps_r, req.substrate.tan_delta, req.substrate.h_m)
        specs = [_spiral(m, substrate) for m in req.family]
        anchors = [s for s in specs if s.turns == req.anchor_turns]
        if not anchors:
            raise DomainError(f"anchor with {req.anchor_turns} turns is not in the family")
        freqs = predict_family(specs, (anchors[0], req.anchor_f_hz))
        members = []
        for spec, f in zip(specs, freqs):
            le = equivalent_inductance(spec)
            members.append(schemas.FamilyMemberOut(
                turns=spec.turns,
                turn_width_m=spec.turn_width,
                turn_spacing_m=spec.turn_spacing,
                outer_side_m=spec.outer_side,
                eps_e=effective_permittivity(substrate, spec.turn_width),
                z0_ohm=characteristic_impedance(substrate, spec.turn_width),
                turn_lengths_m=unwound_turn_lengths(spec),
                le_h=le,
                ce_f=calibrate_capacitance(le, f),
                f_hz=f,
            ))
        return schemas.DesignResponse(substrate=req.substrate, anchor_turns=req.anchor_turns,
                                      anchor_f_hz=req.anchor_f_hz, members=members)

    @app.post("/design/sweep", response_model=schemas.SweepResponse)
    def design_sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
        substrate = Substrate(req.substrate.eps_r, req.substrate.tan_delta, req.substrate.h_m)
        anchor_spec = _spiral(req.anchor, substrate)
        specs = [SpiralSpec(n, w, req.turn_spacing_m, req.outer_side_m, substrate)
                 for n in req.turns for w in req.turn_widths_m]
        freqs = predict_family(specs + [anchor_spec], (anchor_spec, req.anchor_f_hz))
        rows = []
        for spec, f in zip(specs, freqs):
            le = equivalent_inductance(spec)
            rows.append(schemas.SweepRow(
                turns=spec.turns,
                turn_width_m=spec.turn_width,
                eps_e=effective_permittivity(substrate, spec.turn_width),
                z0_ohm=characteristic_impedance(substrate, spec.turn_width),
                le_h=le,
                ce_f=calibrate_capacitance(le, f),
                f_hz=f,
            ))
        return schemas.SweepResponse(rows=rows)

    @app.post("/calibrate", response_model=schemas.CalibrateResponse)
    def calibrate(req: schemas.CalibrateRequest) -> schemas.CalibrateResponse:
        curve = fit_calibration_curve(req.anchors)
        return schemas.CalibrateResponse(
            curve=schemas.CurveModel(anchors=list(curve.anchors)))

    @app.post("/invert", response_model=schemas.InvertResponse)
    def invert(req: schemas.InvertRequest) -> schemas.InvertResponse:
        if req.curve is not None:
            curve = CalibrationCurve(tuple((v, f) for v, f in req.curve.anchors))
        else:
            curve = default_curve()
        vwc = vwc_from_frequency(curve, req.f_hz)
        eps_real, eps_imag = permittivity_at_vwc(default_soil_table(), vwc)
        return schemas.InvertResponse(f_hz=req.f_hz, vwc_pct=vwc,
                                      eps_real=eps_real, eps_imag=eps_imag)

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(req: schemas.ReportRequest) -> schemas.ReportResponse:
        rows = comparison_report([(r.label, r.s, r.eps_rm, r.l) for r in req.rows])
        return schemas.ReportResponse(rows=[
            schemas.ReportRowOut(label=r.label, s=r.s, eps_rm=r.eps_rm, l=r.l, fom=r.fom)
            for r in rows
        ])

    @app.post("/trace/synthesize", response_model=schemas.TraceResponse)
    def trace_synthesize(req: schemas.TraceSynthesizeRequest) -> schemas.TraceResponse:
        model = NotchModel(req.f0_hz, req.bandwidth_hz, req.depth_db, req.floor_db)
        trace = synthesize_trace(model, req.f_start_hz, req.f_stop_hz, req.points,
                                 noise_std=req.noise_std_db, seed=req.seed)
        return schemas.TraceResponse(freq_hz=[float(f) for f in trace.freqs],
                                     mag_db=[float(m) for m in trace.mag_db])

    @app.post("/trace/find", response_model=schemas.TraceFindResponse)
    def trace_find(req: schemas.TraceFindRequest) -> schemas.TraceFindResponse:
        trace = S11Trace(req.freq_hz, req.mag_db)
        return schemas.TraceFindResponse(f_hz=find_resonance(trace, req.min_depth_db))

    @app.post("/antenna/select", response_model=schemas.AntennaSelectResponse)
    def antenna_select(req: schemas.AntennaSelectRequest) -> schemas.AntennaSelectResponse:
        beam = select_beam(default_beams(), req.bearing_deg)
        return schemas.AntennaSelectResponse(
            pattern=beam.state.name,
            gain_toward_dbi=gain_toward(beam, req.bearing_deg),
            peak_gain_dbi=beam.state.gain_dbi,
            lobe_deg=beam.state.lobe_deg,
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        scenario = scenario_from_dict(req.scenario)
        if req.seed is not None:
            scenario = dataclasses.replace(scenario, seed=req.seed)
        reports, summary = FarmSimulator(scenario).run(req.epochs)
        return schemas.SimulateResponse(csv=reports_to_csv_text(reports), summary=summary)

    return app


app = create_app()
