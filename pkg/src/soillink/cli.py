"""Command-line client for the soillink service.

Every subcommand builds a JSON request and sends it to the service: by
default an in-process copy of the FastAPI app, or a remote instance when
``--server`` (or SOILLINK_SERVER) is set.  Flags take field-friendly
units (mm, MHz) and are converted to SI on the wire; outputs always
carry explicit units.

Exit codes: 0 success, 2 input/validation error, 3 calibration or model
error, 4 out-of-range query.
"""

from __future__ import annotations

import asyncio
import io
import json
import sys
from pathlib import Path

import click
import httpx

from .configdir import COMPARISON_FILE, DEMO_SCENARIO_FILE, find_default
from .sensing import ComparisonRow, read_comparison_rows, write_comparison_csv
from .trace import TRACE_CSV_COLUMNS, read_trace_csv

# Default RNG seed for every subcommand that draws random numbers.
DEFAULT_SEED = 1234

MHZ = 1e6
MM = 1e-3

_EXIT_CODES = {"validation": 2, "domain": 2, "calibration": 3,
               "no_dip": 3, "no_pattern": 3, "out_of_range": 4}


class ServiceClient:
    """Thin HTTP client; in-process ASGI transport unless a server URL is given."""

    def __init__(self, server: str | None = None):
        self.server = server

    def post(self, path: str, payload: dict, exit_codes: dict[str, int] | None = None) -> dict:
        async def _go():
            if self.server:
                async with httpx.AsyncClient(base_url=self.server, timeout=300.0) as client:
                    return await client.post(path, json=payload)
            from .service.app import app

            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport, base_url="http://soillink.local",
                                         timeout=300.0) as client:
                return await client.post(path, json=payload)

        try:
            response = asyncio.run(_go())
        except httpx.HTTPError as exc:
            click.echo(f"error: cannot reach service: {exc}", err=True)
            sys.exit(2)
        if response.status_code >= 400:
            self._fail(response, exit_codes)
        return response.json()

    @staticmethod
    def _fail(response: httpx.Response, exit_codes: dict[str, int] | None) -> None:
        codes = dict(_EXIT_CODES)
        codes.update(exit_codes or {})
        kind, message = "validation", response.text
        try:
            detail = response.json().get("detail")
            if isinstance(detail, dict):
                kind = detail.get("kind", kind)
                message = detail.get("message", message)
            elif detail is not None:
                message = json.dumps(detail)
        except ValueError:
            pass
        click.echo(f"error ({kind}): {message}", err=True)
        sys.exit(codes.get(kind, 2))


pass_client = click.make_pass_decorator(ServiceClient)


@click.group()
@click.option("--server", envvar="SOILLINK_SERVER", default=None, metavar="URL",
              help="Base URL of a running service; defaults to an in-process instance.")
@click.version_option(package_name="soillink")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Soil-moisture sensor and antenna link modeling toolkit."""
    ctx.obj = ServiceClient(server)


def _parse_family(text: str) -> list[dict]:
    members = []
    for chunk in text.split(","):
        parts = chunk.strip().split(":")
        if len(parts) != 3:
            raise click.UsageError(
                f"family member {chunk!r} must be TURNS:WIDTH_MM:SPACING_MM")
        try:
            turns, width_mm, spacing_mm = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise click.UsageError(f"family member {chunk!r}: {exc}") from exc
        if turns < 1 or width_mm <= 0.0 or spacing_mm <= 0.0:
            raise click.UsageError(
                f"family member {chunk!r}: turns must be >= 1 and widths/spacings > 0")
        members.append({"turns": turns, "turn_width_m": width_mm * MM,
                        "turn_spacing_m": spacing_mm * MM})
    return members


def _parse_float_list(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad {name} list {text!r}: {exc}") from exc


@main.command()
@click.option("--eps-r", default=4.3, show_default=True, help="Substrate relative permittivity.")
@click.option("--tan-delta", default=0.025, show_default=True, help="Substrate loss tangent.")
@click.option("--h-mm", default=1.6, show_default=True, help="Substrate thickness, mm.")
@click.option("--outer-mm", default=40.0, show_default=True, help="Outer side of the spiral, mm.")
@click.option("--family", "family_text", default="3:1.0:1.0,4:0.5:0.5,5:0.5:0.5",
              show_default=True, metavar="N:WT_MM:S_MM[,...]",
              help="Spiral family members as turns:width:spacing triples.")
@click.option("--anchor-turns", default=3, show_default=True,
              help="Family member whose resonance pins the capacitance scale.")
@click.option("--anchor-f-mhz", default=180.0, show_default=True,
              help="Observed resonance of the anchor member, MHz.")
@click.option("--sweep-turns", default=None, metavar="N1,N2,...",
              help="Sweep mode: turn counts (requires --sweep-wt-mm); emits CSV.")
@click.option("--sweep-wt-mm", default=None, metavar="W1,W2,...",
              help="Sweep mode: slot widths in mm.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the table as CSV here instead of a console table.")
@pass_client
def design(client: ServiceClient, eps_r, tan_delta, h_mm, outer_mm, family_text,
           anchor_turns, anchor_f_mhz, sweep_turns, sweep_wt_mm, out_path) -> None:
    """Analyze a spiral-slot resonator family: eps_e, Z0, L, C, resonances."""
    if h_mm <= 0.0 or outer_mm <= 0.0:
        raise click.UsageError("substrate thickness and outer side must be > 0")
    if anchor_f_mhz <= 0.0:
        raise click.UsageError("anchor frequency must be > 0")
    substrate = {"eps_r": eps_r, "tan_delta": tan_delta, "h_m": h_mm * MM}

    if (sweep_turns is None) != (sweep_wt_mm is None):
        raise click.UsageError("sweep mode needs both --sweep-turns and --sweep-wt-mm")

    if sweep_turns is not None:
        turns = [int(x) for x in sweep_turns.split(",") if x.strip()]
        widths = _parse_float_list(sweep_wt_mm, "--sweep-wt-mm")
        if not turns or not widths:
            raise click.UsageError("sweep lists must be non-empty")
        if any(w <= 0.0 for w in widths):
            raise click.UsageError("sweep widths must be > 0")
        family = _parse_family(family_text)
        anchor = _anchor_member(family, anchor_turns, outer_mm)
        payload = {
            "substrate": substrate,
            "turns": turns,
            "turn_widths_m": [w * MM for w in widths],
            "turn_spacing_m": anchor["turn_spacing_m"],
            "outer_side_m": outer_mm * MM,
            "anchor": anchor,
            "anchor_f_hz": anchor_f_mhz * MHZ,
        }
        doc = client.post("/design/sweep", payload)
        lines = ["turns,wt_mm,eps_e,z0_ohm,le_nh,ce_pf,f_mhz"]
        for row in doc["rows"]:
            lines.append(",".join([
                str(row["turns"]), _fmt(row["turn_width_m"] / MM), _fmt(row["eps_e"]),
                _fmt(row["z0_ohm"]), _fmt(row["le_h"] * 1e9), _fmt(row["ce_f"] * 1e12),
                _fmt(row["f_hz"] / MHZ),
            ]))
        _emit_lines(lines, out_path)
        return

    family = _parse_family(family_text)
    for member in family:
        member["outer_side_m"] = outer_mm * MM
    payload = {
        "substrate": substrate,
        "family": family,
        "anchor_turns": anchor_turns,
        "anchor_f_hz": anchor_f_mhz * MHZ,
    }
    doc = client.post("/design", payload)
    if out_path is not None:
        lines = ["turns,wt_mm,s_mm,eps_e,z0_ohm,le_nh,ce_pf,f_mhz"]
        for m in doc["members"]:
            lines.append(",".join([
                str(m["turns"]), _fmt(m["turn_width_m"] / MM), _fmt(m["turn_spacing_m"] / MM),
                _fmt(m["eps_e"]), _fmt(m["z0_ohm"]), _fmt(m["le_h"] * 1e9),
                _fmt(m["ce_f"] * 1e12), _fmt(m["f_hz"] / MHZ),
            ]))
        _emit_lines(lines, out_path)
        return
    click.echo(f"substrate: eps_r={eps_r} tan_delta={tan_delta} h={h_mm} mm")
    click.echo(f"anchor: {anchor_turns} turns at {anchor_f_mhz} MHz")
    click.echo("turns  wt_mm   s_mm    eps_e    z0_ohm    le_nH      ce_pF     f_MHz")
    for m in doc["members"]:
        click.echo(f"{m['turns']:<6d} {m['turn_width_m']/MM:<7.3f} {m['turn_spacing_m']/MM:<7.3f} "
                   f"{m['eps_e']:<8.4f} {m['z0_ohm']:<9.3f} {m['le_h']*1e9:<10.4f} "
                   f"{m['ce_f']*1e12:<9.4f} {m['f_hz']/MHZ:.4f}")
    for m in doc["members"]:
        lengths = ", ".join(f"{l / MM:.1f}" for l in m["turn_lengths_m"])
        click.echo(f"turn lengths (mm), {m['turns']} turns: {lengths}")


def _anchor_member(family: list[dict], anchor_turns: int, outer_mm: float) -> dict:
    for member in family:
        if member["turns"] == anchor_turns:
            return {**member, "outer_side_m": outer_mm * MM}
    raise click.UsageError(f"anchor turns {anchor_turns} not present in --family")


def _fmt(x: float) -> str:
    return str(float(x))


def _emit_lines(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path is None:
        click.echo(text, nl=False)
    else:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")


@main.command()
@click.option("--anchor", "anchor_texts", multiple=True, metavar="VWC:MHZ",
              help="Inline anchor, repeatable (e.g. --anchor 0:158 --anchor 30:115).")
@click.option("--anchors-json", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file with SI anchors: {\"anchors\": [[vwc_pct, f_hz], ...]}.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the fitted curve JSON here (default: stdout).")
@pass_client
def calibrate(client: ServiceClient, anchor_texts, anchors_json, out_path) -> None:
    """Fit a monotone moisture-to-frequency calibration curve from anchors."""
    anchors: list[list[float]] = []
    if anchors_json is not None:
        doc = _load_json(anchors_json)
        try:
            anchors.extend([[float(v), float(f)] for v, f in doc["anchors"]])
        except (KeyError, TypeError, ValueError) as exc:
            click.echo(f"error: malformed anchors file: {exc}", err=True)
            sys.exit(2)
    for text in anchor_texts:
        parts = text.split(":")
        if len(parts) != 2:
            raise click.UsageError(f"anchor {text!r} must be VWC:MHZ")
        try:
            anchors.append([float(parts[0]), float(parts[1]) * MHZ])
        except ValueError as exc:
            raise click.UsageError(f"anchor {text!r}: {exc}") from exc
    if not anchors:
        raise click.UsageError("no anchors given; use --anchor or --anchors-json")
    doc = client.post("/calibrate", {"anchors": anchors}, exit_codes={"domain": 3})
    text = json.dumps(doc["curve"], indent=2) + "\n"
    if out_path is None:
        click.echo(text, nl=False)
    else:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")


@main.command()
@click.option("--f-mhz", required=True, type=float, help="Measured resonance, MHz.")
@click.option("--curve", "curve_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Calibration curve JSON (default: bundled curve).")
@pass_client
def invert(client: ServiceClient, f_mhz: float, curve_path) -> None:
    """Invert a measured resonance to moisture and soil permittivity."""
    payload: dict = {"f_hz": f_mhz * MHZ}
    if curve_path is not None:
        payload["curve"] = _load_json(curve_path)
    doc = client.post("/invert", payload)
    click.echo(f"f = {doc['f_hz'] / MHZ:.4f} MHz")
    click.echo(f"vwc = {doc['vwc_pct']:.4f} %")
    click.echo(f"eps_real = {doc['eps_real']:.4f}")
    click.echo(f"eps_imag = {doc['eps_imag']:.4f}")


@main.command()
@click.option("--rows", "rows_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV of sensors (label,S,eps_rm,l); default: bundled comparison set.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the ranked CSV here (default: stdout).")
@pass_client
def report(client: ServiceClient, rows_path, out_path) -> None:
    """Rank sensors by figure of merit (S * eps_rm / l), best first."""
    path = Path(rows_path) if rows_path is not None else find_default(COMPARISON_FILE)
    try:
        rows = read_comparison_rows(path)
    except (OSError, ValueError) as exc:
        click.echo(f"error: cannot read rows CSV: {exc}", err=True)
        sys.exit(2)
    for label, s, eps_rm, l in rows:
        if s <= 0.0 or eps_rm <= 0.0 or l <= 0.0:
            click.echo(f"error: row {label!r} needs S, eps_rm and l all > 0", err=True)
            sys.exit(3)
    doc = client.post("/report", {"rows": [
        {"label": label, "s": s, "eps_rm": eps_rm, "l": l} for label, s, eps_rm, l in rows
    ]}, exit_codes={"domain": 3})
    ranked = [ComparisonRow(r["label"], r["s"], r["eps_rm"], r["l"], r["fom"])
              for r in doc["rows"]]
    buf = io.StringIO()
    write_comparison_csv(ranked, buf)
    if out_path is None:
        click.echo(buf.getvalue(), nl=False)
    else:
        Path(out_path).write_text(buf.getvalue())
        click.echo(f"wrote {out_path}")


@main.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Scenario JSON (default: bundled demo).")
@click.option("--epochs", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--out-csv", type=click.Path(dir_okay=False), default="farm_run.csv",
              show_default=True)
@click.option("--out-summary", type=click.Path(dir_okay=False), default="farm_run_summary.json",
              show_default=True)
@pass_client
def simulate(client: ServiceClient, scenario_path, epochs, seed, out_csv, out_summary) -> None:
    """Run the farm deployment simulator and write per-epoch CSV plus summary."""
    path = Path(scenario_path) if scenario_path is not None else find_default(DEMO_SCENARIO_FILE)
    payload = {"scenario": _load_json(path), "epochs": epochs}
    if seed is not None:
        payload["seed"] = seed
    doc = client.post("/simulate", payload)
    Path(out_csv).write_bytes(doc["csv"].encode())
    Path(out_summary).write_text(json.dumps(doc["summary"], indent=2, sort_keys=True) + "\n")
    summary = doc["summary"]
    click.echo(f"epochs: {summary['epochs']}  nodes: {summary['node_count']}")
    click.echo(f"delivery rate: {summary['delivery_rate']:.4f}")
    err = summary["mean_abs_vwc_error"]
    click.echo("mean |vwc error|: " + (f"{err:.4f} %" if err is not None else "n/a"))
    click.echo(f"energy: harvested {summary['energy']['harvest_j']:.6g} J, "
               f"spent {summary['energy']['spend_j']:.6g} J")
    click.echo(f"wrote {out_csv} and {out_summary}")


@main.group()
def trace() -> None:
    """Synthesize reflection traces and locate resonance dips."""


@trace.command("synth")
@click.option("--f0-mhz", required=True, type=float, help="Notch center, MHz.")
@click.option("--bw-mhz", default=4.0, show_default=True, help="3-dB bandwidth, MHz.")
@click.option("--depth-db", default=-25.0, show_default=True)
@click.option("--floor-db", default=-0.5, show_default=True)
@click.option("--start-mhz", default=100.0, show_default=True)
@click.option("--stop-mhz", default=250.0, show_default=True)
@click.option("--points", type=click.IntRange(min=16), default=1501, show_default=True)
@click.option("--noise-db", default=0.0, show_default=True, help="Gaussian trace noise, dB std.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Trace CSV destination (freq_hz,mag_db).")
@pass_client
def trace_synth(client: ServiceClient, f0_mhz, bw_mhz, depth_db, floor_db, start_mhz,
                stop_mhz, points, noise_db, seed, out_path) -> None:
    """Write a synthetic notch trace as CSV."""
    doc = client.post("/trace/synthesize", {
        "f0_hz": f0_mhz * MHZ, "bandwidth_hz": bw_mhz * MHZ,
        "depth_db": depth_db, "floor_db": floor_db,
        "f_start_hz": start_mhz * MHZ, "f_stop_hz": stop_mhz * MHZ,
        "points": points, "noise_std_db": noise_db, "seed": seed,
    })
    lines = [",".join(TRACE_CSV_COLUMNS)]
    lines.extend(f"{_fmt(f)},{_fmt(m)}" for f, m in zip(doc["freq_hz"], doc["mag_db"]))
    Path(out_path).write_text("\n".join(lines) + "\n")
    click.echo(f"wrote {out_path} ({points} points, {start_mhz}-{stop_mhz} MHz)")


@trace.command("find")
@click.argument("trace_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--min-depth-db", default=3.0, show_default=True,
              help="Required notch depth below the trace floor.")
@pass_client
def trace_find(client: ServiceClient, trace_csv, min_depth_db) -> None:
    """Locate the resonance dip in a trace CSV."""
    try:
        tr = read_trace_csv(trace_csv)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    doc = client.post("/trace/find", {
        "freq_hz": [float(f) for f in tr.freqs],
        "mag_db": [float(m) for m in tr.mag_db],
        "min_depth_db": min_depth_db,
    })
    click.echo(f"f0 = {doc['f_hz'] / MHZ:.6f} MHz ({doc['f_hz']:.1f} Hz)")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service with uvicorn."""
    import uvicorn

    uvicorn.run("soillink.service.app:app", host=host, port=port)


def _load_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        click.echo(f"error: {path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                   f"{exc.msg}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
