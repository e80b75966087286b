"""Deterministic epoch-based farm deployment simulator.

Each epoch every node harvests ambient RF through its standby beam,
senses the local soil moisture through the full curve -> trace -> dip ->
inversion pipeline, and, battery permitting, transmits the reading to
the base station over the beam selected toward it.  Runs are exactly
reproducible from (scenario, seed): every node gets its own random
stream derived from (seed, epoch, node index).

Scenario input is a JSON document; output is a per-epoch CSV
(epoch,node_id,true_vwc,measured_f_hz,inverted_vwc,pattern,pr_dbm,
delivered,battery_j) plus a summary JSON.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .antenna import (
    BeamModel,
    PatternState,
    default_beams,
    friis_received_power,
    gain_toward,
    harvest_energy,
    select_beam,
)
from .errors import DomainError, NoDipError, OutOfRangeError
from .sensing import (
    CalibrationCurve,
    SensorDescriptor,
    frequency_from_vwc,
    vwc_from_frequency,
)
from .trace import NotchModel, find_resonance, synthesize_trace

logger = logging.getLogger(__name__)

EPOCH_CSV_COLUMNS = ("epoch", "node_id", "true_vwc", "measured_f_hz", "inverted_vwc",
                     "pattern", "pr_dbm", "delivered", "battery_j")


@dataclass(frozen=True)
class MoistureField:
    """Row-major VWC map (percent) over square cells of ``cell_size`` m."""

    cell_size: float
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if self.cell_size <= 0.0:
            raise DomainError("cell size must be > 0")
        if not self.values or not self.values[0]:
            raise DomainError("moisture field must have at least one cell")
        width = len(self.values[0])
        if any(len(row) != width for row in self.values):
            raise DomainError("moisture field rows must all have the same length")

    @property
    def extent(self) -> tuple[float, float]:
        """(width, height) in meters."""
        return len(self.values[0]) * self.cell_size, len(self.values) * self.cell_size

    def contains(self, x: float, y: float) -> bool:
        width, height = self.extent
        return 0.0 <= x < width and 0.0 <= y < height

    def vwc_at(self, x: float, y: float) -> float:
        if not self.contains(x, y):
            raise DomainError(f"position ({x}, {y}) lies outside the field")
        col = int(x // self.cell_size)
        row = int(y // self.cell_size)
        return self.values[row][col]


@dataclass(frozen=True)
class NodeConfig:
    """One sensing node: placement, sensor, calibration, battery.

    ``soil_depth_m`` is carried so depth insensitivity is assertable;
    the sensed frequency never depends on it.
    """

    node_id: str
    position: tuple[float, float]
    sensor: SensorDescriptor
    curve: CalibrationCurve
    battery_j: float
    soil_depth_m: float = 0.3

    def __post_init__(self) -> None:
        if not self.node_id:
            raise DomainError("node id must be non-empty")
        if self.battery_j < 0.0:
            raise DomainError("battery must be non-negative")
        if self.soil_depth_m <= 0.0:
            raise DomainError("soil depth must be > 0")


@dataclass(frozen=True)
class BaseStation:
    position: tuple[float, float]
    gain_dbi: float = 12.0


@dataclass(frozen=True)
class RadioLink:
    """Transmit power, carrier, and delivery threshold for the uplink."""

    pt_dbm: float = 20.0
    f_hz: float = 2.45e9
    link_margin_min_db: float = 10.0
    rx_sensitivity_dbm: float = -90.0

    def __post_init__(self) -> None:
        if self.f_hz <= 0.0:
            raise DomainError("carrier frequency must be > 0")


@dataclass(frozen=True)
class MeasurementConfig:
    """Sweep grid and noise knobs for the synthetic reflection measurement."""

    f_start_hz: float = 100e6
    f_stop_hz: float = 250e6
    points: int = 1501
    bandwidth_hz: float = 4e6
    depth_db: float = -25.0
    floor_db: float = -0.5
    noise_std_db: float = 0.0
    sigma_f_hz: float = 0.0
    min_depth_db: float = 3.0

    def __post_init__(self) -> None:
        if self.f_start_hz >= self.f_stop_hz:
            raise DomainError("sweep start must be below sweep stop")
        if self.noise_std_db < 0.0 or self.sigma_f_hz < 0.0:
            raise DomainError("noise levels must be non-negative")


@dataclass(frozen=True)
class EnergyConfig:
    """Transmit cost and harvesting efficiency model."""

    tx_time_s: float = 0.01
    pa_efficiency: float = 0.3
    rectifier_efficiency: float = 0.5

    def __post_init__(self) -> None:
        if self.tx_time_s < 0.0:
            raise DomainError("transmit time must be non-negative")
        if not (0.0 < self.pa_efficiency <= 1.0):
            raise DomainError("PA efficiency must lie in (0, 1]")
        if not (0.0 <= self.rectifier_efficiency <= 1.0):
            raise DomainError("rectifier efficiency must lie in [0, 1]")


@dataclass(frozen=True)
class FarmScenario:
    field: MoistureField
    nodes: tuple[NodeConfig, ...]
    base_station: BaseStation
    rf: RadioLink
    ambient_rf_w_m2: float
    epoch_s: float
    seed: int
    measurement: MeasurementConfig = MeasurementConfig()
    energy: EnergyConfig = EnergyConfig()

    def __post_init__(self) -> None:
        if not self.nodes:
            raise DomainError("scenario needs at least one node")
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise DomainError("node ids must be unique")
        if self.ambient_rf_w_m2 < 0.0:
            raise DomainError("ambient RF flux must be non-negative")
        if self.epoch_s <= 0.0:
            raise DomainError("epoch duration must be > 0")
        for node in self.nodes:
            if not self.field.contains(*node.position):
                raise DomainError(f"node {node.node_id} lies outside the field")
            d = math.dist(node.position, self.base_station.position)
            if d < 1.0:
                raise DomainError(f"node {node.node_id} is closer than 1 m to the base station")


def scenario_from_dict(doc: dict) -> FarmScenario:
    """Build a scenario from a parsed JSON document."""
    try:
        field = MoistureField(
            cell_size=float(doc["field"]["cell_size_m"]),
            values=tuple(tuple(float(v) for v in row) for row in doc["field"]["vwc"]),
        )
        nodes = tuple(
            NodeConfig(
                node_id=str(n["id"]),
                position=(float(n["position_m"][0]), float(n["position_m"][1])),
                sensor=SensorDescriptor(float(n["sensor"]["f_unloaded_hz"]),
                                        float(n["sensor"]["physical_side_m"])),
                curve=CalibrationCurve.from_json_dict(n["curve"]),
                battery_j=float(n["battery_j"]),
                soil_depth_m=float(n.get("soil_depth_m", 0.3)),
            )
            for n in doc["nodes"]
        )
        base = BaseStation(
            position=(float(doc["base_station"]["position_m"][0]),
                      float(doc["base_station"]["position_m"][1])),
            gain_dbi=float(doc["base_station"].get("gain_dbi", 12.0)),
        )
        rf = RadioLink(**{k: float(v) for k, v in doc.get("rf", {}).items()})
        measurement = MeasurementConfig(**{
            k: (int(v) if k == "points" else float(v))
            for k, v in doc.get("measurement", {}).items()
        })
        energy = EnergyConfig(**{k: float(v) for k, v in doc.get("energy", {}).items()})
        return FarmScenario(
            field=field,
            nodes=nodes,
            base_station=base,
            rf=rf,
            ambient_rf_w_m2=float(doc.get("ambient_rf_w_m2", 0.0)),
            epoch_s=float(doc["epoch_s"]),
            seed=int(doc["seed"]),
            measurement=measurement,
            energy=energy,
        )
    except KeyError as exc:
        raise DomainError(f"scenario document missing key: {exc}") from exc
    except TypeError as exc:
        raise DomainError(f"malformed scenario document: {exc}") from exc


def scenario_from_json(path: str | Path) -> FarmScenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class NodeEpochRecord:
    """Outcome of one node in one epoch; None marks a failed stage."""

    node_id: str
    true_vwc: float
    measured_f_hz: float | None
    inverted_vwc: float | None
    pattern: str | None
    pr_dbm: float | None
    delivered: bool
    battery_j_after: float
    harvest_j: float
    spend_j: float
    status: str


@dataclass(frozen=True)
class EpochReport:
    epoch: int
    rows: tuple[NodeEpochRecord, ...]


def sense(node: NodeConfig, true_vwc: float, seed,
          measurement: MeasurementConfig | None = None) -> tuple[float, float]:
    """Measure the node's moisture: forward map, synthesize, detect, invert.

    ``seed`` may be an int or a numpy Generator.  Raises OutOfRangeError
    when the moisture or the detected dip leaves the calibrated band, and
    NoDipError when no usable notch appears in the sweep.
    """
    m = measurement or MeasurementConfig()
    rng = np.random.default_rng(seed)
    f_true = frequency_from_vwc(node.curve, true_vwc)
    f_center = f_true
    if m.sigma_f_hz > 0.0:
        f_center += m.sigma_f_hz * float(rng.standard_normal())
    if not (m.f_start_hz < f_center < m.f_stop_hz):
        raise NoDipError(f"jittered notch at {f_center} Hz left the sweep span")
    notch = NotchModel(f_center, m.bandwidth_hz, m.depth_db, m.floor_db)
    trace = synthesize_trace(notch, m.f_start_hz, m.f_stop_hz, m.points,
                             noise_std=m.noise_std_db, seed=rng)
    f_est = find_resonance(trace, m.min_depth_db)
    return f_est, vwc_from_frequency(node.curve, f_est)


def communicate(node: NodeConfig, base_station: BaseStation, rf: RadioLink,
                beams: Sequence[BeamModel] | None = None,
                ) -> tuple[PatternState, float, bool]:
    """Select the beam toward the base station and budget the link.

    Returns (pattern, received power dBm, delivered); delivery requires
    the received power to clear sensitivity plus the minimum margin.
    """
    beams = beams if beams is not None else default_beams()
    dx = base_station.position[0] - node.position[0]
    dy = base_station.position[1] - node.position[1]
    distance = math.hypot(dx, dy)
    bearing = math.degrees(math.atan2(dy, dx)) % 360.0
    beam = select_beam(beams, bearing)
    pr = friis_received_power(rf.pt_dbm, gain_toward(beam, bearing),
                              base_station.gain_dbi, distance, rf.f_hz)
    delivered = pr >= rf.rx_sensitivity_dbm + rf.link_margin_min_db
    return beam.state, pr, delivered


def _dbm_to_w(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


class FarmSimulator:
    """Owns the mutable per-node state (battery, standby beam) for one run."""

    def __init__(self, scenario: FarmScenario, beams: Sequence[BeamModel] | None = None):
        self.scenario = scenario
        self._beams = tuple(beams) if beams is not None else default_beams()
        self._battery = {n.node_id: n.battery_j for n in scenario.nodes}
        self._standby: dict[str, PatternState] = {
            n.node_id: self._beams[0].state for n in scenario.nodes
        }

    def step(self, epoch_index: int) -> EpochReport:
        """Advance one epoch: harvest, sense, communicate, settle the ledger."""
        sc = self.scenario
        rows = []
        for idx, node in enumerate(sc.nodes):
            rng = np.random.default_rng((sc.seed, epoch_index, idx))
            battery = self._battery[node.node_id]
            harvest = harvest_energy(sc.ambient_rf_w_m2, self._standby[node.node_id],
                                     sc.rf.f_hz, sc.epoch_s, sc.energy.rectifier_efficiency)
            battery += harvest
            true_vwc = sc.field.vwc_at(*node.position)

            measured_f = inverted = pr = None
            pattern = None
            delivered = False
            spend = 0.0
            status = "ok"
            try:
                measured_f, inverted = sense(node, true_vwc, rng, sc.measurement)
            except NoDipError as exc:
                status = "no_dip"
                logger.info("epoch %d node %s: measurement failed: %s",
                            epoch_index, node.node_id, exc)
            except OutOfRangeError as exc:
                status = "out_of_range"
                logger.info("epoch %d node %s: %s", epoch_index, node.node_id, exc)

            if status == "ok":
                cost = _dbm_to_w(sc.rf.pt_dbm) * sc.energy.tx_time_s / sc.energy.pa_efficiency
                if battery >= cost:
                    state, pr, delivered = communicate(node, sc.base_station, sc.rf, self._beams)
                    battery -= cost
                    spend = cost
                    pattern = state.name
                    self._standby[node.node_id] = state
                else:
                    status = "no_battery"
                    logger.info("epoch %d node %s: battery %.4g J below transmit cost %.4g J",
                                epoch_index, node.node_id, battery, cost)

            self._battery[node.node_id] = battery
            rows.append(NodeEpochRecord(
                node_id=node.node_id,
                true_vwc=float(true_vwc),
                measured_f_hz=None if measured_f is None else float(measured_f),
                inverted_vwc=None if inverted is None else float(inverted),
                pattern=pattern,
                pr_dbm=None if pr is None else float(pr),
                delivered=delivered,
                battery_j_after=float(battery),
                harvest_j=float(harvest),
                spend_j=float(spend),
                status=status,
            ))
        return EpochReport(epoch_index, tuple(rows))

    def run(self, n_epochs: int, csv_path: str | Path | None = None,
            summary_path: str | Path | None = None) -> tuple[list[EpochReport], dict]:
        """Run ``n_epochs`` epochs, streaming CSV rows as they are produced."""
        if n_epochs < 1:
            raise DomainError(f"need at least one epoch, got {n_epochs}")
        reports: list[EpochReport] = []
        delivered = 0
        measured = 0
        abs_err_sum = 0.0
        harvest_total = 0.0
        spend_total = 0.0

        csv_fh = open(csv_path, "w", newline="") if csv_path is not None else None
        try:
            writer = None
            if csv_fh is not None:
                writer = csv.writer(csv_fh)
                writer.writerow(EPOCH_CSV_COLUMNS)
            for epoch in range(n_epochs):
                report = self.step(epoch)
                reports.append(report)
                for row in report.rows:
                    if writer is not None:
                        writer.writerow(format_csv_row(report.epoch, row))
                    delivered += int(row.delivered)
                    harvest_total += row.harvest_j
                    spend_total += row.spend_j
                    if row.inverted_vwc is not None:
                        measured += 1
                        abs_err_sum += abs(row.inverted_vwc - row.true_vwc)
        finally:
            if csv_fh is not None:
                csv_fh.close()

        attempts = n_epochs * len(self.scenario.nodes)
        summary = {
            "epochs": n_epochs,
            "node_count": len(self.scenario.nodes),
            "delivery_rate": delivered / attempts,
            "measurements": measured,
            "mean_abs_vwc_error": (abs_err_sum / measured) if measured else None,
            "energy": {"harvest_j": harvest_total, "spend_j": spend_total},
            "final_battery_j": {nid: self._battery[nid] for nid in sorted(self._battery)},
        }
        if summary_path is not None:
            Path(summary_path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        return reports, summary


def format_csv_row(epoch: int, row: NodeEpochRecord) -> list[str]:
    """Render one record as the canonical CSV cell strings."""

    def fmt(value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return str(value)
        return str(value)

    return [str(epoch), row.node_id, fmt(row.true_vwc), fmt(row.measured_f_hz),
            fmt(row.inverted_vwc), fmt(row.pattern), fmt(row.pr_dbm),
            fmt(row.delivered), fmt(row.battery_j_after)]


def reports_to_csv_text(reports: Sequence[EpochReport]) -> str:
    """Render epoch reports exactly as :meth:`FarmSimulator.run` writes them."""
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(EPOCH_CSV_COLUMNS)
    for report in reports:
        for row in report.rows:
            writer.writerow(format_csv_row(report.epoch, row))
    return buf.getvalue()


def step(scenario: FarmScenario, epoch_index: int) -> EpochReport:
    """One epoch from a fresh simulator (initial batteries, default standby)."""
    return FarmSimulator(scenario).step(epoch_index)


def run(scenario: FarmScenario, n_epochs: int, csv_path: str | Path | None = None,
        summary_path: str | Path | None = None) -> tuple[list[EpochReport], dict]:
    """Run a fresh simulator for ``n_epochs`` epochs."""
    return FarmSimulator(scenario).run(n_epochs, csv_path, summary_path)
