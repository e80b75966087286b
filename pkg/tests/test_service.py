"""HTTP surface: endpoint behavior and error mapping."""

import json

import pytest
from fastapi.testclient import TestClient

from soillink.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def demo_doc(demo_scenario_path):
    return json.loads(open(demo_scenario_path).read())


def test_health(client):
    doc = client.get("/health").json()
    assert doc["status"] == "ok"


def test_design_default_family(client):
    resp = client.post("/design", json={})
    assert resp.status_code == 200
    members = resp.json()["members"]
    assert [m["turns"] for m in members] == [3, 4, 5]
    freqs = [m["f_hz"] for m in members]
    assert freqs[0] == pytest.approx(180e6, rel=1e-9)
    assert freqs[0] > freqs[1] > freqs[2]
    assert members[0]["turn_lengths_m"] == pytest.approx([0.160, 0.144, 0.128])
    assert members[0]["z0_ohm"] == pytest.approx(88.3477754312914, rel=1e-9)


def test_design_rejects_unknown_anchor(client):
    resp = client.post("/design", json={"anchor_turns": 7})
    assert resp.status_code == 400
    assert resp.json()["detail"]["kind"] == "domain"


def test_design_sweep(client):
    resp = client.post("/design/sweep", json={
        "turns": [3, 4], "turn_widths_m": [0.0005, 0.001]})
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert len(rows) == 4
    assert all(row["f_hz"] > 0 for row in rows)


def test_calibrate_and_invert_round_trip(client):
    resp = client.post("/calibrate", json={"anchors": [[0.0, 158e6], [30.0, 115e6]]})
    assert resp.status_code == 200
    curve = resp.json()["curve"]
    resp = client.post("/invert", json={"f_hz": 136.5e6, "curve": curve})
    doc = resp.json()
    assert doc["vwc_pct"] == pytest.approx(15.0, abs=1e-9)
    assert doc["eps_real"] == pytest.approx(14.5, rel=1e-12)
    assert doc["eps_imag"] == pytest.approx(1.8, rel=1e-12)


def test_invert_default_curve_endpoints(client):
    assert client.post("/invert", json={"f_hz": 158e6}).json()["vwc_pct"] == 0.0
    assert client.post("/invert", json={"f_hz": 115e6}).json()["vwc_pct"] == 30.0


def test_invert_out_of_band_maps_to_416(client):
    resp = client.post("/invert", json={"f_hz": 200e6})
    assert resp.status_code == 416
    assert resp.json()["detail"]["kind"] == "out_of_range"


def test_calibrate_errors(client):
    resp = client.post("/calibrate", json={"anchors": [[0.0, 158e6], [30.0, 160e6]]})
    assert resp.status_code == 409
    assert resp.json()["detail"]["kind"] == "calibration"
    resp = client.post("/calibrate", json={"anchors": [[0.0, 158e6]]})
    assert resp.status_code == 400
    assert resp.json()["detail"]["kind"] == "domain"


def test_validation_errors_are_422(client):
    assert client.post("/invert", json={}).status_code == 422
    assert client.post("/report", json={"rows": [{"label": "x"}]}).status_code == 422


def test_report_sorted(client):
    resp = client.post("/report", json={"rows": [
        {"label": "a", "s": 1.0, "eps_rm": 10.0, "l": 0.5},
        {"label": "b", "s": 2.0, "eps_rm": 10.0, "l": 0.5},
    ]})
    rows = resp.json()["rows"]
    assert [r["label"] for r in rows] == ["b", "a"]
    assert rows[0]["fom"] == pytest.approx(40.0, rel=1e-12)


def test_report_zero_length_is_domain_error(client):
    resp = client.post("/report", json={"rows": [
        {"label": "bad", "s": 1.0, "eps_rm": 10.0, "l": 0.0}]})
    assert resp.status_code == 400
    assert resp.json()["detail"]["kind"] == "domain"


def test_trace_round_trip(client):
    resp = client.post("/trace/synthesize", json={"f0_hz": 158e6})
    trace = resp.json()
    assert len(trace["freq_hz"]) == 1501
    resp = client.post("/trace/find", json={"freq_hz": trace["freq_hz"],
                                            "mag_db": trace["mag_db"]})
    assert resp.json()["f_hz"] == pytest.approx(158e6, abs=1.0)


def test_trace_find_flat_is_409(client):
    freqs = [100e6 + k * 1e6 for k in range(32)]
    resp = client.post("/trace/find", json={"freq_hz": freqs, "mag_db": [-4.0] * 32})
    assert resp.status_code == 409
    assert resp.json()["detail"]["kind"] == "no_dip"


def test_antenna_select(client):
    doc = client.post("/antenna/select", json={"bearing_deg": 185.0}).json()
    assert doc["pattern"] == "back"
    assert doc["gain_toward_dbi"] == pytest.approx(4.14, rel=1e-9)


def test_simulate_deterministic_and_seed_override(client, demo_doc):
    a = client.post("/simulate", json={"scenario": demo_doc, "epochs": 3}).json()
    b = client.post("/simulate", json={"scenario": demo_doc, "epochs": 3}).json()
    assert a["csv"] == b["csv"]
    assert a["summary"] == b["summary"]
    c = client.post("/simulate", json={"scenario": demo_doc, "epochs": 3, "seed": 99}).json()
    assert c["csv"] != a["csv"]


def test_simulate_bad_scenario_is_400(client):
    resp = client.post("/simulate", json={"scenario": {"seed": 1}, "epochs": 1})
    assert resp.status_code == 400
    assert resp.json()["detail"]["kind"] == "domain"
