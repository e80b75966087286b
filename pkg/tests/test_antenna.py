"""Varactor law, pattern classification, beam gains, link budget, harvesting."""

import json
import math

import pytest

from soillink.antenna import (
    CV_POINTS,
    BeamModel,
    BiasState,
    PatternState,
    capacitance_from_bias,
    default_beams,
    default_varactor,
    effective_aperture,
    fit_varactor,
    friis_received_power,
    gain_toward,
    harvest_energy,
    load_beams,
    pattern_from_bias,
    select_pattern,
    write_gain_sweep_csv,
)
from soillink.errors import DomainError, NoDefinedPatternError

TABLE_BIAS_TO_PATTERN = [
    ((0.0, 0.0), "front"),
    ((0.0, 3.0), "upper_left"),
    ((0.0, 15.0), "left"),
    ((3.0, 0.0), "upper_right"),
    ((15.0, 0.0), "right"),
    ((15.0, 15.0), "back"),
]

MEASURED_STATES = {
    "front": (5.63, 6.0),
    "back": (4.14, 185.0),
    "left": (2.54, 10.0),
    "upper_left": (5.08, 25.0),
    "right": (2.62, 340.0),
    "upper_right": (4.923, 354.0),
}


def test_fit_passes_through_bench_points():
    model = default_varactor()
    for v, c in CV_POINTS:
        assert capacitance_from_bias(model, v) == pytest.approx(c, rel=0.05)


def test_capacitance_strictly_decreasing():
    model = default_varactor()
    values = [capacitance_from_bias(model, v / 10.0) for v in range(0, 151)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_capacitance_bias_range():
    model = default_varactor()
    with pytest.raises(DomainError):
        capacitance_from_bias(model, -0.1)
    with pytest.raises(DomainError):
        capacitance_from_bias(model, 15.1)


def test_fit_rejects_inconsistent_points():
    from soillink.errors import CalibrationError

    with pytest.raises(CalibrationError):
        fit_varactor(((0.0, 2.35), (3.0, 2.35), (15.0, 0.01)))
    with pytest.raises(DomainError):
        fit_varactor(((0.0, 2.35), (15.0, 0.466)))


@pytest.mark.parametrize("bias,expected", TABLE_BIAS_TO_PATTERN)
def test_bias_rows_map_to_named_patterns(bias, expected):
    assert pattern_from_bias(BiasState(*bias)).name == expected


def test_bias_swap_symmetry():
    mirror = {"front": "front", "back": "back", "left": "right", "right": "left",
              "upper_left": "upper_right", "upper_right": "upper_left"}
    for (v12, v34), name in TABLE_BIAS_TO_PATTERN:
        swapped = pattern_from_bias(BiasState(v34, v12)).name
        assert swapped == mirror[name]


def test_band_gap_has_no_pattern():
    # C(7 V) ~ 0.67 pF falls between the low and mid bands
    with pytest.raises(NoDefinedPatternError):
        pattern_from_bias(BiasState(0.0, 7.0))


def test_bias_state_range():
    with pytest.raises(DomainError):
        BiasState(-1.0, 0.0)
    with pytest.raises(DomainError):
        BiasState(0.0, 16.0)


def test_default_beams_match_measured_table():
    beams = default_beams()
    assert [b.state.name for b in beams] == list(MEASURED_STATES)
    for beam in beams:
        gain, lobe = MEASURED_STATES[beam.state.name]
        assert beam.state.gain_dbi == gain
        assert beam.state.lobe_deg == lobe
        assert beam.hpbw_deg == 90.0
        assert beam.backlobe_db == 15.0


def test_gain_peak_halfpower_and_floor():
    for beam in default_beams():
        gmax = beam.state.gain_dbi
        lobe = beam.state.lobe_deg
        assert gain_toward(beam, lobe) == gmax
        assert gain_toward(beam, lobe + 45.0) == pytest.approx(gmax - 3.0, rel=1e-12)
        assert gain_toward(beam, lobe - 45.0) == pytest.approx(gmax - 3.0, rel=1e-12)
        assert gain_toward(beam, lobe + 180.0) == pytest.approx(gmax - 15.0, rel=1e-12)


def test_gain_bounded_and_wrapped():
    beam = default_beams()[0]
    for theta in range(0, 720, 7):
        g = gain_toward(beam, float(theta))
        assert beam.state.gain_dbi - beam.backlobe_db <= g <= beam.state.gain_dbi
    assert gain_toward(beam, 366.0) == gain_toward(beam, 6.0)
    assert gain_toward(beam, -354.0) == gain_toward(beam, 6.0)


def test_selection_returns_each_state_at_its_own_lobe():
    beams = default_beams()
    for beam in beams:
        assert select_pattern(beams, beam.state.lobe_deg).name == beam.state.name


def test_selection_at_back_bearing():
    assert select_pattern(default_beams(), 185.0).name == "back"


def test_selection_invariant_under_common_gain_shift():
    beams = default_beams()
    shifted = tuple(
        BeamModel(PatternState(b.state.name, b.state.gain_dbi + 7.0, b.state.lobe_deg),
                  b.hpbw_deg, b.backlobe_db)
        for b in beams
    )
    for bearing in range(0, 360, 5):
        assert select_pattern(beams, float(bearing)).name == \
            select_pattern(shifted, float(bearing)).name


def test_selection_tie_breaks_by_declaration_order():
    a = BeamModel(PatternState("a", 3.0, 0.0))
    b = BeamModel(PatternState("b", 9.0, 90.0))
    assert select_pattern([a, b], 45.0).name == "a"
    assert select_pattern([b, a], 45.0).name == "b"
    with pytest.raises(DomainError):
        select_pattern([], 0.0)


def test_friis_reference_point():
    assert friis_received_power(20.0, 5.63, 12.0, 1000.0, 2.45e9) == pytest.approx(
        -62.601104909174026, abs=1e-9)


def test_friis_distance_doubling_and_monotonicity():
    p1 = friis_received_power(20.0, 5.63, 12.0, 500.0, 2.45e9)
    p2 = friis_received_power(20.0, 5.63, 12.0, 1000.0, 2.45e9)
    assert p2 - p1 == pytest.approx(-20.0 * math.log10(2.0), abs=1e-9)
    assert friis_received_power(20.0, 5.63, 12.0, 1000.0, 5e9) < p2


def test_friis_rejects_near_field():
    with pytest.raises(DomainError):
        friis_received_power(20.0, 5.63, 12.0, 0.5, 2.45e9)


def test_effective_aperture_front():
    front = default_beams()[0].state
    assert effective_aperture(front, 2.45e9) == pytest.approx(0.004356115367495677,
                                                              rel=1e-12)


def test_harvest_energy():
    front = default_beams()[0].state
    assert harvest_energy(0.0, front, 2.45e9, 900.0, 0.5) == 0.0
    e1 = harvest_energy(1e-3, front, 2.45e9, 900.0, 0.5)
    e2 = harvest_energy(1e-3, front, 2.45e9, 1800.0, 0.5)
    assert e2 == pytest.approx(2.0 * e1, rel=1e-12)
    assert e1 == pytest.approx(1e-3 * 0.004356115367495677 * 0.5 * 900.0, rel=1e-12)
    with pytest.raises(DomainError):
        harvest_energy(1e-3, front, 2.45e9, 900.0, 1.5)
    with pytest.raises(DomainError):
        harvest_energy(-1e-3, front, 2.45e9, 900.0, 0.5)


def test_load_beams_from_custom_json(tmp_path):
    doc = {
        "beam_defaults": {"hpbw_deg": 60.0, "backlobe_db": 20.0},
        "states": [
            {"name": "north", "gain_dbi": 4.0, "lobe_deg": 0.0},
            {"name": "south", "gain_dbi": 4.0, "lobe_deg": 180.0, "hpbw_deg": 30.0},
        ],
    }
    path = tmp_path / "beams.json"
    path.write_text(json.dumps(doc))
    beams = load_beams(path)
    assert beams[0].hpbw_deg == 60.0 and beams[0].backlobe_db == 20.0
    assert beams[1].hpbw_deg == 30.0
    assert select_pattern(beams, 180.0).name == "south"


def test_gain_sweep_csv(tmp_path):
    beam = default_beams()[0]
    path = tmp_path / "sweep.csv"
    write_gain_sweep_csv(beam, path, step_deg=1.0)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta_deg,gain_dbi"
    assert len(lines) == 361
    theta, gain = lines[7].split(",")
    assert float(theta) == 6.0
    assert float(gain) == pytest.approx(beam.state.gain_dbi, rel=1e-12)
