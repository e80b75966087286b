"""LC equivalent circuit of an N-turn square spiral slot resonator.

Each turn is unrolled into a concentric square of strip line; the series
sum of the per-turn inductances forms the tank inductance, and the tank
capacitance is either calibrated from one observed resonance or scaled
across a family of geometries by slot perimeter over slot width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .microstrip import (
    Substrate,
    characteristic_impedance,
    effective_permittivity,
    segment_inductance,
)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SpiralSpec:
    """Square spiral slot geometry (SI lengths) on a given substrate."""

    turns: int
    turn_width: float
    turn_spacing: float
    outer_side: float
    substrate: Substrate

    def __post_init__(self) -> None:
        if not isinstance(self.turns, int) or self.turns < 1:
            raise DomainError(f"turn count must be an integer >= 1, got {self.turns!r}")
        for name, v in (("turn_width", self.turn_width),
                        ("turn_spacing", self.turn_spacing),
                        ("outer_side", self.outer_side)):
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
        pitch = self.turn_width + self.turn_spacing
        if self.turns * pitch > self.outer_side / 2.0 + self.turn_width:
            raise DomainError(
                f"{self.turns} turns of pitch {pitch} m do not fit in an "
                f"outer side of {self.outer_side} m"
            )

    @property
    def pitch(self) -> float:
        return self.turn_width + self.turn_spacing


@dataclass(frozen=True)
class LCTank:
    """Series LC tank: equivalent inductance (H) and capacitance (F)."""

    le: float
    ce: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.le) and self.le > 0.0):
            raise DomainError(f"inductance le must be finite and > 0, got {self.le!r}")
        if not (math.isfinite(self.ce) and self.ce > 0.0):
            raise DomainError(f"capacitance ce must be finite and > 0, got {self.ce!r}")


def unwound_turn_lengths(spec: SpiralSpec) -> list[float]:
    """Perimeter of each turn in meters, outermost first.

    Turn k is a concentric square of side outer_side - 2*k*(w + s), so the
    list is strictly decreasing and has exactly ``spec.turns`` entries.
    """
    sides = [spec.outer_side - 2.0 * k * spec.pitch for k in range(spec.turns)]
    if sides[-1] <= 0.0:
        raise DomainError("innermost turn has non-positive side; geometry does not fit")
    return [4.0 * side for side in sides]


def equivalent_inductance(spec: SpiralSpec) -> float:
    """Series inductance (H) of the spiral: one strip segment per turn."""
    eps_e = effective_permittivity(spec.substrate, spec.turn_width)
    z0 = characteristic_impedance(spec.substrate, spec.turn_width)
    return sum(segment_inductance(z0, eps_e, length) for length in unwound_turn_lengths(spec))


def calibrate_capacitance(le: float, f_obs: float) -> float:
    """Capacitance (F) placing a tank of inductance ``le`` at ``f_obs`` Hz."""
    if not (math.isfinite(le) and le > 0.0):
        raise DomainError(f"inductance must be finite and > 0, got {le!r}")
    if not (math.isfinite(f_obs) and f_obs > 0.0):
        raise DomainError(f"observed frequency must be finite and > 0, got {f_obs!r}")
    return 1.0 / ((_TWO_PI * f_obs) ** 2 * le)


def resonance_frequency(tank: LCTank) -> float:
    """Series resonance (Hz) of the tank: 1 / (2*pi*sqrt(L*C))."""
    return 1.0 / (_TWO_PI * math.sqrt(tank.le * tank.ce))


def predict_family(specs: list[SpiralSpec], anchor: tuple[SpiralSpec, float]) -> list[float]:
    """Resonances (Hz) for a family of spirals pinned to one observed anchor.

    The anchor's capacitance is solved from its observed frequency; every
    other member scales capacitance by total slot perimeter over slot
    width (longer, narrower slots are more capacitive).  The anchor spec
    reproduces its own frequency, and frequencies fall as turns are added.
    """
    if not specs:
        raise DomainError("family must contain at least one spiral spec")
    anchor_spec, f_anchor = anchor
    if anchor_spec not in specs:
        raise DomainError("anchor spec must appear in the family")
    if any(spec.substrate != anchor_spec.substrate for spec in specs):
        raise DomainError("all family members must share the anchor's substrate")

    le_anchor = equivalent_inductance(anchor_spec)
    ce_anchor = calibrate_capacitance(le_anchor, f_anchor)
    perimeter_anchor = sum(unwound_turn_lengths(anchor_spec))
    scale = ce_anchor * anchor_spec.turn_width / perimeter_anchor

    frequencies = []
    for spec in specs:
        le = equivalent_inductance(spec)
        ce = scale * sum(unwound_turn_lengths(spec)) / spec.turn_width
        frequencies.append(resonance_frequency(LCTank(le, ce)))
    return frequencies
