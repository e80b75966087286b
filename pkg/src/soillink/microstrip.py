"""Closed-form quasi-static microstrip line analysis.

Hammerstad-style expressions for effective permittivity and
characteristic impedance, plus the lumped inductance of a line segment.
All inputs and outputs are SI: meters, henries, ohms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

C0 = 299_792_458.0  # speed of light in vacuum, m/s (exact)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


def _require_positive(value: float, name: str) -> None:
    _require(math.isfinite(value) and value > 0.0, f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class Substrate:
    """Dielectric slab: relative permittivity, loss tangent, thickness (m)."""

    eps_r: float
    tan_delta: float
    h: float

    def __post_init__(self) -> None:
        _require(math.isfinite(self.eps_r) and self.eps_r >= 1.0,
                 f"eps_r must be finite and >= 1, got {self.eps_r!r}")
        _require(math.isfinite(self.tan_delta) and self.tan_delta >= 0.0,
                 f"tan_delta must be finite and >= 0, got {self.tan_delta!r}")
        _require_positive(self.h, "substrate thickness h")


@dataclass(frozen=True)
class TraceGeometry:
    """Conductor strip: width and length, both in meters."""

    w_t: float
    l: float

    def __post_init__(self) -> None:
        _require_positive(self.w_t, "conductor width w_t")
        _require_positive(self.l, "conductor length l")


def effective_permittivity(sub: Substrate, w_t: float) -> float:
    """Effective permittivity seen by the quasi-TEM microstrip mode.

    Narrow strips (w_t < h) carry the extra 0.04*(1 - w/h)^2 term; the
    wide branch applies from w_t = h upward.  The result is bounded by
    1 <= eps_e <= eps_r and is non-decreasing in w_t.
    """
    _require_positive(w_t, "conductor width w_t")
    u = w_t / sub.h
    filling = 1.0 / math.sqrt(1.0 + 12.0 / u)
    if u < 1.0:
        filling += 0.04 * (1.0 - u) ** 2
    return (sub.eps_r + 1.0) / 2.0 + (sub.eps_r - 1.0) / 2.0 * filling


def characteristic_impedance(sub: Substrate, w_t: float) -> float:
    """Characteristic impedance (ohms) of a strip of width w_t on ``sub``.

    Natural-log forms on both branches; the switch sits at w_t = h with
    the wide branch taking the tie (the two branches agree there to well
    under 1%).  Strictly decreasing in w_t.
    """
    _require_positive(w_t, "conductor width w_t")
    u = w_t / sub.h
    eps_e = effective_permittivity(sub, w_t)
    if u < 1.0:
        return 60.0 / math.sqrt(eps_e) * math.log(8.0 / u + 0.25 * u)
    return 120.0 * math.pi / (math.sqrt(eps_e) * (u + 1.393 + (2.0 / 3.0) * math.log(u + 1.444)))


def segment_inductance(z0: float, eps_e: float, l: float) -> float:
    """Lumped inductance (H) of a line segment: z0 * sqrt(eps_e) * l / c."""
    _require_positive(z0, "characteristic impedance z0")
    _require_positive(eps_e, "effective permittivity eps_e")
    _require_positive(l, "segment length l")
    return z0 * math.sqrt(eps_e) * l / C0
