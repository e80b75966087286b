"""Soil-moisture resonator sensing and reconfigurable-antenna link modeling.

Core package: closed-form microstrip and spiral-slot resonator circuit
models, moisture calibration/inversion, synthetic reflection traces with
dip detection, a six-state reconfigurable antenna with link budget and
energy harvesting, and a deterministic farm-network simulator.  The
``soillink.service`` subpackage wraps everything in a FastAPI app; the
``soillink`` CLI is a thin client of that service.
"""

__version__ = "0.1.0"
