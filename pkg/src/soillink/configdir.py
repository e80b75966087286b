"""Resolution of bundled default configuration files.

Named defaults (soil table, calibration curve, pattern table, demo
scenario, comparison rows) ship inside the package.  Setting the
``SOILLINK_CONFIG_DIR`` environment variable points lookups at a
directory whose files, when present, take precedence over the bundled
copies.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

ENV_CONFIG_DIR = "SOILLINK_CONFIG_DIR"

SOIL_TABLE_FILE = "soil_permittivity.json"
CURVE_FILE = "default_curve.json"
PATTERN_FILE = "pattern_states.json"
COMPARISON_FILE = "sensor_comparison.csv"
DEMO_SCENARIO_FILE = "demo_scenario.json"


def find_default(name: str) -> Path:
    """Return the path of a named config, honoring SOILLINK_CONFIG_DIR."""
    override = os.environ.get(ENV_CONFIG_DIR)
    if override:
        candidate = Path(override) / name
        if candidate.is_file():
            return candidate
    return Path(str(resources.files("soillink").joinpath("data").joinpath(name)))
