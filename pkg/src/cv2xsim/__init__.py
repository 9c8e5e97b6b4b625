"""Slot-level NR-V2X Mode 1 sidelink simulator.

Library layout: geometry (scene + LOS blockage), mobility (placement and
wrap-around motion), channel (street-canyon path loss + link budget),
traffic (message taxonomy + arrivals), scheduler (resource grids + grants),
engine (the slot loop), metrics (pdfs, exceedance, trends), scenario /
artifacts / cli (files in and out), drive (the interactive do-not-pass
scenario and its realtime bridge).
"""

__version__ = "0.1.0"

from .engine import Engine, LatencySample, RunSummary, run
from .scenario import Scenario, default_scenario, parse_scenario

__all__ = [
    "Engine",
    "LatencySample",
    "RunSummary",
    "Scenario",
    "default_scenario",
    "parse_scenario",
    "run",
    "__version__",
]
