"""Scenario engine and command-line interface."""

from .reports import REPORT_SCHEMA, Report, dump_json, report_to_json, signed_gap
from .runner import (exact_ring_curve_module, exact_ring_surface_module,
                     grid_for_ring, image_grid_for, image_ring_of,
                     run_scenario)
from .scenario import Scenario, ScenarioParams, parse_scenario_file, \
    parse_scenario_text
from .cli import run_cli
