"""Scenario configuration, assembly, execution and export."""

from .config import (ConfigError, ConfigIssue, ScenarioConfig, config_from_mapping, dump_config,
                     get_parameter, load_config, load_config_file, with_parameter)
from .export import ExportError, PlotSpec, emit_svg_plot, export_csv, export_telemetry_jsonl, read_csv
from .scenarios import (KINDS, SERIES_KEYS, OutputBundle, ScenarioError, ScenarioInstance,
                        build_scenario, run_scenario)

__all__ = [
    "ConfigError", "ConfigIssue", "ExportError", "KINDS", "OutputBundle", "PlotSpec", "SERIES_KEYS",
    "ScenarioConfig", "ScenarioError", "ScenarioInstance", "build_scenario",
    "config_from_mapping", "dump_config", "emit_svg_plot", "export_csv",
    "export_telemetry_jsonl", "get_parameter", "load_config", "load_config_file",
    "read_csv", "run_scenario", "with_parameter",
]
