"""Sweeps, verification suites and the command-line interface."""

from .config import ConfigError, SweepConfig, load_config, parse_config
from .emit import emit_csv, emit_svg
from .sweep import SweepRow, run_sweep

__all__ = ["ConfigError", "SweepConfig", "SweepRow", "emit_csv", "emit_svg", "load_config", "parse_config", "run_sweep"]
