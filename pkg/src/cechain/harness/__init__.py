"""Scenario engine and command-line interface."""

from .ce import CeReport, FrameLog, ce_run, connection_time, measure_crypto
from .cli import main
from .config import Adversary, ConfigError, CostConstants, ScenarioConfig, load_config, parse_config
