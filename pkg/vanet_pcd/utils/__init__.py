"""
Utilities package for the content distribution simulator
Contains configuration, logging, random streams and other utility modules
"""

from .config import ScenarioConfig, emit_config, load_config, parse_config, parse_sweep
from .logger import setup_logging, get_logger, PerformanceTimer
from .random_streams import RandomStreams
from .exceptions import (
    PcdError, ConfigError, FleetConstructionError, ChannelDomainError,
    CoalitionContractError, NonConvergenceError,
)
from .constants import APP_NAME, APP_VERSION, SCENARIO_DEFAULTS, ERROR_MESSAGES

__all__ = [
    "ScenarioConfig",
    "emit_config",
    "load_config",
    "parse_config",
    "parse_sweep",
    "setup_logging",
    "get_logger",
    "PerformanceTimer",
    "RandomStreams",
    "PcdError",
    "ConfigError",
    "FleetConstructionError",
    "ChannelDomainError",
    "CoalitionContractError",
    "NonConvergenceError",
    "APP_NAME",
    "APP_VERSION",
    "SCENARIO_DEFAULTS",
    "ERROR_MESSAGES",
]
