"""Parser, experiment configs and the command-line surface."""

from .config import COMMANDS, ConfigError, ExperimentConfig
from .main import build_parser, load_family, main, run
from .parser import parse_lefun

__all__ = ["parse_lefun", "ExperimentConfig", "ConfigError", "COMMANDS", "run", "main", "build_parser", "load_family"]
