"""Experiment orchestration, configuration, caching and the command line."""

from .config import ConfigError, ExperimentConfig, build_config
from .experiments import NumericalCheckError, run
from .table import ResultTable
