"""Experiment harness: configuration, GUE oracle, named experiments, persistence and CLI."""
from .config import COMMANDS, ExperimentConfig, build_config
from .experiments import ExperimentResult, run
from .io import write_result
