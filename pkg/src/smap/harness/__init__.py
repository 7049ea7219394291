"""Experiment orchestration: configuration, data factory, file formats, CLI."""

from .config import ExperimentConfig, load_config, parse_config
from .data import build_lemma_ensemble, seeded_data, sphere_seeded_data
from .runner import run
from .snapshots import read_snapshot, write_snapshot

__all__ = [
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "seeded_data",
    "sphere_seeded_data",
    "build_lemma_ensemble",
    "run",
    "read_snapshot",
    "write_snapshot",
]
