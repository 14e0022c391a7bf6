"""Experiment sweeps over widths and seeds"""
from .domain import RunStatus
from .schemas import ExperimentManifest, ManifestRun, SweepConfig
from .service import SweepService, run_sweep

__all__ = ["ExperimentManifest", "ManifestRun", "RunStatus", "SweepConfig", "SweepService", "run_sweep"]
