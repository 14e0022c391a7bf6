"""Manifest persistence: one JSON document per experiment directory"""
import json
import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from app.errors import ConfigError
from app.features.experiments.schemas import ExperimentManifest

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


class ManifestRepository:
    def __init__(self, experiment_dir: str | Path):
        self._path = Path(experiment_dir) / MANIFEST_FILE

    @property
    def path(self) -> Path:
        return self._path

    def find(self) -> Optional[ExperimentManifest]:
        """
        Raises:
            ConfigError: the manifest exists but cannot be parsed
        """
        if not self._path.is_file():
            return None
        try:
            return ExperimentManifest.model_validate(json.loads(self._path.read_text()))
        except (json.JSONDecodeError, ValidationError) as e:
            logger.error(f"Unreadable manifest {self._path}: {e}")
            raise ConfigError(f"Unreadable manifest {self._path}") from e

    def save(self, manifest: ExperimentManifest) -> Path:
        """Replace the manifest atomically"""
        self._path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self._path.with_suffix(".json.tmp")
        tmp.write_text(manifest.model_dump_json(indent=2))
        os.replace(tmp, self._path)
        return self._path
