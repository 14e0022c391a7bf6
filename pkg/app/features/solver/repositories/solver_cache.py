"""Solver cache repository"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.features.solver.domain import QVector, SolvedPosition
from app.infra.files.repositories.base import BaseFileRepository

logger = logging.getLogger(__name__)


class SolverCacheRepository(BaseFileRepository[SolvedPosition]):
    """
    Content-addressed cache of solved Connect Four positions.

    Each line is ``codec,q0,...,q6`` (no header); -99 marks full columns.
    """

    def __init__(self, path: str | Path):
        super().__init__(path, SolvedPosition)
        self._index: Optional[Dict[str, QVector]] = None

    def _read_raw(self) -> List[Dict[str, Any]]:
        if not self.exists():
            return []
        rows = []
        with self._path.open() as f:
            for number, line in enumerate(f, start=1):
                parts = line.strip().split(",")
                if len(parts) != 8:
                    if line.strip():
                        logger.warning(f"Skipping malformed solver cache line {number} in {self._path}")
                    continue
                try:
                    rows.append({"codec": parts[0], "q": [int(value) for value in parts[1:]]})
                except ValueError:
                    logger.warning(f"Skipping malformed solver cache line {number} in {self._path}")
        return rows

    def _append_raw(self, rows: List[Dict[str, Any]]) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        with self._path.open("a") as f:
            for row in rows:
                f.write(",".join([row["codec"], *(str(value) for value in row["q"])]) + "\n")

    def _load_index(self) -> Dict[str, QVector]:
        if self._index is None:
            self._index = {
                record.codec: QVector.from_columns(record.q) for record in self.find_all()
            }
            logger.debug(f"Loaded {len(self._index)} solved positions from {self._path}")
        return self._index

    def find_by_codec(self, codec: str) -> Optional[QVector]:
        return self._load_index().get(codec)

    def save(self, codec: str, q: QVector) -> None:
        index = self._load_index()
        if codec in index:
            return
        index[codec] = q
        self.create(SolvedPosition(codec=codec, q=q.as_columns()))
