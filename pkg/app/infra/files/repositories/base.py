"""Base repositories with common append/read operations over local files"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Generic, List, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

logger = logging.getLogger(__name__)

T = TypeVar('T', bound=BaseModel)


def versioned_path(path: str | Path) -> Path:
    """
    Return ``path`` if it does not exist yet, else the first free
    ``name.vN.ext`` sibling (outputs are never overwritten).
    """
    path = Path(path)
    if not path.exists():
        return path
    version = 2
    while True:
        candidate = path.with_name(f"{path.stem}.v{version}{path.suffix}")
        if not candidate.exists():
            return candidate
        version += 1


class BaseFileRepository(Generic[T]):
    """
    Base repository for append-only record files.
    Hides the file format from the rest of the application.
    """

    def __init__(self, path: str | Path, model_class: Type[T]):
        self._path = Path(path)
        self._model_class = model_class

    @property
    def path(self) -> Path:
        return self._path

    def _to_model(self, data: Dict[str, Any]) -> T:
        """Convert a raw record to a domain model"""
        return self._model_class.model_validate(data)

    def _to_models(self, data: List[Dict[str, Any]]) -> List[T]:
        models = []
        for item in data:
            try:
                models.append(self._to_model(item))
            except ValidationError as e:
                logger.warning(f"Skipping invalid record in {self._path}: {e}")
        return models

    def _read_raw(self) -> List[Dict[str, Any]]:
        raise NotImplementedError

    def _append_raw(self, rows: List[Dict[str, Any]]) -> None:
        raise NotImplementedError

    def exists(self) -> bool:
        return self._path.is_file()

    def find_all(self, limit: Optional[int] = None, offset: int = 0) -> List[T]:
        """Find all records with optional pagination"""
        models = self._to_models(self._read_raw())
        if offset:
            models = models[offset:]
        if limit:
            models = models[:limit]
        return models

    def find_by_filters(self, filters: Dict[str, Any], limit: Optional[int] = None) -> List[T]:
        """Find records whose fields equal every filter value"""
        matches = [
            model for model in self.find_all()
            if all(getattr(model, key) == value for key, value in filters.items())
        ]
        return matches[:limit] if limit else matches

    def create(self, data: T) -> T:
        """Append a single record"""
        self._append_raw([data.model_dump(mode='json')])
        return data

    def create_many(self, items: List[T]) -> List[T]:
        if items:
            self._append_raw([item.model_dump(mode='json') for item in items])
        return items


class JsonLinesRepository(BaseFileRepository[T]):
    """One JSON object per line; a torn trailing line is ignored"""

    def _read_raw(self) -> List[Dict[str, Any]]:
        if not self.exists():
            return []
        rows = []
        with self._path.open() as f:
            for number, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError:
                    logger.warning(f"Skipping unreadable line {number} in {self._path}")
        return rows

    def _append_raw(self, rows: List[Dict[str, Any]]) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        torn = False
        if self.exists() and self._path.stat().st_size > 0:
            with self._path.open("rb") as f:
                f.seek(-1, 2)
                torn = f.read(1) != b"\n"
        with self._path.open("a") as f:
            if torn:
                # keep the torn line on its own so it is skipped, not merged
                f.write("\n")
            for row in rows:
                f.write(json.dumps(row, sort_keys=True) + "\n")


class CsvRepository(BaseFileRepository[T]):
    """CSV with a header row taken from the model's field order"""

    @property
    def fieldnames(self) -> List[str]:
        return list(self._model_class.model_fields)

    def _read_raw(self) -> List[Dict[str, Any]]:
        if not self.exists():
            return []
        with self._path.open(newline="") as f:
            return [
                {key: (value if value != "" else None) for key, value in row.items()}
                for row in csv.DictReader(f)
            ]

    def _append_raw(self, rows: List[Dict[str, Any]]) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        new_file = not self.exists()
        with self._path.open("a", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=self.fieldnames)
            if new_file:
                writer.writeheader()
            for row in rows:
                writer.writerow({key: ("" if value is None else value) for key, value in row.items()})

    def write_all(self, items: List[T]) -> Path:
        """Write a fresh table, versioning the file name if it already exists"""
        self._path = versioned_path(self._path)
        self.create_many(items)
        if not items:
            self._append_raw([])
        return self._path
