import logging
import os
from pathlib import Path
from typing import Type, TypeVar

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ValidationError

from app.errors import ConfigError

load_dotenv(dotenv_path=".env")

logger = logging.getLogger(__name__)

# Where training runs, tournaments and analysis bundles are written
RUNS_DIR = os.getenv("LAB_RUNS_DIR", "runs")

# Actor / match worker pool size
WORKERS = int(os.getenv("LAB_WORKERS", str(os.cpu_count() or 1)))

LOG_LEVEL = os.getenv("LAB_LOG_LEVEL", "INFO")

# Solver cache (empty string disables it)
SOLVER_CACHE_PATH = os.getenv("LAB_SOLVER_CACHE", "solver_cache.csv")

# Transposition table size as a power of two
SOLVER_TT_LOG2 = int(os.getenv("LAB_SOLVER_TT_LOG2", "24"))

ModelT = TypeVar("ModelT", bound=BaseModel)


def _key_lines(path: Path) -> dict[str, int]:
    """Map each key of a key-value file to the line it is defined on"""
    lines: dict[str, int] = {}
    for number, raw in enumerate(path.read_text().splitlines(), start=1):
        text = raw.strip()
        if not text or text.startswith("#") or "=" not in text:
            continue
        key = text.split("=", 1)[0].strip()
        if key.startswith("export "):
            key = key[len("export "):].strip()
        lines.setdefault(key, number)
    return lines


def load_key_value_config(path: str | Path, model_class: Type[ModelT]) -> ModelT:
    """
    Load a human-readable ``key = value`` file into a pydantic model.

    Raises:
        ConfigError: missing file, unknown key, or invalid value (with line and field)
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")

    values = dotenv_values(path)
    lines = _key_lines(path)

    known = set(model_class.model_fields)
    for key in values:
        if key not in known:
            raise ConfigError(
                f"{path}:{lines.get(key, '?')}: unknown key '{key}'",
                line=lines.get(key),
                field=key,
            )

    # Empty values mean "use the default"
    data = {key: value for key, value in values.items() if value not in (None, "")}
    try:
        return model_class.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = str(first["loc"][0]) if first["loc"] else None
        line = lines.get(field) if field else None
        logger.error(f"Invalid config {path}: {e}")
        raise ConfigError(
            f"{path}:{line if line is not None else '?'}: field '{field}': {first['msg']}",
            line=line,
            field=field,
        ) from e


def describe_keys(model_class: Type[BaseModel]) -> str:
    """Config keys of a model, one per line with default and description"""
    lines = ["config keys (key = default):"]
    for name, info in model_class.model_fields.items():
        default = "required" if info.is_required() else info.get_default(call_default_factory=True)
        default = getattr(default, "value", default)
        lines.append(f"  {name} = {default}".ljust(36) + (info.description or ""))
    return "\n".join(lines)
