"""Ledger and self-play statistics repositories of a run directory"""
from pathlib import Path
from typing import Optional

from app.features.training.schemas import LedgerEntry, SelfPlayRecord
from app.infra.files.repositories.base import CsvRepository, JsonLinesRepository

LEDGER_FILE = "ledger.csv"
SELFPLAY_FILE = "selfplay.jsonl"


class LedgerRepository(CsvRepository[LedgerEntry]):
    """``step,S,T,F,D,C,states,games,evaluations``, one row per checkpoint"""

    def __init__(self, run_dir: str | Path):
        super().__init__(Path(run_dir) / LEDGER_FILE, LedgerEntry)

    def find_by_step(self, step: int) -> Optional[LedgerEntry]:
        rows = self.find_by_filters({"step": step}, limit=1)
        return rows[0] if rows else None

    def append(self, entry: LedgerEntry) -> LedgerEntry:
        """Append unless the step is already recorded (resumed runs)"""
        existing = self.find_by_step(entry.step)
        if existing is not None:
            return existing
        return self.create(entry)


class SelfPlayStatsRepository(JsonLinesRepository[SelfPlayRecord]):
    def __init__(self, run_dir: str | Path):
        super().__init__(Path(run_dir) / SELFPLAY_FILE, SelfPlayRecord)

    def append_new(self, records: list[SelfPlayRecord]) -> int:
        """Append records whose game index is not stored yet; returns how many were written"""
        known = {record.game_index for record in self.find_all()}
        fresh = [record for record in records if record.game_index not in known]
        self.create_many(fresh)
        return len(fresh)
