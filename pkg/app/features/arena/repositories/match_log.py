"""Match log and ratings repositories"""
from pathlib import Path

from app.features.arena.schemas import MatchRecord, RatingEntry
from app.infra.files.repositories.base import CsvRepository, JsonLinesRepository


class MatchLogRepository(JsonLinesRepository[MatchRecord]):
    """Append-only JSON lines match log; a partially written log resumes cleanly"""

    def __init__(self, path: str | Path):
        super().__init__(path, MatchRecord)

    def existing_keys(self) -> set[tuple]:
        return {record.key for record in self.find_all()}


class RatingsRepository(CsvRepository[RatingEntry]):
    """``agent_id,elo,games,uncertainty``"""

    def __init__(self, path: str | Path):
        super().__init__(path, RatingEntry)
