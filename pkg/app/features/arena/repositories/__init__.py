"""Arena repositories"""
from .match_log import MatchLogRepository, RatingsRepository

__all__ = ["MatchLogRepository", "RatingsRepository"]
