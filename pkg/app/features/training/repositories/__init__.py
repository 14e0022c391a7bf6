"""Training run repositories"""
from .learner_state import LearnerState, LearnerStateRepository
from .ledger import LedgerRepository, SelfPlayStatsRepository

__all__ = ["LearnerState", "LearnerStateRepository", "LedgerRepository", "SelfPlayStatsRepository"]
