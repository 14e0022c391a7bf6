"""FIFO replay buffer of self-play examples"""
import numpy as np

from app.features.network.domain import TrainingBatch, TrainingExample


class ReplayBuffer:
    """Fixed-capacity ring buffer; the oldest examples are evicted first"""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._slots: list[TrainingExample] = []
        # slot of the oldest example once the buffer is full
        self._head = 0

    def __len__(self) -> int:
        return len(self._slots)

    def add(self, example: TrainingExample) -> None:
        if len(self._slots) < self.capacity:
            self._slots.append(example)
            return
        self._slots[self._head] = example
        self._head = (self._head + 1) % self.capacity

    def add_many(self, examples: list[TrainingExample]) -> None:
        for example in examples:
            self.add(example)

    def _ordered(self) -> list[TrainingExample]:
        """Examples from oldest to newest"""
        return self._slots[self._head:] + self._slots[: self._head]

    def tags(self) -> np.ndarray:
        return np.array([e.tag for e in self._ordered()], dtype=np.int64)

    def sample(self, batch_size: int, rng: np.random.Generator, dtype=np.float32) -> TrainingBatch:
        """Uniform sample without replacement (with replacement if the buffer is smaller)"""
        size = len(self._slots)
        replace = batch_size > size
        # draws are ages, 0 the oldest; a restored buffer draws the same batches
        ages = rng.choice(size, size=batch_size, replace=replace)
        slots = (ages + self._head) % size
        return TrainingBatch.from_examples([self._slots[i] for i in slots], dtype=dtype)

    # ============================================================================
    # SERIALIZATION
    # ============================================================================

    def to_arrays(self) -> dict[str, np.ndarray]:
        if not self._slots:
            return {}
        batch = TrainingBatch.from_examples(self._ordered())
        return {
            "buffer.observations": batch.observations.astype(np.uint8),
            "buffer.legal_masks": batch.legal_masks,
            "buffer.policies": batch.policies,
            "buffer.outcomes": batch.outcomes.astype(np.int8),
            "buffer.tags": batch.tags,
        }

    @classmethod
    def from_arrays(cls, capacity: int, arrays: dict[str, np.ndarray]) -> "ReplayBuffer":
        buffer = cls(capacity)
        if "buffer.tags" not in arrays:
            return buffer
        for obs, mask, policy, z, tag in zip(
            arrays["buffer.observations"],
            arrays["buffer.legal_masks"],
            arrays["buffer.policies"],
            arrays["buffer.outcomes"],
            arrays["buffer.tags"],
        ):
            buffer.add(
                TrainingExample(
                    observation=obs.astype(np.float32),
                    legal_mask=mask.astype(bool),
                    policy=policy.astype(np.float32),
                    z=float(z),
                    tag=int(tag),
                )
            )
        return buffer
