"""The two baselines: uniform random generation and most-frequent answers.

The random baseline knows only the symbol schema: answer length is uniform
over 1..max_answer_len and symbols are uniform over the schema (markers
excluded). The frequent baseline knows the training distribution of whole
answer sequences but ignores the question.
"""

from __future__ import annotations

from ..core import SequenceClass
from .base import MARKERS, PredictionSet, SequenceModel, derive_rng


class RandomBaseline(SequenceModel):
    method = "RANDOM"

    def _fit(self, sequences) -> None:
        # no distributional knowledge is kept beyond the schema
        self._symbols = sorted(s for s in self.schema if s not in MARKERS)

    def predict_answers(self, question, k):
        rng = derive_rng(self.seed, ",".join(question), k)
        seen: set[tuple[str, ...]] = set()
        candidates: list[tuple[str, ...]] = []
        attempts = 0
        while len(candidates) < k and attempts < 50 * k:
            attempts += 1
            length = rng.randint(1, self.max_answer_len)
            answer = tuple(rng.choice(self._symbols) for _ in range(length))
            if answer not in seen:
                seen.add(answer)
                candidates.append(answer)
        return PredictionSet(
            seq_class=SequenceClass.TYPE,  # reassigned by the caller
            candidates=tuple(candidates),
        )

    def _state_dict(self) -> dict:
        return {}

    def _load_state(self, state) -> None:
        self._symbols = sorted(s for s in self.schema if s not in MARKERS)


class FrequentBaseline(SequenceModel):
    method = "FREQUENT"

    def _fit(self, sequences) -> None:
        pass  # the shared answer-frequency table is the whole model

    def predict_answers(self, question, k):
        return PredictionSet(
            seq_class=SequenceClass.TYPE,
            candidates=tuple(self.frequent_answers(k)),
        )

    def _state_dict(self) -> dict:
        return {}

    def _load_state(self, state) -> None:
        pass


def baseline_frequent(training_sequences, k: int) -> list[tuple[str, ...]]:
    """The k most frequent full answer sequences, ties lexicographic."""
    from .base import split_training_sequence
    from collections import Counter

    counts: Counter[tuple[str, ...]] = Counter()
    for seq in training_sequences:
        _, answer = split_training_sequence(tuple(seq))
        counts[answer] += 1
    if not counts:
        raise ValueError("empty training set")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [answer for answer, _ in ranked[:k]]
