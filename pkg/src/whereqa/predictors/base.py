"""Shared machinery for the sequence predictors.

Training sequences look like ``question + <SEP> + answer + <END>``. The
separator is a position marker, not content: models score continuations of
the marker-free view (so a first-order model conditions the first answer
symbol on the last question symbol, not on the separator), while the
separator's own next-symbol row is kept in count-based models as the
distribution of first answer symbols.

Generation is autoregressive after the separator: a beam of width k
proposes symbols until <END> or the length cap, ranking candidates by
model score with lexicographic tie-breaks. When a model cannot score any
continuation the prediction falls back to the most-frequent-answer table
and the result is flagged.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field

from ..core import GenericSequence, SequenceClass

SEP = "<SEP>"
END = "<END>"
MARKERS = (SEP, END)

DEFAULT_MAX_ANSWER_LEN = 5
MAX_TOPK = 5


class PredictorError(Exception):
    pass


def build_training_sequence(q_items, a_items) -> tuple[str, ...]:
    """question + <SEP> + answer + <END>, both sides nonempty."""
    q = tuple(q_items)
    a = tuple(a_items)
    if not q or not a:
        raise PredictorError("both question and answer sides must be nonempty")
    if any(sym in MARKERS for sym in q + a):
        raise PredictorError("marker symbols may not appear as content")
    return q + (SEP,) + a + (END,)


def split_training_sequence(seq: tuple[str, ...]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Recover (question, answer) from a training sequence."""
    if seq.count(SEP) != 1 or not seq or seq[-1] != END:
        raise PredictorError(f"malformed training sequence {seq!r}")
    cut = seq.index(SEP)
    q, a = seq[:cut], seq[cut + 1 : -1]
    if not q or not a:
        raise PredictorError(f"training sequence with empty side: {seq!r}")
    return q, a


def content_view(seq: tuple[str, ...]) -> tuple[str, ...]:
    """The sequence with separators removed (<END> is kept: it is content
    in the sense that models must learn to emit it)."""
    return tuple(sym for sym in seq if sym != SEP)


@dataclass(frozen=True)
class PredictionSet:
    """Up to k distinct candidate sequences, best first."""

    seq_class: SequenceClass
    candidates: tuple[tuple[str, ...], ...]
    fallback: bool = False

    def __post_init__(self) -> None:
        if len(set(self.candidates)) != len(self.candidates):
            raise PredictorError("duplicate candidates in a prediction set")

    def sequences(self) -> tuple[GenericSequence, ...]:
        return tuple(
            GenericSequence(seq_class=self.seq_class, items=c) for c in self.candidates
        )


class SequenceModel:
    """Base for the prediction methods and the two baselines.

    State is immutable after ``fit``; trained models may be queried from
    many threads. Subclasses implement ``_fit`` and either
    ``next_scores`` (count-based autoregressive scoring over the
    marker-free context) or ``predict_answers`` (whole-sequence methods).
    """

    method = "?"

    def __init__(self, schema, params: dict | None = None, seed: int = 0):
        self.schema = tuple(schema)
        if SEP not in self.schema or END not in self.schema:
            raise PredictorError("schema must include the <SEP> and <END> markers")
        self.params = dict(params or {})
        self.seed = int(seed)
        self.max_answer_len = int(self.params.get("max_answer_len", DEFAULT_MAX_ANSWER_LEN))
        self._answer_counts: Counter[tuple[str, ...]] = Counter()
        self._fitted = False

    # -- training ---------------------------------------------------------

    def fit(self, sequences) -> "SequenceModel":
        seqs = [tuple(s) for s in sequences]
        if not seqs:
            raise PredictorError("empty training set")
        vocab = set(self.schema)
        for seq in seqs:
            for sym in seq:
                if sym not in vocab:
                    raise PredictorError(f"training symbol {sym!r} not in schema")
            _, answer = split_training_sequence(seq)
            self._answer_counts[answer] += 1
        self._fit(seqs)
        self._fitted = True
        return self

    def _fit(self, sequences: list[tuple[str, ...]]) -> None:
        raise NotImplementedError

    # -- prediction -------------------------------------------------------

    def next_scores(self, context: tuple[str, ...]) -> dict[str, float]:
        """Raw scores of each possible next symbol given a marker-free
        context. An empty dict means the model cannot score here."""
        raise NotImplementedError

    def predict_answers(self, question: tuple[str, ...], k: int) -> PredictionSet | None:
        """Hook for whole-sequence methods (baselines). None defers to the
        beam generator."""
        return None

    def frequent_answers(self, k: int) -> list[tuple[str, ...]]:
        ranked = sorted(self._answer_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return [answer for answer, _ in ranked[:k]]

    # -- persistence ------------------------------------------------------

    def state_dict(self) -> dict:
        state = self._state_dict()
        state["answer_counts"] = [
            [list(ans), cnt] for ans, cnt in sorted(self._answer_counts.items())
        ]
        return state

    def load_state(self, state: dict) -> "SequenceModel":
        self._answer_counts = Counter(
            {tuple(ans): int(cnt) for ans, cnt in state.get("answer_counts", [])}
        )
        self._load_state(state)
        self._fitted = True
        return self

    def _state_dict(self) -> dict:
        raise NotImplementedError

    def _load_state(self, state: dict) -> None:
        raise NotImplementedError


@dataclass(order=True)
class _Beam:
    neg_logprob: float
    answer: tuple[str, ...] = field(compare=True)


def generate_topk(
    model: SequenceModel,
    question: tuple[str, ...],
    k: int,
    seq_class: SequenceClass,
) -> PredictionSet:
    """Beam search of width k over the model's next-symbol scores."""
    if not 1 <= k <= MAX_TOPK:
        raise PredictorError(f"k must be in 1..{MAX_TOPK}, got {k}")
    vocab = set(model.schema)
    for sym in question:
        if sym not in vocab:
            raise PredictorError(f"question symbol {sym!r} not in schema")

    direct = model.predict_answers(tuple(question), k)
    if direct is not None:
        return direct

    alive: list[_Beam] = [_Beam(0.0, ())]
    finished: list[_Beam] = []
    forced: list[_Beam] = []
    for step in range(model.max_answer_len + 1):
        if not alive:
            break
        expansions: list[_Beam] = []
        for beam in alive:
            if len(beam.answer) >= model.max_answer_len:
                forced.append(beam)
                continue
            context = tuple(question) + beam.answer
            scores = dict(model.next_scores(context))
            scores.pop(SEP, None)
            if not beam.answer:
                scores.pop(END, None)  # answers are nonempty by invariant
            scores = {s: v for s, v in scores.items() if v > 0}
            if not scores:
                if beam.answer:
                    forced.append(beam)
                continue
            total = sum(scores.values())
            for sym, val in scores.items():
                lp = beam.neg_logprob - math.log(val / total)
                if sym == END:
                    finished.append(_Beam(lp, beam.answer))
                else:
                    expansions.append(_Beam(lp, beam.answer + (sym,)))
        expansions.sort()
        alive = expansions[:k]

    # properly terminated candidates outrank force-cut ones
    pool = sorted(finished) + sorted(forced)
    seen: set[tuple[str, ...]] = set()
    candidates: list[tuple[str, ...]] = []
    for beam in pool:
        if beam.answer and beam.answer not in seen:
            seen.add(beam.answer)
            candidates.append(beam.answer)
        if len(candidates) == k:
            break

    if not candidates:
        return PredictionSet(
            seq_class=seq_class,
            candidates=tuple(model.frequent_answers(k)),
            fallback=True,
        )
    return PredictionSet(seq_class=seq_class, candidates=tuple(candidates))


def derive_rng(seed: int, *parts) -> random.Random:
    """A reproducible per-call RNG, independent of call order."""
    key = f"{seed}||" + "||".join(str(p) for p in parts)
    return random.Random(key)
