"""Context-count predictors: first-order Markov, all-k-order Markov, and a
bounded-depth transition trie.

All three share one structure: a table from contexts (the last j symbols of
the marker-free sequence) to next-symbol counts. They differ in which
context orders they store and how far they back off at prediction time.
The separator's own row is kept as the distribution of first answer
symbols.
"""

from __future__ import annotations

from collections import Counter

from .base import SEP, SequenceModel, content_view, split_training_sequence


class ContextTrieModel(SequenceModel):
    """Next-symbol counts for every context of order min_order..max_order.

    Prediction uses the deepest context with counts and backs off to
    shallower ones; an empty result defers to the caller's fallback.
    """

    min_order = 1
    max_order = 1

    def _fit(self, sequences) -> None:
        table: dict[tuple[str, ...], Counter] = {}
        for seq in sequences:
            content = content_view(seq)
            for t, sym in enumerate(content):
                top = min(self.max_order, t)
                for order in range(self.min_order, top + 1):
                    ctx = content[t - order : t]
                    table.setdefault(ctx, Counter())[sym] += 1
            _, answer = split_training_sequence(seq)
            table.setdefault((SEP,), Counter())[answer[0]] += 1
        self._table = table

    def next_scores(self, context):
        top = min(self.max_order, len(context))
        for order in range(top, self.min_order - 1, -1):
            counts = self._table.get(tuple(context[len(context) - order :]))
            if counts:
                return {sym: float(c) for sym, c in counts.items()}
        return {}

    def transition_counts(self, context) -> dict[str, int]:
        """Direct table access (e.g. the separator row)."""
        return dict(self._table.get(tuple(context), {}))

    def _state_dict(self) -> dict:
        return {
            "table": [
                [list(ctx), dict(sorted(counts.items()))]
                for ctx, counts in sorted(self._table.items())
            ]
        }

    def _load_state(self, state) -> None:
        self._table = {
            tuple(ctx): Counter({s: int(c) for s, c in counts.items()})
            for ctx, counts in state["table"]
        }


class Mark1Model(ContextTrieModel):
    """First-order transition counts; greedy argmax continuation, with k>1
    explored through the beam's first-step branches."""

    method = "MARK1"
    min_order = 1
    max_order = 1


class AkomModel(ContextTrieModel):
    """All-k-order Markov chains: orders 1..K with longest-matching-context
    backoff."""

    method = "AKOM"
    min_order = 1

    def __init__(self, schema, params=None, seed=0):
        super().__init__(schema, params, seed)
        self.max_order = int(self.params.get("akom_order", 5))
        if self.max_order < 1:
            raise ValueError("akom_order must be >= 1")


class TdagModel(ContextTrieModel):
    """Bounded-depth context tree with next-symbol counts at every node;
    the deepest matching context wins, falling back through shallower ones
    down to the root (order 0)."""

    method = "TDAG"
    min_order = 0

    def __init__(self, schema, params=None, seed=0):
        super().__init__(schema, params, seed)
        self.max_order = int(self.params.get("tdag_depth", 6))
        if self.max_order < 1:
            raise ValueError("tdag_depth must be >= 1")
