"""Dictionary- and graph-based predictors: LZ78 and the dependency graph.

LZ78 grows a phrase dictionary by incremental parsing and scores
continuations by the symbols observed after the longest dictionary phrase
matching the current suffix. The dependency graph counts ordered symbol
co-occurrence within a bounded lookahead window and continues from the
last emitted symbol's strongest pair.
"""

from __future__ import annotations

from collections import Counter

from .base import SequenceModel, content_view


class Lz78Model(SequenceModel):
    method = "LZ78"

    def _fit(self, sequences) -> None:
        phrases: set[tuple[str, ...]] = {()}
        followers: dict[tuple[str, ...], Counter] = {}
        max_len = 0
        for seq in sequences:
            content = content_view(seq)
            pos = 0
            while pos < len(content):
                # longest known phrase starting at pos
                length = 0
                while (
                    pos + length < len(content)
                    and content[pos : pos + length + 1] in phrases
                ):
                    length += 1
                phrase = content[pos : pos + length]
                if pos + length >= len(content):
                    break
                nxt = content[pos + length]
                phrases.add(phrase + (nxt,))
                max_len = max(max_len, length + 1)
                followers.setdefault(phrase, Counter())[nxt] += 1
                pos += length + 1
        self._phrases = phrases
        self._followers = followers
        self._max_len = max_len

    def next_scores(self, context):
        context = tuple(context)
        top = min(len(context), self._max_len)
        for length in range(top, -1, -1):
            phrase = context[len(context) - length :]
            counts = self._followers.get(phrase)
            if counts:
                return {sym: float(c) for sym, c in counts.items()}
        return {}

    def _state_dict(self) -> dict:
        return {
            "phrases": sorted(list(p) for p in self._phrases),
            "followers": [
                [list(p), dict(sorted(c.items()))]
                for p, c in sorted(self._followers.items())
            ],
        }

    def _load_state(self, state) -> None:
        self._phrases = {tuple(p) for p in state["phrases"]}
        self._followers = {
            tuple(p): Counter({s: int(n) for s, n in c.items()})
            for p, c in state["followers"]
        }
        self._max_len = max((len(p) for p in self._phrases), default=0)


class DependencyGraphModel(SequenceModel):
    """Ordered co-occurrence counts of symbol pairs within a lookahead
    window; the next symbol is the strongest pair from the last one."""

    method = "DG"

    def __init__(self, schema, params=None, seed=0):
        super().__init__(schema, params, seed)
        self.window = int(self.params.get("dg_window", 4))
        if self.window < 1:
            raise ValueError("dg_window must be >= 1")

    def _fit(self, sequences) -> None:
        pairs: dict[str, Counter] = {}
        for seq in sequences:
            content = content_view(seq)
            for i, sym in enumerate(content):
                for j in range(i + 1, min(i + self.window, len(content) - 1) + 1):
                    pairs.setdefault(sym, Counter())[content[j]] += 1
        self._pairs = pairs

    def next_scores(self, context):
        if not context:
            return {}
        counts = self._pairs.get(context[-1])
        if not counts:
            return {}
        return {sym: float(c) for sym, c in counts.items()}

    def _state_dict(self) -> dict:
        return {
            "pairs": [
                [sym, dict(sorted(c.items()))] for sym, c in sorted(self._pairs.items())
            ]
        }

    def _load_state(self, state) -> None:
        self._pairs = {
            sym: Counter({s: int(n) for s, n in c.items()}) for sym, c in state["pairs"]
        }
