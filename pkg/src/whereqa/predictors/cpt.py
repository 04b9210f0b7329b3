"""Compact prediction tree predictors (CPT and CPT+).

Training sequences are stored losslessly in a prediction tree, with an
inverted index from symbol to the sequences containing it and a lookup
table from sequence id to its leaf (the sequence is recovered by walking
to the root). Prediction retrieves the training sequences containing the
last few context symbols as an in-order subsequence and tallies the
symbols that follow the match.

CPT+ adds frequent-subsequence compression in the tree (frequent
contiguous runs are collapsed into compound nodes) and suffix-length
reduction at prediction time (retry with a shorter suffix on empty
retrieval, down to a single symbol).
"""

from __future__ import annotations

from collections import Counter

from .base import SequenceModel, content_view

Token = object  # tree keys: a symbol (str) or a compound run (tuple of str)


class _TreeNode:
    __slots__ = ("token", "parent", "children")

    def __init__(self, token=None, parent=None):
        self.token = token
        self.parent = parent
        self.children: dict = {}

    def child(self, token) -> "_TreeNode":
        node = self.children.get(token)
        if node is None:
            node = _TreeNode(token, self)
            self.children[token] = node
        return node


class CptModel(SequenceModel):
    method = "CPT"
    compress = False

    def __init__(self, schema, params=None, seed=0):
        super().__init__(schema, params, seed)
        self.suffix_len = int(self.params.get("cpt_suffix_len", 3))
        if self.suffix_len < 1:
            raise ValueError("cpt_suffix_len must be >= 1")
        self.compress_max = int(self.params.get("cpt_compress_max", 4))
        self.compress_min_count = int(self.params.get("cpt_compress_min_count", 2))

    def _fit(self, sequences) -> None:
        self._build([content_view(seq) for seq in sequences])

    def _build(self, contents: list[tuple[str, ...]]) -> None:
        self._sequences = contents
        runs = self._frequent_runs(contents) if self.compress else set()
        self._root = _TreeNode()
        self._leaf_of: dict[int, _TreeNode] = {}
        self._index: dict[str, set[int]] = {}
        self._recovered: dict[int, tuple[str, ...]] = {}
        for sid, content in enumerate(contents):
            node = self._root
            for token in self._compress_tokens(content, runs):
                node = node.child(token)
            self._leaf_of[sid] = node
            for sym in set(content):
                self._index.setdefault(sym, set()).add(sid)

    def _frequent_runs(self, contents) -> set[tuple[str, ...]]:
        counts: Counter[tuple[str, ...]] = Counter()
        for content in contents:
            for n in range(2, self.compress_max + 1):
                for i in range(len(content) - n + 1):
                    counts[content[i : i + n]] += 1
        return {run for run, c in counts.items() if c >= self.compress_min_count}

    def _compress_tokens(self, content, runs):
        if not runs:
            return list(content)
        tokens: list = []
        i = 0
        while i < len(content):
            for n in range(self.compress_max, 1, -1):  # leftmost-longest
                run = content[i : i + n]
                if len(run) == n and run in runs:
                    tokens.append(run)
                    i += n
                    break
            else:
                tokens.append(content[i])
                i += 1
        return tokens

    def recover(self, sid: int) -> tuple[str, ...]:
        """Walk a sequence's leaf up to the root, expanding compound runs."""
        cached = self._recovered.get(sid)
        if cached is not None:
            return cached
        tokens = []
        node = self._leaf_of[sid]
        while node.parent is not None:
            tokens.append(node.token)
            node = node.parent
        out: list[str] = []
        for token in reversed(tokens):
            if isinstance(token, tuple):
                out.extend(token)
            else:
                out.append(token)
        seq = tuple(out)
        self._recovered[sid] = seq
        return seq

    # -- structure accessors (sizes are inspectable in tests) --------------

    def tree_leaf_count(self) -> int:
        def leaves(node):
            if not node.children:
                return 1
            return sum(leaves(c) for c in node.children.values())

        return leaves(self._root) if self._root.children else 0

    def index_coverage(self, sym: str) -> frozenset[int]:
        return frozenset(self._index.get(sym, ()))

    # -- prediction ---------------------------------------------------------

    def _tally(self, suffix: tuple[str, ...]) -> Counter:
        ids = None
        for sym in set(suffix):
            hits = self._index.get(sym)
            if not hits:
                return Counter()
            ids = hits if ids is None else ids & hits
        tally: Counter[str] = Counter()
        for sid in sorted(ids or ()):
            seq = self.recover(sid)
            end = _subsequence_end(seq, suffix)
            if end is None:
                continue
            for sym in seq[end:]:
                tally[sym] += 1
        return tally

    def next_scores(self, context):
        context = tuple(context)
        length = min(self.suffix_len, len(context))
        tally = self._tally(context[len(context) - length :])
        return {sym: float(c) for sym, c in tally.items()}

    def _state_dict(self) -> dict:
        return {"sequences": [list(s) for s in self._sequences]}

    def _load_state(self, state) -> None:
        self._build([tuple(s) for s in state["sequences"]])


class CptPlusModel(CptModel):
    method = "CPTPLUS"
    compress = True

    def next_scores(self, context):
        context = tuple(context)
        length = min(self.suffix_len, len(context))
        while length >= 1:
            tally = self._tally(context[len(context) - length :])
            if tally:
                return {sym: float(c) for sym, c in tally.items()}
            length -= 1
        return {}


def _subsequence_end(seq: tuple[str, ...], sub: tuple[str, ...]) -> int | None:
    """Index just past the leftmost in-order match of `sub` in `seq`."""
    it = iter(range(len(seq)))
    pos = 0
    for target in sub:
        found = None
        for i in it:
            if seq[i] == target:
                found = i
                break
        if found is None:
            return None
        pos = found + 1
    return pos
