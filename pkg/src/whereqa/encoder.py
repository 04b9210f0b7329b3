"""Generic encoding: scale lookup, natural-breaks prominence, sequences.

Scale comes from a fixed lookup over OSM place_rank (0..30 -> levels 1..8,
1 = buildings, 8 = oceans/continents). Prominence comes from Jenks natural
breaks over the corpus's importance values (7 classes). The combined
codebook bijectively maps distinct (type, scale, prominence) triples to
integer codes for joint-sequence prediction.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .core import (
    GazetteerEntry,
    GenericSequence,
    QARecord,
    SequenceClass,
    TSPItem,
)


class EncodingError(Exception):
    pass


# place_rank lower bound (inclusive) -> scale level, coarse to fine
_SCALE_BANDS = [(27, 1), (22, 2), (18, 3), (16, 4), (12, 5), (8, 6), (4, 7), (0, 8)]


def map_scale(place_rank: int) -> int:
    if not 0 <= place_rank <= 30:
        raise EncodingError(f"place_rank {place_rank} outside 0..30")
    for lower, level in _SCALE_BANDS:
        if place_rank >= lower:
            return level
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class ProminenceBreaks:
    """Cut points partitioning [0,1] into `classes` prominence levels.

    The level of a value v is 1 + the number of boundaries <= v, so a value
    sitting exactly on a boundary is assigned upward.
    """

    classes: int
    boundaries: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.boundaries) != self.classes - 1:
            raise EncodingError(
                f"{self.classes} classes need {self.classes - 1} boundaries, "
                f"got {len(self.boundaries)}"
            )
        if any(b2 <= b1 for b1, b2 in zip(self.boundaries, self.boundaries[1:])):
            raise EncodingError("boundaries must be strictly increasing")

    def to_json(self) -> str:
        return json.dumps(
            {"classes": self.classes, "boundaries": list(self.boundaries)}, sort_keys=True
        )

    @classmethod
    def from_json(cls, text: str) -> "ProminenceBreaks":
        d = json.loads(text)
        return cls(classes=int(d["classes"]), boundaries=tuple(float(b) for b in d["boundaries"]))


def fit_prominence_breaks(importances, classes: int = 7) -> ProminenceBreaks:
    """Exact Jenks natural breaks (Fisher's dynamic program).

    Minimizes the total within-class sum of squared deviations from class
    means. Runs on the distinct values with multiplicity weights; merging
    ties never costs optimality because the within-class cost is concave in
    how a tied run is split across two adjacent classes.
    """
    values = sorted(float(v) for v in importances)
    if len(values) < classes:
        raise EncodingError(f"need at least {classes} values, got {len(values)}")
    if any(v < 0.0 or v > 1.0 for v in values):
        raise EncodingError("importance values must lie in [0,1]")
    distinct = sorted(set(values))
    if len(distinct) < classes:
        raise EncodingError(
            f"need at least {classes} distinct values, got {len(distinct)}"
        )
    split_points = _jenks_splits(values, distinct, classes)
    # Boundary between class i and i+1: midpoint of the gap between them.
    boundaries = []
    for left_max, right_min in split_points:
        boundaries.append((left_max + right_min) / 2.0)
    return ProminenceBreaks(classes=classes, boundaries=tuple(boundaries))


def _jenks_splits(values, distinct, classes):
    """Return (max of class i, min of class i+1) pairs of the optimal partition."""
    vals = np.asarray(distinct)
    weights = np.zeros(len(distinct))
    pos = {v: i for i, v in enumerate(distinct)}
    for v in values:
        weights[pos[v]] += 1.0

    m = len(vals)
    w = np.concatenate([[0.0], np.cumsum(weights)])
    s = np.concatenate([[0.0], np.cumsum(weights * vals)])
    q = np.concatenate([[0.0], np.cumsum(weights * vals * vals)])

    def sse(i, j):
        # cost of one class covering distinct values i..j inclusive (0-based)
        wt = w[j + 1] - w[i]
        sm = s[j + 1] - s[i]
        return q[j + 1] - q[i] - sm * sm / wt

    INF = float("inf")
    cost = np.full((classes + 1, m), INF)
    back = np.zeros((classes + 1, m), dtype=int)
    for j in range(m):
        cost[1][j] = sse(0, j)
    for k in range(2, classes + 1):
        prev = cost[k - 1]
        for j in range(k - 1, m):
            # first index of the last class ranges over k-1..j
            i = np.arange(k - 1, j + 1)
            wt = w[j + 1] - w[i]
            sm = s[j + 1] - s[i]
            c = prev[i - 1] + (q[j + 1] - q[i]) - sm * sm / wt
            pick = int(np.argmin(c))  # first minimum keeps ties deterministic
            cost[k][j] = c[pick]
            back[k][j] = i[pick]

    splits = []
    j = m - 1
    for k in range(classes, 1, -1):
        i = back[k][j]
        splits.append((vals[i - 1], vals[i]))
        j = i - 1
    splits.reverse()
    return splits


def jenks_total_sse(values, breaks: ProminenceBreaks) -> float:
    """Within-class SSE of `values` under the fitted breaks."""
    groups: dict[int, list[float]] = {}
    for v in values:
        groups.setdefault(map_prominence_with(breaks, float(v)), []).append(float(v))
    total = 0.0
    for vs in groups.values():
        mean = sum(vs) / len(vs)
        total += sum((v - mean) ** 2 for v in vs)
    return total


def map_prominence_with(breaks: ProminenceBreaks, importance: float) -> int:
    if not 0.0 <= importance <= 1.0:
        raise EncodingError(f"importance {importance} outside [0,1]")
    return 1 + bisect_right(breaks.boundaries, importance)


def map_prominence(importance: float, breaks: ProminenceBreaks) -> int:
    if breaks.classes != 7:
        raise EncodingError(f"prominence breaks must have 7 classes, got {breaks.classes}")
    return map_prominence_with(breaks, importance)


def toponym_triple(entry: GazetteerEntry, breaks: ProminenceBreaks) -> TSPItem | None:
    """The (type, scale, prominence) triple for one entry; None when the
    importance attribute is missing."""
    if entry.importance is None:
        return None
    return TSPItem(
        ptype=entry.feature_code,
        scale=map_scale(entry.place_rank),
        prominence=map_prominence(entry.importance, breaks),
    )


@dataclass(frozen=True)
class CombinedCodebook:
    """Bijection between distinct TSP triples and integer codes.

    Codes are assigned by sorted triple order so the assignment does not
    depend on corpus order.
    """

    code_of: dict[tuple[str, int, int], int]
    triple_of: dict[int, tuple[str, int, int]]

    def __len__(self) -> int:
        return len(self.code_of)

    def encode(self, item: TSPItem) -> int:
        try:
            return self.code_of[item.as_tuple()]
        except KeyError:
            raise EncodingError(f"triple {item.as_tuple()} not in codebook") from None

    def decode(self, code: int) -> TSPItem:
        try:
            t = self.triple_of[code]
        except KeyError:
            raise EncodingError(f"code {code} not in codebook") from None
        return TSPItem(ptype=t[0], scale=t[1], prominence=t[2])

    def to_json(self) -> str:
        rows = [
            {"code": code, "type": t[0], "scale": t[1], "prominence": t[2]}
            for t, code in sorted(self.code_of.items())
        ]
        return json.dumps(rows, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CombinedCodebook":
        rows = json.loads(text)
        code_of = {(r["type"], int(r["scale"]), int(r["prominence"])): int(r["code"]) for r in rows}
        return cls(code_of=code_of, triple_of={c: t for t, c in code_of.items()})


def build_codebook(triples) -> CombinedCodebook:
    distinct = sorted({t.as_tuple() for t in triples})
    code_of = {t: i for i, t in enumerate(distinct)}
    return CombinedCodebook(code_of=code_of, triple_of={i: t for t, i in code_of.items()})


def encode_record(
    record: QARecord,
    breaks: ProminenceBreaks | None,
    seq_class: SequenceClass,
    codebook: CombinedCodebook | None = None,
) -> tuple[GenericSequence, GenericSequence] | None:
    """Encode both sides of a record into `seq_class`, preserving order.

    Returns None (skip, not an error) when any toponym on either side lacks
    the attribute the class needs; incomplete pairs are excluded per class,
    not from the corpus globally.
    """
    sides = []
    for toponyms in (record.q_toponyms, record.a_toponyms):
        items: list[str] = []
        for entry in toponyms:
            sym = _encode_toponym(entry, breaks, seq_class, codebook)
            if sym is None:
                return None
            items.append(sym)
        sides.append(GenericSequence(seq_class=seq_class, items=tuple(items)))
    return sides[0], sides[1]


def _encode_toponym(
    entry: GazetteerEntry,
    breaks: ProminenceBreaks | None,
    seq_class: SequenceClass,
    codebook: CombinedCodebook | None,
) -> str | None:
    if seq_class is SequenceClass.TYPE:
        return entry.feature_code
    if seq_class is SequenceClass.SCALE:
        return str(map_scale(entry.place_rank))
    if seq_class is SequenceClass.PROMINENCE:
        if entry.importance is None:
            return None
        if breaks is None:
            raise EncodingError("prominence encoding requires fitted breaks")
        return str(map_prominence(entry.importance, breaks))
    if seq_class is SequenceClass.TSP_COMBINED:
        if breaks is None or codebook is None:
            raise EncodingError("combined encoding requires breaks and a codebook")
        triple = toponym_triple(entry, breaks)
        if triple is None:
            return None
        return str(codebook.encode(triple))
    raise AssertionError(f"unhandled class {seq_class}")


def corpus_importances(records) -> list[float]:
    """All importance values across both sides of all records."""
    out = []
    for rec in records:
        for entry in rec.q_toponyms + rec.a_toponyms:
            if entry.importance is not None:
                out.append(entry.importance)
    return out


def corpus_triples(records, breaks: ProminenceBreaks) -> list[TSPItem]:
    """All complete TSP triples across both sides of all records."""
    out = []
    for rec in records:
        for entry in rec.q_toponyms + rec.a_toponyms:
            triple = toponym_triple(entry, breaks)
            if triple is not None:
                out.append(triple)
    return out
