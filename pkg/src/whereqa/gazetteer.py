"""Gazetteer snapshot loading, phrase lookup and toponym disambiguation.

Lookup is compound-first: the full phrase is tried before its constituent
tokens. Disambiguation follows the minimum-spatial-context heuristic: among
all combinations of candidates, pick the one whose union bounding box has
the smallest area, breaking ties by preferring administrative divisions
over populated places, then by summed importance, then by geonames id.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

from .core import GazetteerEntry, ValidationError

DEFAULT_COMBINATION_CAP = 10_000


class GazetteerError(Exception):
    pass


class CombinationCapExceeded(GazetteerError):
    """The candidate product is too large; pre-prune the candidate sets."""


@dataclass(frozen=True)
class RowError:
    line: int
    message: str


@dataclass(frozen=True)
class CandidateSet:
    """All gazetteer entries matching one looked-up phrase."""

    phrase: str
    candidates: tuple[GazetteerEntry, ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValidationError(f"empty candidate set for phrase {self.phrase!r}")


@dataclass(frozen=True)
class ResolvedCombination:
    """One entry chosen per candidate set, plus the union-bbox area (deg^2)."""

    choices: tuple[GazetteerEntry, ...]
    bbox_area: float


class GazetteerIndex:
    """Case-folded name index over gazetteer rows. Read-only after load."""

    def __init__(self, entries: list[GazetteerEntry], row_errors: list[RowError] | None = None):
        self._by_name: dict[str, list[GazetteerEntry]] = {}
        self._by_id: dict[int, GazetteerEntry] = {}
        for e in entries:
            self._by_name.setdefault(e.name.casefold(), []).append(e)
            self._by_id[e.geonames_id] = e
        self.row_errors: tuple[RowError, ...] = tuple(row_errors or ())

    def __len__(self) -> int:
        return len(self._by_id)

    def lookup(self, name: str) -> CandidateSet | None:
        hits = self._by_name.get(name.casefold())
        if not hits:
            return None
        return CandidateSet(phrase=name, candidates=tuple(hits))

    def by_id(self, geonames_id: int) -> GazetteerEntry | None:
        return self._by_id.get(geonames_id)

    def names(self) -> frozenset[str]:
        return frozenset(self._by_name)


_COLUMNS = [
    "name", "geonames_id", "feature_class", "feature_code",
    "min_lat", "min_lon", "max_lat", "max_lon", "lat", "lon",
    "place_rank", "importance",
]


def load_gazetteer(path, strict: bool = False) -> GazetteerIndex:
    """Load a snapshot TSV (header row required, columns as in _COLUMNS).

    Rows violating entry invariants are rejected and reported via
    ``index.row_errors`` with their line numbers; ``strict=True`` raises on
    the first bad row instead.
    """
    entries: list[GazetteerEntry] = []
    errors: list[RowError] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise GazetteerError(f"{path}: empty file, header row required") from None
        if [h.strip() for h in header] != _COLUMNS:
            raise GazetteerError(f"{path}: bad header, expected {_COLUMNS}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                entries.append(_parse_row(row))
            except (ValidationError, ValueError, IndexError) as exc:
                err = RowError(line=lineno, message=str(exc))
                if strict:
                    raise GazetteerError(f"{path}:{lineno}: {exc}") from None
                errors.append(err)
    return GazetteerIndex(entries, errors)


def _parse_row(row: list[str]) -> GazetteerEntry:
    if len(row) != len(_COLUMNS):
        raise ValueError(f"expected {len(_COLUMNS)} columns, got {len(row)}")
    importance = row[11].strip()
    return GazetteerEntry(
        name=row[0].strip(),
        geonames_id=int(row[1]),
        feature_class=row[2].strip(),
        feature_code=row[3].strip(),
        bbox=(float(row[4]), float(row[5]), float(row[6]), float(row[7])),
        point=(float(row[8]), float(row[9])),
        place_rank=int(row[10]),
        importance=float(importance) if importance else None,
    )


def lookup_phrase(phrase: str, index: GazetteerIndex) -> CandidateSet | None:
    """Compound-first lookup: the full phrase, then each constituent token.

    Returns the first nonempty candidate set, or None if everything misses.
    """
    if not phrase.strip():
        raise GazetteerError("empty lookup phrase")
    hit = index.lookup(phrase.strip())
    if hit is not None:
        return hit
    tokens = phrase.split()
    if len(tokens) > 1:
        for token in tokens:
            hit = index.lookup(token)
            if hit is not None:
                return hit
    return None


def records_agree(osm_like: GazetteerEntry, geonames_like: GazetteerEntry) -> bool:
    """Cross-check a paired record: same name (case-insensitive) and the
    point of the second entry inside the bbox of the first (inclusive)."""
    if osm_like.name.casefold() != geonames_like.name.casefold():
        return False
    min_lat, min_lon, max_lat, max_lon = osm_like.bbox
    lat, lon = geonames_like.point
    return min_lat <= lat <= max_lat and min_lon <= lon <= max_lon


def union_bbox_area(entries: tuple[GazetteerEntry, ...]) -> float:
    min_lat = min(e.bbox[0] for e in entries)
    min_lon = min(e.bbox[1] for e in entries)
    max_lat = max(e.bbox[2] for e in entries)
    max_lon = max(e.bbox[3] for e in entries)
    return (max_lat - min_lat) * (max_lon - min_lon)


def _admin_penalty(entries: tuple[GazetteerEntry, ...]) -> int:
    # Encodes "administrative divisions over populated places": each PPL*
    # entry costs one, each class-A/ADM* entry refunds one. Other classes
    # are neutral relative to each other.
    penalty = 0
    for e in entries:
        if e.feature_class == "A" or e.feature_code.startswith("ADM"):
            penalty -= 1
        elif e.feature_code.startswith("PPL"):
            penalty += 1
    return penalty


def _combination_key(entries: tuple[GazetteerEntry, ...]) -> tuple:
    importance_sum = sum(e.importance or 0.0 for e in entries)
    return (
        union_bbox_area(entries),
        _admin_penalty(entries),
        -importance_sum,
        tuple(e.geonames_id for e in entries),
    )


def disambiguate(
    sets: list[CandidateSet], cap: int = DEFAULT_COMBINATION_CAP
) -> ResolvedCombination:
    """Pick one candidate per set so the union bounding box is minimal."""
    if not sets:
        raise GazetteerError("nothing to disambiguate")
    n_combinations = 1
    for s in sets:
        n_combinations *= len(s.candidates)
    if n_combinations > cap:
        raise CombinationCapExceeded(
            f"{n_combinations} candidate combinations exceed the cap of {cap}; "
            "pre-prune the candidate sets"
        )
    best = min(
        itertools.product(*(s.candidates for s in sets)),
        key=_combination_key,
    )
    return ResolvedCombination(choices=best, bbox_area=union_bbox_area(best))
