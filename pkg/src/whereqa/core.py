"""Domain types for where-question/answer corpora and their generic encodings.

Everything here is immutable after construction and safe to share across
threads. The three generic schemas are:

* place type  -- short Geonames-style feature codes, validated against a
  schema file loaded at runtime (see :func:`load_type_schema`),
* scale       -- ordinal levels 1..8 (1 = buildings, 8 = oceans/continents),
* prominence  -- ordinal levels 1..7 (7 = most prominent).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

SCALE_MIN, SCALE_MAX = 1, 8
PROMINENCE_MIN, PROMINENCE_MAX = 1, 7

FEATURE_CLASSES = frozenset("AHLPRSTUV")

_CODE_RE = re.compile(r"^[A-Z0-9]{1,6}$")


class CoreError(Exception):
    """Base error for domain-type violations."""


class SchemaError(CoreError):
    """Raised when a type-schema file is malformed or a code is unknown."""


class ValidationError(CoreError):
    """Raised when a record violates a domain invariant."""


class SequenceClass(str, Enum):
    """Which generic schema a sequence's symbols belong to."""

    TYPE = "TYPE"
    SCALE = "SCALE"
    PROMINENCE = "PROMINENCE"
    TSP_COMBINED = "TSP_COMBINED"


class QuestionClass(str, Enum):
    """Simple (one toponym) vs detailed (several toponyms) where-questions."""

    SWQ = "SWQ"
    DWQ = "DWQ"


@dataclass(frozen=True)
class PlaceTypeCode:
    """A feature code plus the single-letter class it belongs to."""

    code: str
    class_letter: str

    def __post_init__(self) -> None:
        if not _CODE_RE.match(self.code):
            raise ValidationError(
                f"bad type code {self.code!r}: must be uppercase alphanumeric, 1-6 chars"
            )
        if self.class_letter not in FEATURE_CLASSES:
            raise ValidationError(
                f"bad class letter {self.class_letter!r} for code {self.code!r}"
            )


class TypeSchema:
    """The closed set of place-type codes used for all validation.

    Maps each code to its class letter. Loaded from a data file so a toy
    schema can drive tests while the bundled full schema drives production.
    """

    def __init__(self, entries: Iterable[PlaceTypeCode]):
        self._by_code: dict[str, PlaceTypeCode] = {}
        for entry in entries:
            self._by_code[entry.code] = entry

    def __contains__(self, code: str) -> bool:
        return code in self._by_code

    def __len__(self) -> int:
        return len(self._by_code)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._by_code))

    def entry(self, code: str) -> PlaceTypeCode:
        try:
            return self._by_code[code]
        except KeyError:
            raise SchemaError(f"unknown type code {code!r}") from None

    def class_of(self, code: str) -> str:
        return self.entry(code).class_letter

    @property
    def codes(self) -> frozenset[str]:
        return frozenset(self._by_code)


def load_type_schema(path) -> TypeSchema:
    """Parse a type-schema file: two whitespace-separated columns
    (class letter, code), '#' comments and blank lines allowed.
    """
    entries: list[PlaceTypeCode] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SchemaError(f"{path}:{lineno}: expected 'CLASS CODE', got {raw.rstrip()!r}")
            letter, code = parts
            try:
                entries.append(PlaceTypeCode(code=code, class_letter=letter))
            except ValidationError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    if not entries:
        raise SchemaError(f"{path}: no type codes found")
    return TypeSchema(entries)


@dataclass(frozen=True)
class GazetteerEntry:
    """One resolved place: a Geonames-style record with an OSM-style bbox,
    place_rank and importance.

    bbox is (min_lat, min_lon, max_lat, max_lon) and point is (lat, lon),
    both in WGS84 degrees. The point must lie inside the bbox.
    """

    name: str
    geonames_id: int
    feature_class: str
    feature_code: str
    bbox: tuple[float, float, float, float]
    point: tuple[float, float]
    place_rank: int
    importance: float | None = None

    def __post_init__(self) -> None:
        min_lat, min_lon, max_lat, max_lon = self.bbox
        lat, lon = self.point
        if min_lat > max_lat or min_lon > max_lon:
            raise ValidationError(
                f"{self.name!r}: bbox min exceeds max (antimeridian-crossing boxes are rejected)"
            )
        if not (min_lat <= lat <= max_lat and min_lon <= lon <= max_lon):
            raise ValidationError(f"{self.name!r}: point {self.point} outside bbox {self.bbox}")
        if not 0 <= self.place_rank <= 30:
            raise ValidationError(f"{self.name!r}: place_rank {self.place_rank} outside 0..30")
        if self.importance is not None and not 0.0 <= self.importance <= 1.0:
            raise ValidationError(f"{self.name!r}: importance {self.importance} outside [0,1]")

    def bbox_area(self) -> float:
        min_lat, min_lon, max_lat, max_lon = self.bbox
        return (max_lat - min_lat) * (max_lon - min_lon)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "geonames_id": self.geonames_id,
            "feature_class": self.feature_class,
            "feature_code": self.feature_code,
            "bbox": list(self.bbox),
            "point": list(self.point),
            "place_rank": self.place_rank,
            "importance": self.importance,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "GazetteerEntry":
        return cls(
            name=d["name"],
            geonames_id=int(d["geonames_id"]),
            feature_class=d["feature_class"],
            feature_code=d["feature_code"],
            bbox=tuple(float(v) for v in d["bbox"]),
            point=tuple(float(v) for v in d["point"]),
            place_rank=int(d["place_rank"]),
            importance=None if d.get("importance") is None else float(d["importance"]),
        )


@dataclass(frozen=True)
class TSPItem:
    """The (type, scale, prominence) triple for one toponym."""

    ptype: str
    scale: int
    prominence: int

    def __post_init__(self) -> None:
        if not _CODE_RE.match(self.ptype):
            raise ValidationError(f"bad type code {self.ptype!r}")
        if not SCALE_MIN <= self.scale <= SCALE_MAX:
            raise ValidationError(f"scale {self.scale} outside {SCALE_MIN}..{SCALE_MAX}")
        if not PROMINENCE_MIN <= self.prominence <= PROMINENCE_MAX:
            raise ValidationError(
                f"prominence {self.prominence} outside {PROMINENCE_MIN}..{PROMINENCE_MAX}"
            )

    def as_tuple(self) -> tuple[str, int, int]:
        return (self.ptype, self.scale, self.prominence)


@dataclass(frozen=True)
class GenericSequence:
    """An ordered run of symbols from one generic schema.

    Symbols are kept as strings throughout (scale/prominence levels and
    combined codes are rendered as decimal strings) so that sequences of
    any class share one representation.
    """

    seq_class: SequenceClass
    items: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.items) < 1:
            raise ValidationError("a generic sequence must contain at least one symbol")

    def __len__(self) -> int:
        return len(self.items)


def validate_sequence(seq: GenericSequence, type_schema: TypeSchema | None = None) -> GenericSequence:
    """Check every symbol against the declared class's schema.

    TYPE sequences need a loaded schema; out-of-range scale/prominence
    symbols (e.g. a level 9 scale) are flagged here rather than guessed at.
    """
    if seq.seq_class is SequenceClass.TYPE:
        if type_schema is None:
            raise ValidationError("validating a TYPE sequence requires a type schema")
        for sym in seq.items:
            if sym not in type_schema:
                raise ValidationError(f"symbol {sym!r} not in the loaded type schema")
    elif seq.seq_class is SequenceClass.SCALE:
        for sym in seq.items:
            if not sym.isdigit() or not SCALE_MIN <= int(sym) <= SCALE_MAX:
                raise ValidationError(f"scale symbol {sym!r} outside {SCALE_MIN}..{SCALE_MAX}")
    elif seq.seq_class is SequenceClass.PROMINENCE:
        for sym in seq.items:
            if not sym.isdigit() or not PROMINENCE_MIN <= int(sym) <= PROMINENCE_MAX:
                raise ValidationError(
                    f"prominence symbol {sym!r} outside {PROMINENCE_MIN}..{PROMINENCE_MAX}"
                )
    else:
        for sym in seq.items:
            if not sym.isdigit():
                raise ValidationError(f"combined-code symbol {sym!r} is not a nonnegative integer")
    return seq


def question_class_for(n_question_toponyms: int) -> QuestionClass:
    """SWQ iff the question holds exactly one toponym; DWQ for more."""
    if n_question_toponyms < 1:
        raise ValidationError("a question must contain at least one toponym")
    return QuestionClass.SWQ if n_question_toponyms == 1 else QuestionClass.DWQ


@dataclass(frozen=True)
class QARecord:
    """A question/answer pair as ordered toponym sequences.

    Duplicate toponyms are permitted in the answer (answers legitimately
    repeat e.g. a county-level reference).
    """

    id: str
    q_toponyms: tuple[GazetteerEntry, ...]
    a_toponyms: tuple[GazetteerEntry, ...]
    q_class: QuestionClass = field(default=QuestionClass.SWQ)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "q_class": self.q_class.value,
            "q_toponyms": [t.to_dict() for t in self.q_toponyms],
            "a_toponyms": [t.to_dict() for t in self.a_toponyms],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "QARecord":
        rec = cls(
            id=str(d["id"]),
            q_toponyms=tuple(GazetteerEntry.from_dict(t) for t in d["q_toponyms"]),
            a_toponyms=tuple(GazetteerEntry.from_dict(t) for t in d["a_toponyms"]),
        )
        return validate_record(rec)


def validate_record(record: QARecord) -> QARecord:
    """Recompute q_class from the toponym count and enforce invariants."""
    if len(record.q_toponyms) < 1:
        raise ValidationError(f"record {record.id!r}: empty question toponym list")
    if len(record.a_toponyms) < 1:
        raise ValidationError(f"record {record.id!r}: empty answer toponym list")
    q_class = question_class_for(len(record.q_toponyms))
    if record.q_class is q_class:
        return record
    return QARecord(
        id=record.id,
        q_toponyms=record.q_toponyms,
        a_toponyms=record.a_toponyms,
        q_class=q_class,
    )


def write_records(records: Iterable[QARecord], path) -> int:
    """Write records as JSONL; returns the record count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
            n += 1
    return n


def read_records(path) -> list[QARecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(QARecord.from_dict(json.loads(line)))
    return records
