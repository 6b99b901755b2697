"""Seed corpus ingestion, normalization, and baseline filtering."""

from __future__ import annotations

import csv
import json
import unicodedata
from dataclasses import dataclass, field

from .errors import MissingBaselineError, SchemaError

LANGUAGES = ("english", "chinese")
CATEGORIES = ("abuse", "spam", "porn")

FORMAT_VERSION = 1


def normalize_text(text: str) -> str:
    """NFC, trim, collapse internal whitespace runs to single spaces."""
    text = unicodedata.normalize("NFC", text)
    return " ".join(text.split())


@dataclass(frozen=True)
class SeedRecord:
    seed_id: str
    text: str
    language: str = "english"
    category: str = "abuse"
    source: str = ""

    def __post_init__(self):
        if not self.text.strip():
            raise SchemaError(f"seed {self.seed_id!r} has empty text")
        if self.language not in LANGUAGES:
            raise SchemaError(f"seed {self.seed_id!r}: unknown language {self.language!r}")
        if self.category not in CATEGORIES:
            raise SchemaError(f"seed {self.seed_id!r}: unknown category {self.category!r}")


@dataclass(frozen=True)
class SeedCorpus:
    seeds: tuple[SeedRecord, ...]
    dropped_count: int = 0
    format_version: int = FORMAT_VERSION

    def __len__(self) -> int:
        return len(self.seeds)

    def __iter__(self):
        return iter(self.seeds)


@dataclass
class FieldMapping:
    """Names the input columns/fields holding each seed attribute."""

    text: str = "text"
    seed_id: str | None = "seed_id"   # None: synthesize row-index ids
    language: str | None = "language"
    category: str | None = "category"
    source: str | None = "source"


def _record_from_row(row: dict, mapping: FieldMapping, index: int) -> SeedRecord | None:
    if mapping.text not in row:
        raise SchemaError(f"row {index}: mapped text field {mapping.text!r} missing")
    text = normalize_text(str(row[mapping.text] or ""))
    if not text:
        return None

    def get(name, default):
        if name is None or name not in row or row[name] in (None, ""):
            return default
        return str(row[name])

    return SeedRecord(
        seed_id=get(mapping.seed_id, f"seed-{index:04d}"),
        text=text,
        language=get(mapping.language, "english").lower(),
        category=get(mapping.category, "abuse").lower(),
        source=get(mapping.source, ""),
    )


def load_seeds(path: str, format: str = "jsonl",
               mapping: FieldMapping | None = None) -> SeedCorpus:
    """Load seeds from a CSV/TSV (header row) or JSONL file.

    Rows whose mapped text is empty after normalization are dropped and
    counted in ``dropped_count``. Duplicate seed ids raise SchemaError.
    """
    mapping = mapping or FieldMapping()
    if format not in ("csv", "tsv", "jsonl"):
        raise SchemaError(f"unknown corpus format {format!r}")

    rows: list[dict] = []
    with open(path, encoding="utf-8", newline="") as fh:
        if format == "jsonl":
            for i, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"line {i + 1}: invalid JSON: {exc}") from exc
                if not isinstance(obj, dict):
                    raise SchemaError(f"line {i + 1}: expected a JSON object")
                rows.append(obj)
        else:
            delim = "," if format == "csv" else "\t"
            reader = csv.DictReader(fh, delimiter=delim)
            if reader.fieldnames is None:
                raise SchemaError("missing header row")
            if mapping.text not in reader.fieldnames:
                raise SchemaError(f"mapped text column {mapping.text!r} not in header")
            rows.extend(reader)

    seeds: list[SeedRecord] = []
    seen: set[str] = set()
    dropped = 0
    for i, row in enumerate(rows):
        rec = _record_from_row(row, mapping, i)
        if rec is None:
            dropped += 1
            continue
        if rec.seed_id in seen:
            raise SchemaError(f"duplicate seed_id {rec.seed_id!r}")
        seen.add(rec.seed_id)
        seeds.append(rec)
    return SeedCorpus(seeds=tuple(seeds), dropped_count=dropped)


def filter_baseline(corpus: SeedCorpus, verdicts: dict[str, str]) -> SeedCorpus:
    """Keep only seeds the moderator already flags as toxic at baseline.

    ``verdicts`` maps seed_id to "toxic"/"non_toxic" (Verdict objects with a
    ``label`` attribute are accepted too). Order is preserved.
    """
    kept = []
    for seed in corpus:
        if seed.seed_id not in verdicts:
            raise MissingBaselineError(f"no baseline verdict for seed {seed.seed_id!r}")
        v = verdicts[seed.seed_id]
        label = getattr(v, "label", v)
        if label == "toxic":
            kept.append(seed)
    return SeedCorpus(seeds=tuple(kept), dropped_count=corpus.dropped_count)
