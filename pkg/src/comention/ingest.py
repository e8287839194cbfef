"""Article ingest: JSONL parsing, name normalization, alias folding, pair expansion."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import re
import unicodedata
from dataclasses import dataclass, replace
from datetime import date as _date
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DataError
from .graph import Graph, density

logger = logging.getLogger(__name__)

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

AliasMap = dict[str, str]  # alias -> canonical, idempotent by construction


def normalize_name(raw: str) -> str:
    """NFC-normalize and collapse internal whitespace."""
    return " ".join(unicodedata.normalize("NFC", raw).split())


@dataclass(frozen=True)
class ArticleRecord:
    """One ingested article: id, optional title/date, ordered distinct persons."""

    id: str
    persons: tuple[str, ...]
    title: str | None = None
    date: str | None = None


def _parse_line(payload: str, lineno: int) -> ArticleRecord | None:
    try:
        obj = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise DataError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise DataError(f"line {lineno}: record must be a JSON object")

    rid = obj.get("id")
    if not isinstance(rid, str) or not rid.strip():
        raise DataError(f"line {lineno}: 'id' must be a non-empty string")
    rid = rid.strip()

    title = obj.get("title")
    if title is not None and not isinstance(title, str):
        raise DataError(f"line {lineno}: 'title' must be a string when present")

    when = obj.get("date")
    if when is not None:
        if not isinstance(when, str) or not _DATE_RE.match(when):
            raise DataError(f"line {lineno}: 'date' must look like YYYY-MM-DD")
        try:
            _date.fromisoformat(when)
        except ValueError as exc:
            raise DataError(f"line {lineno}: 'date' is not a real calendar date: {when}") from exc

    persons_raw = obj.get("persons")
    if not isinstance(persons_raw, list):
        raise DataError(f"line {lineno}: 'persons' must be a list of strings")
    persons: list[str] = []
    for item in persons_raw:
        if not isinstance(item, str):
            raise DataError(f"line {lineno}: person entries must be strings, got {item!r}")
        name = normalize_name(item)
        if name and name not in persons:
            persons.append(name)
    if not persons:
        logger.warning("line %d: record %r mentions no usable person, skipping", lineno, rid)
        return None
    return ArticleRecord(id=rid, persons=tuple(persons), title=title, date=when)


def parse_articles(lines: Iterable[str]) -> list[ArticleRecord]:
    """Parse JSONL article records.

    Each non-blank line must be an object with a non-empty string ``id`` and a
    ``persons`` list; ``title`` and ``date`` (YYYY-MM-DD) are optional.  Person
    names are normalized and deduplicated per record, order preserved.  A
    malformed line raises :class:`DataError` carrying its line number; a record
    left with no persons is skipped with a warning.
    """
    records: list[ArticleRecord] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        record = _parse_line(line, lineno)
        if record is not None:
            records.append(record)
    return records


def load_articles(path) -> list[ArticleRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return parse_articles(fh)
        except DataError as exc:
            raise DataError(f"{path}: {exc}") from exc


def load_aliases(path) -> dict[str, str]:
    """Load an alias,canonical CSV into a one-step rename map.

    The map must be idempotent: a canonical name may never itself appear as an
    alias (no chains), and one alias cannot point at two targets.  Rows that
    map a name to itself are dropped with a warning.
    """
    aliases: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["alias", "canonical"]:
            raise DataError(f"{path}: expected header 'alias,canonical'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise DataError(f"{path}: line {lineno}: expected 2 columns")
            alias = normalize_name(row[0])
            canonical = normalize_name(row[1])
            if not alias or not canonical:
                raise DataError(f"{path}: line {lineno}: blank name")
            if alias == canonical:
                logger.warning("%s: line %d: %r maps to itself, ignoring", path, lineno, alias)
                continue
            if alias in aliases and aliases[alias] != canonical:
                raise DataError(f"{path}: line {lineno}: alias {alias!r} maps to both "
                                f"{aliases[alias]!r} and {canonical!r}")
            aliases[alias] = canonical
    for alias, canonical in aliases.items():
        if canonical in aliases:
            raise DataError(f"{path}: chained alias: {alias!r} -> {canonical!r} -> "
                            f"{aliases[canonical]!r}")
    return aliases


def apply_aliases(records: Sequence[ArticleRecord],
                  aliases: Mapping[str, str]) -> list[ArticleRecord]:
    """Fold aliased person names onto their canonical form.

    Renaming can merge two mentions within one article; the duplicate is
    dropped and first-mention order kept.  Applying the same map again is a
    no-op by construction.
    """
    out: list[ArticleRecord] = []
    for record in records:
        folded: list[str] = []
        for name in record.persons:
            canonical = aliases.get(name, name)
            if canonical not in folded:
                folded.append(canonical)
        if tuple(folded) != record.persons:
            record = replace(record, persons=tuple(folded))
        out.append(record)
    return out


def clique_expand(records: Iterable[ArticleRecord]) -> Iterator[tuple[str, str]]:
    """Yield every unordered co-mention pair, one clique per article.

    An article naming k persons contributes k*(k-1)/2 pairs; articles with a
    single person contribute none.
    """
    for record in records:
        yield from itertools.combinations(record.persons, 2)


def ingest_stats(records: Sequence[ArticleRecord], g: Graph) -> dict:
    """Corpus-level counts next to the graph they produced."""
    persons: set[str] = set()
    pair_slots = 0
    unique_pairs: set[tuple[str, str]] = set()
    dates: list[str] = []
    for record in records:
        persons.update(record.persons)
        k = len(record.persons)
        pair_slots += k * (k - 1) // 2
        if record.date:
            dates.append(record.date)
    for a, b in clique_expand(records):
        unique_pairs.add((a, b) if a < b else (b, a))
    return {
        "articles": len(records),
        "persons_distinct": len(persons),
        "pair_slots": pair_slots,
        "unique_pairs": len(unique_pairs),
        "nodes": g.node_count,
        "edges": g.edge_count,
        "density": density(g.node_count, g.edge_count),
        "date_min": min(dates) if dates else None,
        "date_max": max(dates) if dates else None,
    }
