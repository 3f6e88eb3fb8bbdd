"""Streaming corpus ingestion, corpus accounting, and lexicon persistence.

``load_corpus`` yields one immutable PostRecord per row and never holds more
than the current row in memory.  Malformed rows are recorded in a caller
ledger (and logged) with their line number, then skipped; only structural
problems (unreadable source, missing columns) abort the stream.

The lexicon artifact is line-oriented UTF-8 text: a handful of ``#`` header
lines (format version, schema, entry count, train-mean fallback, checksum)
followed by one tab-separated line per word with its entry count and one
17-significant-digit decimal per schema reaction.  Loading verifies the
checksum and reproduces every vector bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .engine import ReactionLexicon, ReactionSchema, SCHEMAS, get_schema
from .errors import (
    CorruptArtifact,
    SchemaMismatch,
    UnfinalizedLexicon,
    UnreadableSource,
    VersionMismatch,
)

logger = logging.getLogger(__name__)

REACTION_NAMES = ("like", "love", "wow", "haha", "sad", "angry", "thankful")
CORE_NAMES = ("love", "wow", "haha", "sad", "angry")

LEXICON_MAGIC = "#reaction-lexicon"
LEXICON_VERSION = "v1"

# Logical field -> file column; None means "same name as the field".
DEFAULT_SCHEMA_MAP = {name: name for name in ("message",) + REACTION_NAMES}


@dataclass(frozen=True)
class ReactionCounts:
    like: int = 0
    love: int = 0
    wow: int = 0
    haha: int = 0
    sad: int = 0
    angry: int = 0
    thankful: int = 0

    def __post_init__(self):
        for name in REACTION_NAMES:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(
                    f"reaction count {name}={value!r} must be a non-negative integer"
                )

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, name) for name in REACTION_NAMES)


@dataclass(frozen=True)
class PostRecord:
    message: str
    reactions: ReactionCounts
    id: str | None = None


@dataclass(frozen=True)
class MalformedRow:
    """One quarantined input row: where it was and why it was rejected."""

    line: int
    reason: str


@dataclass
class CorpusStats:
    """Exact reaction totals plus all/core percentage breakdowns.

    Percentages are None when their denominator is zero (empty corpus, or no
    reactions of the relevant group at all).
    """

    rows: int
    totals: dict[str, int]
    all_percent: dict[str, float] | None
    core_percent: dict[str, float] | None


def _has_surrogates(s: str) -> bool:
    # errors="surrogateescape" maps undecodable bytes into U+DC80-U+DCFF.
    return any(0xDC80 <= ord(c) <= 0xDCFF for c in s)


def _open_text(source, newline=None):
    """Return (text_stream, should_close). Accepts paths and open files."""
    if isinstance(source, (str, Path)):
        try:
            raw = open(source, "rb")
        except OSError as exc:
            raise UnreadableSource(f"cannot open {source}: {exc}") from exc
        return (
            io.TextIOWrapper(
                raw, encoding="utf-8", errors="surrogateescape", newline=newline
            ),
            True,
        )
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)):
        return (
            io.TextIOWrapper(
                source, encoding="utf-8", errors="surrogateescape", newline=newline
            ),
            False,
        )
    if hasattr(source, "read"):
        return source, False
    raise UnreadableSource(f"unsupported source type {type(source).__name__}")


def _parse_count(text: str, column: str) -> int:
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise ValueError(f"column {column!r}: {text!r} is not an integer") from None
    if value < 0:
        raise ValueError(f"column {column!r}: negative count {value}")
    return value


def _record_error(errors, ledger_entry, fmt_args):
    logger.warning("skipping malformed row at line %d: %s", *fmt_args)
    if errors is not None:
        errors.append(ledger_entry)


def load_corpus(
    source,
    format: str = "csv",
    schema_map: dict[str, str] | None = None,
    errors: list[MalformedRow] | None = None,
) -> Iterator[PostRecord]:
    """Stream PostRecords from a CSV or JSONL source.

    ``schema_map`` maps the logical fields (``message``, the seven reaction
    names, optionally ``id``) to the column names actually present in the
    file.  Missing columns raise SchemaMismatch immediately; row-level
    problems (bad encoding, non-integer counts, short rows) are appended to
    ``errors`` and logged, and the stream continues.
    """
    mapping = dict(DEFAULT_SCHEMA_MAP)
    if schema_map:
        mapping.update(schema_map)
    if format == "csv":
        stream, should_close = _open_text(source, newline="")
        reader = csv.reader(stream)
        try:
            header = next(reader, None)
        except Exception:
            if should_close:
                stream.close()
            raise
        if header is None:
            if should_close:
                stream.close()
            return iter(())
        columns = {name: idx for idx, name in enumerate(header)}
        indices = {}
        for field_name in ("message",) + REACTION_NAMES:
            column = mapping[field_name]
            if column not in columns:
                if should_close:
                    stream.close()
                raise SchemaMismatch(f"missing column {column!r} in CSV header")
            indices[field_name] = columns[column]
        id_index = None
        if "id" in mapping and mapping["id"] in columns:
            id_index = columns[mapping["id"]]
        return _iter_csv(reader, stream, should_close, mapping, indices, id_index, errors)
    if format == "jsonl":
        stream, should_close = _open_text(source)
        return _iter_jsonl(stream, should_close, mapping, errors)
    raise ValueError(f"unknown corpus format {format!r}")


def _iter_csv(reader, stream, should_close, mapping, indices, id_index, errors):
    try:
        needed = max(indices.values())
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) <= needed:
                _record_error(
                    errors,
                    MalformedRow(line, f"expected at least {needed + 1} fields, got {len(row)}"),
                    (line, "short row"),
                )
                continue
            try:
                message = row[indices["message"]]
                if _has_surrogates(message):
                    raise ValueError("message column: invalid UTF-8 bytes")
                counts = {}
                for name in REACTION_NAMES:
                    text = row[indices[name]]
                    if _has_surrogates(text):
                        raise ValueError(f"column {mapping[name]!r}: invalid UTF-8 bytes")
                    counts[name] = _parse_count(text, mapping[name])
            except ValueError as exc:
                _record_error(errors, MalformedRow(line, str(exc)), (line, exc))
                continue
            record_id = row[id_index] if id_index is not None and id_index < len(row) else None
            yield PostRecord(message, ReactionCounts(**counts), record_id)
    finally:
        if should_close:
            stream.close()


def _iter_jsonl(stream, should_close, mapping, errors):
    try:
        for line_num, line in enumerate(stream, 1):
            line = line.strip()
            if not line:
                continue
            if _has_surrogates(line):
                _record_error(
                    errors,
                    MalformedRow(line_num, "invalid UTF-8 bytes"),
                    (line_num, "invalid UTF-8"),
                )
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                _record_error(errors, MalformedRow(line_num, f"bad JSON: {exc}"), (line_num, exc))
                continue
            if not isinstance(obj, dict):
                _record_error(
                    errors,
                    MalformedRow(line_num, "JSONL row is not an object"),
                    (line_num, "not an object"),
                )
                continue
            try:
                column = mapping["message"]
                if column not in obj:
                    raise ValueError(f"missing key {column!r}")
                message = obj[column]
                if not isinstance(message, str):
                    raise ValueError(f"key {column!r} is not a string")
                counts = {}
                for name in REACTION_NAMES:
                    column = mapping[name]
                    if column not in obj:
                        raise ValueError(f"missing key {column!r}")
                    value = obj[column]
                    if isinstance(value, bool) or not isinstance(value, int):
                        raise ValueError(f"key {column!r}: {value!r} is not an integer")
                    if value < 0:
                        raise ValueError(f"key {column!r}: negative count {value}")
                    counts[name] = value
            except ValueError as exc:
                _record_error(errors, MalformedRow(line_num, str(exc)), (line_num, exc))
                continue
            record_id = None
            if "id" in mapping and mapping["id"] in obj:
                record_id = str(obj[mapping["id"]])
            yield PostRecord(message, ReactionCounts(**counts), record_id)
    finally:
        if should_close:
            stream.close()


def corpus_stats(corpus: Iterable[PostRecord]) -> CorpusStats:
    """Exact totals per reaction plus all/core percentage columns."""
    totals = {name: 0 for name in REACTION_NAMES}
    rows = 0
    for record in corpus:
        rows += 1
        counts = record.reactions
        for name in REACTION_NAMES:
            totals[name] += getattr(counts, name)
    grand = sum(totals.values())
    core = sum(totals[name] for name in CORE_NAMES)
    all_percent = (
        {name: 100.0 * totals[name] / grand for name in REACTION_NAMES}
        if grand > 0
        else None
    )
    core_percent = (
        {name: 100.0 * totals[name] / core for name in CORE_NAMES}
        if core > 0
        else None
    )
    return CorpusStats(rows, totals, all_percent, core_percent)


def _format_floats(values) -> str:
    return "\t".join(format(v, ".17g") for v in values)


def save_lexicon(lexicon: ReactionLexicon, sink, manifest_id: str | None = None) -> None:
    """Write a finalized lexicon to ``sink`` (path or text file object)."""
    if not lexicon.finalized:
        raise UnfinalizedLexicon("only finalized lexicons can be persisted")
    schema = lexicon.schema
    body_lines = []
    for word in sorted(lexicon.entries):
        if any(c in "\t\n\r" for c in word):
            raise ValueError(f"word {word!r} contains tab or newline")
        vector, count = lexicon.entries[word]
        body_lines.append(f"{word}\t{count}\t{_format_floats(vector)}\n")
    body = "".join(body_lines)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    mean = "-" if lexicon.train_mean is None else _format_floats(lexicon.train_mean)
    header = [
        f"{LEXICON_MAGIC} {LEXICON_VERSION}\n",
        f"#schema\t{schema.name}\t{','.join(schema.reactions)}\n",
        f"#entries\t{len(lexicon.entries)}\n",
        f"#train_entries\t{lexicon.train_entry_count}\n",
        f"#mean\t{mean}\n",
    ]
    if manifest_id:
        header.append(f"#manifest\t{manifest_id}\n")
    header.append(f"#sha256\t{digest}\n")
    text = "".join(header) + body
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sink.write(text)


def load_lexicon(source, expected_schema: ReactionSchema | str | None = None) -> ReactionLexicon:
    """Read a lexicon artifact back into a finalized ReactionLexicon.

    Raises VersionMismatch for unsupported format versions, SchemaMismatch
    when the artifact's schema differs from ``expected_schema``, and
    CorruptArtifact for checksum or structural failures.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UnreadableSource(f"cannot open {source}: {exc}") from exc
        except UnicodeDecodeError as exc:
            raise CorruptArtifact(f"artifact is not UTF-8: {exc}") from exc
    else:
        text = source.read()
    lines = text.split("\n")
    if not lines or not lines[0].startswith(LEXICON_MAGIC):
        raise CorruptArtifact("not a reaction-lexicon artifact")
    version = lines[0][len(LEXICON_MAGIC):].strip()
    if version != LEXICON_VERSION:
        raise VersionMismatch(f"unsupported lexicon format version {version!r}")

    headers: dict[str, list[str]] = {}
    meta: dict[str, str] = {}
    body_start = None
    for i, line in enumerate(lines[1:], 1):
        if not line.startswith("#"):
            body_start = i
            break
        fields = line[1:].split("\t")
        key, values = fields[0], fields[1:]
        if key == "manifest":
            meta["manifest"] = values[0] if values else ""
        else:
            headers[key] = values
        if key == "sha256":
            body_start = i + 1
            break
    if body_start is None:
        body_start = len(lines)

    for required in ("schema", "entries", "mean", "sha256"):
        if required not in headers:
            raise CorruptArtifact(f"missing #{required} header")
    schema_fields = headers["schema"]
    if len(schema_fields) != 2:
        raise CorruptArtifact("malformed #schema header")
    name, reaction_csv = schema_fields
    if name not in SCHEMAS:
        raise SchemaMismatch(f"unknown schema {name!r} in artifact")
    schema = get_schema(name)
    if tuple(reaction_csv.split(",")) != schema.reactions:
        raise CorruptArtifact(
            f"artifact reaction list does not match schema {name!r}"
        )
    if expected_schema is not None:
        expected = (
            get_schema(expected_schema)
            if isinstance(expected_schema, str)
            else expected_schema
        )
        if expected != schema:
            raise SchemaMismatch(
                f"artifact has schema {schema.name!r}, expected {expected.name!r}"
            )

    body = "\n".join(lines[body_start:])
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if digest != headers["sha256"][0]:
        raise CorruptArtifact("checksum mismatch; artifact is corrupt or truncated")

    try:
        declared = int(headers["entries"][0])
    except (IndexError, ValueError):
        raise CorruptArtifact("malformed #entries header") from None
    train_entries = 0
    if "train_entries" in headers:
        try:
            train_entries = int(headers["train_entries"][0])
        except (IndexError, ValueError):
            raise CorruptArtifact("malformed #train_entries header") from None

    mean_fields = headers["mean"]
    if mean_fields == ["-"]:
        train_mean = None
    else:
        try:
            train_mean = tuple(float(v) for v in mean_fields)
        except ValueError:
            raise CorruptArtifact("malformed #mean header") from None
        if len(train_mean) != schema.size:
            raise CorruptArtifact("train-mean vector has wrong dimension")

    entries = {}
    for line in body.split("\n"):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2 + schema.size:
            raise CorruptArtifact(f"entry line has {len(fields)} fields: {line!r}")
        word = fields[0]
        try:
            count = int(fields[1])
            vector = tuple(float(v) for v in fields[2:])
        except ValueError:
            raise CorruptArtifact(f"unparseable entry line: {line!r}") from None
        entries[word] = (vector, count)
    if len(entries) != declared:
        raise CorruptArtifact(
            f"artifact declares {declared} entries but contains {len(entries)}"
        )
    return ReactionLexicon(
        schema=schema,
        entries=entries,
        train_entry_count=train_entries,
        train_mean=train_mean,
        finalized=True,
        meta=meta,
    )
