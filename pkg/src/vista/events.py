"""Canonical interaction-log schema: parsing, validation, normalization, serialization.

One log row = one student interaction with the tutor. The schema has 11
attributes; CSV and JSONL carry the same field names. All parsing is
tolerant per row: a malformed row becomes a :class:`RecordError` and the
remaining rows are still processed.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import IO, Iterable, NamedTuple, Union

CSV_HEADER = (
    "ID",
    "userID",
    "tutor",
    "interface",
    "start_state",
    "selection",
    "action",
    "input",
    "correctness",
    "kc_labels",
    "time",
)

KC_SEPARATOR = ";"


class Action(str, Enum):
    START_PROBLEM = "start_problem"
    INPUT = "input"
    HINT_REQUEST = "hint_request"
    DONE = "done"


class Correctness(str, Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    NOT_APPLICABLE = "not-applicable"


class FormatError(ValueError):
    """Fatal log-level failure (e.g. missing or wrong CSV header)."""


class RecordValidationError(ValueError):
    """A single record violates the schema invariants."""


@dataclass(frozen=True)
class RecordError:
    """A rejected row: 1-based data-row number plus the reason."""

    row: int
    reason: str


@dataclass(frozen=True)
class InteractionRecord:
    """One logged tutor interaction (the 11-attribute row)."""

    id: str
    user_id: str
    tutor: str
    interface: str
    start_state: str
    selection: str
    action: Action
    input: str
    correctness: Correctness
    kc_labels: tuple[str, ...]
    time: datetime

    def __post_init__(self):
        if not self.id:
            raise RecordValidationError("id must be non-empty")
        if not self.user_id:
            raise RecordValidationError("user_id must be non-empty")
        if self.time.tzinfo is None:
            raise RecordValidationError("time must carry a timezone")
        for label in self.kc_labels:
            if not label:
                raise RecordValidationError("kc_labels entries must be non-empty")
            if KC_SEPARATOR in label:
                raise RecordValidationError(
                    f"kc label may not contain {KC_SEPARATOR!r}: {label!r}"
                )
        if self.action is Action.INPUT:
            if self.correctness is Correctness.NOT_APPLICABLE:
                raise RecordValidationError(
                    "input actions must be graded correct or incorrect"
                )
        elif self.action is Action.DONE:
            # done is normally ungraded, but carries correct when it closes a
            # fully-correct problem.
            if self.correctness is Correctness.INCORRECT:
                raise RecordValidationError("done cannot be graded incorrect")
        else:
            if self.correctness is not Correctness.NOT_APPLICABLE:
                raise RecordValidationError(
                    f"{self.action.value} actions are not graded"
                )
        if (
            self.selection
            and self.action in (Action.INPUT, Action.HINT_REQUEST)
            and not self.kc_labels
        ):
            raise RecordValidationError(
                "kc_labels required for step-level input/hint actions"
            )


class ParseResult(NamedTuple):
    records: list[InteractionRecord]
    errors: list[RecordError]


class NormalizeSummary(NamedTuple):
    input_count: int
    output_count: int
    duplicates_dropped: int


Source = Union[bytes, str, IO[bytes], IO[str]]


def _as_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO 8601 timestamp; a timezone is mandatory."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(raw)
    except ValueError:
        raise RecordValidationError(f"bad timestamp: {text!r}") from None
    if ts.tzinfo is None:
        raise RecordValidationError(f"timestamp missing timezone: {text!r}")
    return ts


def format_timestamp(ts: datetime) -> str:
    return ts.isoformat()


def _parse_action(text: str) -> Action:
    try:
        return Action(text)
    except ValueError:
        raise RecordValidationError(f"unknown action: {text!r}") from None


def _parse_correctness(text: str) -> Correctness:
    try:
        return Correctness(text)
    except ValueError:
        raise RecordValidationError(f"unknown correctness: {text!r}") from None


def _split_kc_labels(cell: str) -> tuple[str, ...]:
    return tuple(part for part in cell.split(KC_SEPARATOR) if part)


def record_from_fields(
    id: str,
    user_id: str,
    tutor: str,
    interface: str,
    start_state: str,
    selection: str,
    action: str,
    input: str,
    correctness: str,
    kc_labels: Iterable[str],
    time: str,
) -> InteractionRecord:
    """Build a validated record from raw string fields."""
    return InteractionRecord(
        id=id,
        user_id=user_id,
        tutor=tutor,
        interface=interface,
        start_state=start_state,
        selection=selection,
        action=_parse_action(action),
        input=input,
        correctness=_parse_correctness(correctness),
        kc_labels=tuple(kc_labels),
        time=parse_timestamp(time),
    )


def _parse_csv(text: str) -> ParseResult:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("missing CSV header") from None
    if tuple(header) != CSV_HEADER:
        raise FormatError(
            f"bad CSV header: expected {','.join(CSV_HEADER)}, got {','.join(header)}"
        )
    records: list[InteractionRecord] = []
    errors: list[RecordError] = []
    row_no = 0
    for row in reader:
        if not row:
            continue
        row_no += 1
        if len(row) != len(CSV_HEADER):
            errors.append(
                RecordError(row_no, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
            )
            continue
        try:
            records.append(
                record_from_fields(
                    id=row[0],
                    user_id=row[1],
                    tutor=row[2],
                    interface=row[3],
                    start_state=row[4],
                    selection=row[5],
                    action=row[6],
                    input=row[7],
                    correctness=row[8],
                    kc_labels=_split_kc_labels(row[9]),
                    time=row[10],
                )
            )
        except RecordValidationError as exc:
            errors.append(RecordError(row_no, str(exc)))
    return ParseResult(records, errors)


_JSONL_KEYS = set(CSV_HEADER)


def _parse_jsonl(text: str) -> ParseResult:
    records: list[InteractionRecord] = []
    errors: list[RecordError] = []
    row_no = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        row_no += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(RecordError(row_no, f"bad JSON: {exc.msg}"))
            continue
        if not isinstance(obj, dict):
            errors.append(RecordError(row_no, "line is not a JSON object"))
            continue
        missing = _JSONL_KEYS - obj.keys()
        if missing:
            errors.append(RecordError(row_no, f"missing fields: {', '.join(sorted(missing))}"))
            continue
        kc = obj["kc_labels"]
        if not isinstance(kc, list) or not all(isinstance(x, str) for x in kc):
            errors.append(RecordError(row_no, "kc_labels must be a list of strings"))
            continue
        try:
            records.append(
                record_from_fields(
                    id=str(obj["ID"]),
                    user_id=str(obj["userID"]),
                    tutor=str(obj["tutor"]),
                    interface=str(obj["interface"]),
                    start_state=str(obj["start_state"]),
                    selection=str(obj["selection"]),
                    action=str(obj["action"]),
                    input=str(obj["input"]),
                    correctness=str(obj["correctness"]),
                    kc_labels=kc,
                    time=str(obj["time"]),
                )
            )
        except RecordValidationError as exc:
            errors.append(RecordError(row_no, str(exc)))
    return ParseResult(records, errors)


def parse_log(source: Source, format: str) -> ParseResult:
    """Parse a CSV or JSONL interaction log.

    Well-formed rows become records; malformed rows become errors keyed by
    their 1-based data-row number. Raises :class:`FormatError` only for
    log-level problems (missing/unknown header, unknown format).
    """
    text = _as_text(source)
    if format == "csv":
        return _parse_csv(text)
    if format == "jsonl":
        return _parse_jsonl(text)
    raise FormatError(f"unknown log format: {format!r}")


def _csv_row(record: InteractionRecord) -> list[str]:
    return [
        record.id,
        record.user_id,
        record.tutor,
        record.interface,
        record.start_state,
        record.selection,
        record.action.value,
        record.input,
        record.correctness.value,
        KC_SEPARATOR.join(record.kc_labels),
        format_timestamp(record.time),
    ]


def record_to_json_obj(record: InteractionRecord) -> dict:
    return {
        "ID": record.id,
        "userID": record.user_id,
        "tutor": record.tutor,
        "interface": record.interface,
        "start_state": record.start_state,
        "selection": record.selection,
        "action": record.action.value,
        "input": record.input,
        "correctness": record.correctness.value,
        "kc_labels": list(record.kc_labels),
        "time": format_timestamp(record.time),
    }


def serialize(records: Iterable[InteractionRecord], format: str) -> str:
    """Serialize records to CSV (11-column header) or JSONL. Deterministic."""
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(_csv_row(record))
        return out.getvalue()
    if format == "jsonl":
        lines = [
            json.dumps(record_to_json_obj(r), separators=(",", ":"), ensure_ascii=False)
            for r in records
        ]
        return "".join(line + "\n" for line in lines)
    raise FormatError(f"unknown log format: {format!r}")


def _trim_labels(record: InteractionRecord) -> InteractionRecord:
    trimmed = tuple(x for x in (label.strip() for label in record.kc_labels) if x)
    if trimmed == record.kc_labels:
        return record
    return replace(record, kc_labels=trimmed)


def normalize_with_summary(
    records: Iterable[InteractionRecord],
) -> tuple[list[InteractionRecord], NormalizeSummary]:
    """Sort by (user_id, time, id), trim kc labels, drop duplicate ids (first wins)."""
    seen: set[str] = set()
    unique: list[InteractionRecord] = []
    total = 0
    for record in records:
        total += 1
        if record.id in seen:
            continue
        seen.add(record.id)
        unique.append(_trim_labels(record))
    unique.sort(key=lambda r: (r.user_id, r.time, r.id))
    summary = NormalizeSummary(
        input_count=total,
        output_count=len(unique),
        duplicates_dropped=total - len(unique),
    )
    return unique, summary


def normalize(records: Iterable[InteractionRecord]) -> list[InteractionRecord]:
    normalized, _ = normalize_with_summary(records)
    return normalized
