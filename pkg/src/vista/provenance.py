"""Reconstruct problem attempts, steps, and timed segments from normalized records.

An attempt opens at a ``start_problem`` event (or implicitly at the first
event of a (user, tutor, interface, start_state) run) and closes at ``done``,
at the next start for the same key fields, or at end of corpus. Each graded
input or hint request becomes one timed :class:`Segment`; segments group into
:class:`StepTrace` by input-box selection.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Iterable, Iterator, NamedTuple

from .events import Action, Correctness, InteractionRecord

DEFAULT_IDLE_CAP = 600.0


class SegmentKind(str, Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    HINT = "hint"


class AttemptStatus(str, Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class AttemptKey:
    """Identity of one attempt; start_time separates repeats of the same problem."""

    user_id: str
    tutor: str
    interface: str
    start_state: str
    start_time: datetime


def attempt_id(key: AttemptKey) -> str:
    """Stable URL-safe identifier derived from the key fields."""
    raw = "\x1f".join(
        (key.user_id, key.tutor, key.interface, key.start_state, key.start_time.isoformat())
    )
    return hashlib.sha1(raw.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Segment:
    """One timed interaction: kind, wall-clock duration, raw input, primary KC."""

    kind: SegmentKind
    duration: float
    input: str
    kc: str
    at: datetime
    clamped: bool = False


@dataclass(frozen=True)
class StepTrace:
    selection: str
    kc_labels: tuple[str, ...]
    segments: tuple[Segment, ...]

    @property
    def resolved(self) -> bool:
        """True when the step's final graded input was correct."""
        for segment in reversed(self.segments):
            if segment.kind is not SegmentKind.HINT:
                return segment.kind is SegmentKind.CORRECT
        return False

    @property
    def duration(self) -> float:
        return sum(segment.duration for segment in self.segments)


@dataclass(frozen=True)
class Attempt:
    key: AttemptKey
    steps: tuple[StepTrace, ...]
    done_logged: bool
    status: AttemptStatus
    total_duration: float

    @property
    def id(self) -> str:
        return attempt_id(self.key)

    def chronological_segments(self) -> list[tuple[StepTrace, Segment]]:
        """All (step, segment) pairs ordered by timestamp (stable over step order)."""
        pairs = [(step, segment) for step in self.steps for segment in step.segments]
        pairs.sort(key=lambda pair: pair[1].at)
        return pairs


@dataclass(frozen=True)
class ReconstructionWarning:
    record_id: str
    reason: str


class ReconstructionResult(NamedTuple):
    attempts: list[Attempt]
    warnings: list[ReconstructionWarning]


def classify(attempt: Attempt) -> AttemptStatus:
    """Classify an attempt from its events alone (pure; recomputable)."""
    if not attempt.steps:
        return AttemptStatus.SKIPPED
    if attempt.done_logged and all(step.resolved for step in attempt.steps):
        return AttemptStatus.COMPLETE
    return AttemptStatus.INCOMPLETE


class _OpenAttempt:
    __slots__ = ("user_id", "tutor", "interface", "start_state", "start_time",
                 "last_time", "steps", "done_logged")

    def __init__(self, record: InteractionRecord):
        self.user_id = record.user_id
        self.tutor = record.tutor
        self.interface = record.interface
        self.start_state = record.start_state
        self.start_time = record.time
        self.last_time = record.time
        # selection -> (kc_labels, [segments])
        self.steps: dict[str, tuple[tuple[str, ...], list[Segment]]] = {}
        self.done_logged = False

    def add_segment(self, record: InteractionRecord, idle_cap: float) -> None:
        raw = (record.time - self.last_time).total_seconds()
        duration = max(0.0, raw)
        clamped = duration > idle_cap
        if clamped:
            duration = idle_cap
        self.last_time = record.time
        if record.action is Action.HINT_REQUEST:
            kind = SegmentKind.HINT
        elif record.correctness is Correctness.CORRECT:
            kind = SegmentKind.CORRECT
        else:
            kind = SegmentKind.INCORRECT
        segment = Segment(
            kind=kind,
            duration=duration,
            input=record.input,
            kc=record.kc_labels[0] if record.kc_labels else "",
            at=record.time,
            clamped=clamped,
        )
        existing = self.steps.get(record.selection)
        if existing is None:
            self.steps[record.selection] = (record.kc_labels, [segment])
        else:
            labels, segments = existing
            if not labels and record.kc_labels:
                self.steps[record.selection] = (record.kc_labels, segments)
            segments.append(segment)

    def build(self) -> Attempt:
        steps = tuple(
            StepTrace(selection=sel, kc_labels=labels, segments=tuple(segments))
            for sel, (labels, segments) in self.steps.items()
        )
        attempt = Attempt(
            key=AttemptKey(
                user_id=self.user_id,
                tutor=self.tutor,
                interface=self.interface,
                start_state=self.start_state,
                start_time=self.start_time,
            ),
            steps=steps,
            done_logged=self.done_logged,
            status=AttemptStatus.INCOMPLETE,
            total_duration=sum(step.duration for step in steps),
        )
        return replace(attempt, status=classify(attempt))


def reconstruct(
    records: Iterable[InteractionRecord], idle_cap: float = DEFAULT_IDLE_CAP
) -> ReconstructionResult:
    """Partition normalized records into attempts.

    Returns attempts sorted by (user_id, start_time, tutor, interface,
    start_state) plus warnings for events that could not be placed.
    """
    open_attempts: dict[tuple[str, str, str, str], _OpenAttempt] = {}
    finished: list[Attempt] = []
    warnings: list[ReconstructionWarning] = []

    for record in records:
        key = (record.user_id, record.tutor, record.interface, record.start_state)
        if record.action is Action.START_PROBLEM:
            stale = open_attempts.pop(key, None)
            if stale is not None:
                finished.append(stale.build())
            open_attempts[key] = _OpenAttempt(record)
        elif record.action is Action.DONE:
            open_attempt = open_attempts.pop(key, None)
            if open_attempt is None:
                warnings.append(
                    ReconstructionWarning(record.id, "done without an open attempt")
                )
                continue
            open_attempt.done_logged = True
            finished.append(open_attempt.build())
        else:
            open_attempt = open_attempts.get(key)
            if open_attempt is None:
                open_attempt = _OpenAttempt(record)
                open_attempts[key] = open_attempt
            open_attempt.add_segment(record, idle_cap)

    finished.extend(oa.build() for oa in open_attempts.values())
    finished.sort(
        key=lambda a: (a.key.user_id, a.key.start_time, a.key.tutor,
                       a.key.interface, a.key.start_state)
    )
    return ReconstructionResult(finished, warnings)


def reconstruct_attempts(
    records: Iterable[InteractionRecord], idle_cap: float = DEFAULT_IDLE_CAP
) -> list[Attempt]:
    return reconstruct(records, idle_cap).attempts


def iter_observations(attempts: Iterable[Attempt]) -> Iterator[tuple[str, tuple[str, ...]]]:
    """Yield (segment kind, step kc_labels) per graded/hint event in time order."""
    for attempt in attempts:
        for step, segment in attempt.chronological_segments():
            yield segment.kind.value, step.kc_labels
