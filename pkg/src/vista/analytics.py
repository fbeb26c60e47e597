"""Aggregation payloads for the four coordinated views.

Everything here is a read-only projection of reconstructed attempts:
per-type outcome counts, per-student timelines, per-type step paths, and
single-attempt detail breakdowns. Durations are plain seconds; JSON payload
builders round them to 3 decimals (milliseconds) for stable serialization.

Summation convention: an attempt's total time is always the fold over its
per-step totals, and a step total is the fold over its segment durations, so
totals agree bit-for-bit across views.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Union

from .provenance import Attempt, AttemptKey, AttemptStatus, StepTrace, attempt_id

DURATION_DECIMALS = 3


class NotFound(LookupError):
    pass


def _round(seconds: float) -> float:
    return round(seconds, DURATION_DECIMALS)


def _key_payload(key: AttemptKey) -> dict:
    return {
        "user_id": key.user_id,
        "tutor": key.tutor,
        "interface": key.interface,
        "start_state": key.start_state,
        "start_time": key.start_time.isoformat(),
    }


# ---------------------------------------------------------------------------
# Overview


@dataclass(frozen=True)
class OverviewRow:
    problem_type: str
    correct: int
    incorrect: int
    skipped: int
    skipped_hidden: bool

    def to_payload(self) -> dict:
        return {
            "problem_type": self.problem_type,
            "correct": self.correct,
            "incorrect": self.incorrect,
            "skipped": self.skipped,
            "skipped_hidden": self.skipped_hidden,
        }


def overview(attempts: Iterable[Attempt], include_skipped: bool = True) -> list[OverviewRow]:
    """Per-type outcome counts: complete / incomplete / skipped.

    The skipped count is always computed; ``include_skipped=False`` only
    marks it hidden so a legend toggle needs no recomputation.
    """
    counts: dict[str, list[int]] = {}
    for attempt in attempts:
        row = counts.setdefault(attempt.key.interface, [0, 0, 0])
        if attempt.status is AttemptStatus.COMPLETE:
            row[0] += 1
        elif attempt.status is AttemptStatus.INCOMPLETE:
            row[1] += 1
        else:
            row[2] += 1
    return [
        OverviewRow(
            problem_type=name,
            correct=counts[name][0],
            incorrect=counts[name][1],
            skipped=counts[name][2],
            skipped_hidden=not include_skipped,
        )
        for name in sorted(counts)
    ]


# ---------------------------------------------------------------------------
# Student view


@dataclass(frozen=True)
class SegmentInfo:
    kind: str  # correct | incorrect | hint
    duration: float
    kc: str
    input: str

    def to_payload(self) -> dict:
        return {
            "kind": self.kind,
            "duration": _round(self.duration),
            "kc": self.kc,
            "input": self.input,
        }


@dataclass(frozen=True)
class TimelineStep:
    selection: str
    segments: tuple[SegmentInfo, ...]

    def to_payload(self) -> dict:
        return {
            "selection": self.selection,
            "segments": [s.to_payload() for s in self.segments],
        }


@dataclass(frozen=True)
class TimelineBar:
    key: AttemptKey
    completed: bool
    total_duration: float
    steps: tuple[TimelineStep, ...]

    @property
    def attempt_id(self) -> str:
        return attempt_id(self.key)

    def to_payload(self) -> dict:
        payload = _key_payload(self.key)
        payload.update(
            {
                "attempt_id": self.attempt_id,
                "completed": self.completed,
                "total_duration": _round(self.total_duration),
                "steps": [s.to_payload() for s in self.steps],
            }
        )
        return payload


def _step_infos(step: StepTrace) -> TimelineStep:
    return TimelineStep(
        selection=step.selection,
        segments=tuple(
            SegmentInfo(
                kind=segment.kind.value,
                duration=segment.duration,
                kc=segment.kc,
                input=segment.input,
            )
            for segment in step.segments
        ),
    )


def student_timeline(
    attempts: Iterable[Attempt],
    user_id: str,
    problem_type: Optional[str] = None,
) -> list[TimelineBar]:
    """All attempts of one student as stacked-bar data, earliest first."""
    bars = [
        TimelineBar(
            key=attempt.key,
            completed=attempt.status is AttemptStatus.COMPLETE,
            total_duration=attempt.total_duration,
            steps=tuple(_step_infos(step) for step in attempt.steps),
        )
        for attempt in attempts
        if attempt.key.user_id == user_id
        and (problem_type is None or attempt.key.interface == problem_type)
    ]
    bars.sort(key=lambda bar: (bar.key.start_time, bar.attempt_id))
    return bars


# ---------------------------------------------------------------------------
# Problem Type view


@dataclass(frozen=True)
class PathPoint:
    step_index: int
    cumulative_time: float

    def to_payload(self) -> dict:
        return {
            "step_index": self.step_index,
            "cumulative_time": _round(self.cumulative_time),
        }


@dataclass(frozen=True)
class StepPath:
    key: AttemptKey
    points: tuple[PathPoint, ...]
    terminal: str  # complete | incomplete

    @property
    def attempt_id(self) -> str:
        return attempt_id(self.key)

    @property
    def final_cumulative_time(self) -> float:
        return self.points[-1].cumulative_time if self.points else 0.0

    def to_payload(self) -> dict:
        payload = _key_payload(self.key)
        payload.update(
            {
                "attempt_id": self.attempt_id,
                "points": [p.to_payload() for p in self.points],
                "terminal": self.terminal,
            }
        )
        return payload


class ProblemTypePaths(NamedTuple):
    step_order: list[str]
    paths: list[StepPath]

    def to_payload(self) -> dict:
        return {
            "step_order": list(self.step_order),
            "paths": [p.to_payload() for p in self.paths],
        }


def canonical_step_order(attempts: Iterable[Attempt], problem_type: str) -> list[str]:
    """Step sequence of the earliest complete attempt of the type, then any
    unseen steps appended in first-occurrence order across attempts."""
    of_type = sorted(
        (a for a in attempts if a.key.interface == problem_type),
        key=lambda a: (a.key.start_time, attempt_id(a.key)),
    )
    order: list[str] = []
    seen: set[str] = set()
    for attempt in of_type:
        if attempt.status is AttemptStatus.COMPLETE:
            for step in attempt.steps:
                order.append(step.selection)
                seen.add(step.selection)
            break
    for attempt in of_type:
        for step in attempt.steps:
            if step.selection not in seen:
                order.append(step.selection)
                seen.add(step.selection)
    return order


def _path_for(attempt: Attempt, index_of: dict[str, int]) -> StepPath:
    points: list[PathPoint] = []
    cumulative = 0.0
    for step in attempt.steps:
        cumulative = cumulative + step.duration
        points.append(
            PathPoint(step_index=index_of[step.selection], cumulative_time=cumulative)
        )
    terminal = "complete" if attempt.status is AttemptStatus.COMPLETE else "incomplete"
    return StepPath(key=attempt.key, points=tuple(points), terminal=terminal)


def problem_type_paths(attempts: Iterable[Attempt], problem_type: str) -> ProblemTypePaths:
    """Step-line-chart paths of every attempt of one problem type."""
    attempts = list(attempts)
    order = canonical_step_order(attempts, problem_type)
    index_of = {selection: i for i, selection in enumerate(order)}
    of_type = sorted(
        (a for a in attempts if a.key.interface == problem_type),
        key=lambda a: (a.key.start_time, attempt_id(a.key)),
    )
    return ProblemTypePaths(
        step_order=order,
        paths=[_path_for(a, index_of) for a in of_type],
    )


# ---------------------------------------------------------------------------
# Details view


@dataclass(frozen=True)
class DetailStep:
    selection: str
    step_index: int
    segments: tuple[SegmentInfo, ...]

    def to_payload(self) -> dict:
        return {
            "selection": self.selection,
            "step_index": self.step_index,
            "segments": [s.to_payload() for s in self.segments],
        }


@dataclass(frozen=True)
class DetailPath:
    key: AttemptKey
    points: tuple[PathPoint, ...]
    terminal: str
    steps: tuple[DetailStep, ...]
    step_order: tuple[str, ...]
    total_duration: float

    @property
    def attempt_id(self) -> str:
        return attempt_id(self.key)

    @property
    def final_cumulative_time(self) -> float:
        return self.points[-1].cumulative_time if self.points else 0.0

    def to_payload(self) -> dict:
        payload = _key_payload(self.key)
        payload.update(
            {
                "attempt_id": self.attempt_id,
                "points": [p.to_payload() for p in self.points],
                "terminal": self.terminal,
                "steps": [s.to_payload() for s in self.steps],
                "step_order": list(self.step_order),
                "total_duration": _round(self.total_duration),
            }
        )
        return payload


def attempt_details(
    attempts: Iterable[Attempt], attempt_key: Union[AttemptKey, str]
) -> DetailPath:
    """Path plus per-step segment breakdown for one attempt.

    ``attempt_key`` may be the key itself or its derived id string. Raises
    :class:`NotFound` for an unknown key.
    """
    attempts = list(attempts)
    wanted_id = attempt_key if isinstance(attempt_key, str) else attempt_id(attempt_key)
    target = next((a for a in attempts if attempt_id(a.key) == wanted_id), None)
    if target is None:
        raise NotFound(f"unknown attempt: {wanted_id}")
    order = canonical_step_order(attempts, target.key.interface)
    index_of = {selection: i for i, selection in enumerate(order)}
    path = _path_for(target, index_of)
    steps = tuple(
        DetailStep(
            selection=step.selection,
            step_index=index_of[step.selection],
            segments=_step_infos(step).segments,
        )
        for step in target.steps
    )
    return DetailPath(
        key=target.key,
        points=path.points,
        terminal=path.terminal,
        steps=steps,
        step_order=tuple(order),
        total_duration=target.total_duration,
    )
