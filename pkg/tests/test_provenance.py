from __future__ import annotations

import random
from collections import Counter
from datetime import datetime, timedelta, timezone

from vista.events import Action, Correctness, InteractionRecord, normalize
from vista.provenance import (
    AttemptStatus,
    SegmentKind,
    classify,
    reconstruct,
    reconstruct_attempts,
)

T0 = datetime(2024, 1, 9, 10, 0, 0, tzinfo=timezone.utc)


def _rec(id, action, at, selection="", input="", correctness=Correctness.NOT_APPLICABLE,
         kcs=(), user="stu01", interface="leading_coeff_1", state="x^2-5x+4"):
    return InteractionRecord(
        id=str(id), user_id=user, tutor="factoring", interface=interface,
        start_state=state, selection=selection, action=action, input=input,
        correctness=correctness, kc_labels=tuple(kcs), time=at,
    )


def _start(id, at, **kw):
    return _rec(id, Action.START_PROBLEM, at, **kw)


def _input(id, at, selection, value, correct, kcs, **kw):
    return _rec(id, Action.INPUT, at, selection=selection, input=value,
                correctness=Correctness.CORRECT if correct else Correctness.INCORRECT,
                kcs=kcs, **kw)


def _hint(id, at, selection, tier, kcs, **kw):
    return _rec(id, Action.HINT_REQUEST, at, selection=selection,
                input=f"hint:{tier}", kcs=kcs, **kw)


def _done(id, at, **kw):
    return _rec(id, Action.DONE, at, correctness=Correctness.CORRECT, **kw)


def test_walkthrough_pair_two_steps():
    records = [
        _start(1, T0),
        _input(2, T0 + timedelta(seconds=5), "b", "-5", True, ["identify-b"]),
        _input(3, T0 + timedelta(seconds=12), "c", "-4", False, ["identify-c"]),
    ]
    (attempt,), warnings = reconstruct(records)
    assert warnings == []
    assert [s.selection for s in attempt.steps] == ["b", "c"]
    step_b, step_c = attempt.steps
    assert step_b.resolved and not step_c.resolved
    assert attempt.status is AttemptStatus.INCOMPLETE


def test_start_with_no_interactions_is_skipped():
    (attempt,) = reconstruct_attempts([_start(1, T0)])
    assert attempt.status is AttemptStatus.SKIPPED
    assert attempt.steps == ()
    assert attempt.total_duration == 0.0


def test_segment_durations_from_timestamps():
    records = [
        _start(1, T0),
        _input(2, T0 + timedelta(seconds=5), "b", "-5", True, ["identify-b"]),
        _input(3, T0 + timedelta(seconds=12), "c", "-4", True, ["identify-c"]),
    ]
    (attempt,) = reconstruct_attempts(records)
    durations = [seg.duration for step in attempt.steps for seg in step.segments]
    assert durations == [5.0, 7.0]
    assert attempt.total_duration == 12.0


def test_complete_requires_done_and_all_resolved():
    base = [
        _start(1, T0),
        _input(2, T0 + timedelta(seconds=5), "b", "-5", True, ["identify-b"]),
        _input(3, T0 + timedelta(seconds=9), "c", "4", True, ["identify-c"]),
    ]
    (no_done,) = reconstruct_attempts(base)
    assert no_done.status is AttemptStatus.INCOMPLETE

    (with_done,) = reconstruct_attempts(base + [_done(4, T0 + timedelta(seconds=11))])
    assert with_done.status is AttemptStatus.COMPLETE
    assert classify(with_done) is AttemptStatus.COMPLETE


def test_done_after_unresolved_step_stays_incomplete():
    records = [
        _start(1, T0),
        _input(2, T0 + timedelta(seconds=5), "b", "9", False, ["identify-b"]),
        _done(3, T0 + timedelta(seconds=8)),
    ]
    (attempt,) = reconstruct_attempts(records)
    assert attempt.done_logged
    assert attempt.status is AttemptStatus.INCOMPLETE


def test_retry_then_correct_resolves_step():
    records = [
        _start(1, T0),
        _input(2, T0 + timedelta(seconds=3), "b", "9", False, ["identify-b"]),
        _hint(3, T0 + timedelta(seconds=6), "b", 1, ["identify-b"]),
        _input(4, T0 + timedelta(seconds=10), "b", "-5", True, ["identify-b"]),
    ]
    (attempt,) = reconstruct_attempts(records)
    (step,) = attempt.steps
    assert [seg.kind for seg in step.segments] == [
        SegmentKind.INCORRECT, SegmentKind.HINT, SegmentKind.CORRECT,
    ]
    assert step.resolved
    # hint time counts toward the step and attempt totals
    assert attempt.total_duration == 10.0


def test_orphan_done_warns_and_drops():
    attempts, warnings = reconstruct([_done(1, T0)])
    assert attempts == []
    assert len(warnings) == 1
    assert warnings[0].record_id == "1"


def test_new_start_force_closes_same_key():
    records = [
        _start(1, T0),
        _input(2, T0 + timedelta(seconds=4), "b", "-5", True, ["identify-b"]),
        _start(3, T0 + timedelta(seconds=60)),
        _input(4, T0 + timedelta(seconds=64), "b", "-5", True, ["identify-b"]),
    ]
    first, second = reconstruct_attempts(records)
    assert first.key.start_time == T0
    assert first.status is AttemptStatus.INCOMPLETE
    assert second.key.start_time == T0 + timedelta(seconds=60)


def test_run_without_start_opens_implicit_attempt():
    records = [
        _input(1, T0, "b", "-5", True, ["identify-b"]),
        _input(2, T0 + timedelta(seconds=6), "c", "4", True, ["identify-c"]),
        _done(3, T0 + timedelta(seconds=8)),
    ]
    (attempt,), warnings = reconstruct(records)
    assert warnings == []
    assert attempt.key.start_time == T0
    # first event is its own baseline
    assert attempt.steps[0].segments[0].duration == 0.0
    assert attempt.status is AttemptStatus.COMPLETE


def test_idle_cap_clamps_and_flags():
    records = [
        _start(1, T0),
        _input(2, T0 + timedelta(seconds=5000), "b", "-5", True, ["identify-b"]),
    ]
    (attempt,) = reconstruct_attempts(records, idle_cap=600.0)
    segment = attempt.steps[0].segments[0]
    assert segment.duration == 600.0
    assert segment.clamped
    assert attempt.total_duration == 600.0


def test_interleaved_problems_for_one_student():
    records = [
        _start(1, T0, state="x^2-5x+4"),
        _start(2, T0 + timedelta(seconds=1), state="x^2+2x+1"),
        _input(3, T0 + timedelta(seconds=5), "b", "-5", True, ["identify-b"], state="x^2-5x+4"),
        _input(4, T0 + timedelta(seconds=9), "b", "2", True, ["identify-b"], state="x^2+2x+1"),
        _done(5, T0 + timedelta(seconds=12), state="x^2-5x+4"),
    ]
    attempts = reconstruct_attempts(normalize(records))
    assert len(attempts) == 2
    by_state = {a.key.start_state: a for a in attempts}
    assert by_state["x^2-5x+4"].status is AttemptStatus.COMPLETE
    assert by_state["x^2+2x+1"].status is AttemptStatus.INCOMPLETE


class TestCorpusProperties:
    def test_partition(self, seed7_attempts):
        counts = Counter(a.status for a in seed7_attempts)
        assert sum(counts.values()) == len(seed7_attempts)
        assert set(counts) <= {AttemptStatus.COMPLETE, AttemptStatus.INCOMPLETE, AttemptStatus.SKIPPED}
        # the demo corpus exercises all three classes
        assert all(counts[s] > 0 for s in (
            AttemptStatus.COMPLETE, AttemptStatus.INCOMPLETE, AttemptStatus.SKIPPED))

    def test_permutation_stability(self, seed7_records, seed7_attempts):
        shuffled = list(seed7_records)
        random.Random(123).shuffle(shuffled)
        assert reconstruct_attempts(normalize(shuffled)) == list(seed7_attempts)

    def test_total_duration_consistency(self, seed7_attempts):
        for attempt in seed7_attempts:
            assert attempt.total_duration == sum(step.duration for step in attempt.steps)

    def test_every_event_in_exactly_one_segment(self, seed7_normalized, seed7_attempts):
        graded = [r for r in seed7_normalized if r.action in (Action.INPUT, Action.HINT_REQUEST)]
        segments = [seg for a in seed7_attempts for step in a.steps for seg in step.segments]
        assert len(segments) == len(graded)
        # timestamps pair off exactly (per user, all events are distinct instants)
        assert sorted((s.at for s in segments)) == sorted(r.time for r in graded)

    def test_classify_matches_status(self, seed7_attempts):
        for attempt in seed7_attempts:
            assert classify(attempt) is attempt.status

    def test_resolved_steps_end_correct(self, seed7_attempts):
        for attempt in seed7_attempts:
            for step in attempt.steps:
                graded = [s for s in step.segments if s.kind is not SegmentKind.HINT]
                if step.resolved:
                    assert graded and graded[-1].kind is SegmentKind.CORRECT
