#!/usr/bin/env python3
"""Regenerate the golden view payloads under test/fixtures from the seed-7 corpus.

Run from the repository root (the backend package must be importable):

    python3 frontend/scripts/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from vista.events import normalize
from vista.provenance import reconstruct
from vista.service import (
    details_payload,
    overview_payload,
    paths_payload,
    problem_types_payload,
    query_payload,
    students_payload,
    timeline_payload,
)
from vista.service import CorpusSnapshot
from vista.simulator import demo_corpus

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def build_snapshot() -> CorpusSnapshot:
    records = normalize(demo_corpus(seed=7))
    attempts = tuple(reconstruct(records).attempts)
    return CorpusSnapshot(
        version=1,
        records=tuple(records),
        attempts=attempts,
        attempts_by_id={a.id: a for a in attempts},
        users=tuple(sorted({r.user_id for r in records})),
        problem_types=tuple(sorted({a.key.interface for a in attempts})),
    )


def pick_showcase_student(snapshot: CorpusSnapshot) -> str:
    """A student with hints, several attempts, and at least one completion."""
    best, best_hints = None, -1
    for user in snapshot.users:
        bars = timeline_payload(snapshot, user, None)
        if len(bars) < 3 or not any(b["completed"] for b in bars):
            continue
        hints = sum(
            1 for b in bars for s in b["steps"] for seg in s["segments"]
            if seg["kind"] == "hint"
        )
        if hints > best_hints:
            best, best_hints = user, hints
    assert best is not None
    return best


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    snapshot = build_snapshot()

    def dump(name: str, payload) -> None:
        (FIXTURE_DIR / name).write_text(
            json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )

    dump("overview.json", overview_payload(snapshot, True))
    dump("overview_hidden.json", overview_payload(snapshot, False))
    dump("students.json", students_payload(snapshot))
    dump("problem_types.json", problem_types_payload(snapshot))

    student = pick_showcase_student(snapshot)
    dump("timeline.json", timeline_payload(snapshot, student, None))

    problem_type = snapshot.problem_types[0]
    paths = paths_payload(snapshot, problem_type)
    dump("paths.json", paths)

    attempt_id = paths["paths"][0]["attempt_id"]
    dump("details.json", details_payload(snapshot, attempt_id))

    dump("query.json", query_payload(snapshot, "I{3,}", "attempt", False))
    dump(
        "meta.json",
        {"student": student, "problem_type": problem_type, "attempt_id": attempt_id},
    )
    print(f"wrote fixtures for student={student} type={problem_type} attempt={attempt_id}")


if __name__ == "__main__":
    main()
