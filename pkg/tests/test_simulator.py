from __future__ import annotations

import random
from collections import Counter

import pytest

from vista.bkt import BktParams, ConfigError
from vista.events import Action, normalize, parse_log, serialize
from vista.provenance import AttemptStatus, reconstruct
from vista.simulator import (
    LatencyModel,
    ProblemTypeSpec,
    SimProfile,
    StepSpec,
    TutorSpec,
    demo_profiles,
    demo_tutor,
    generate_problem,
    simulate,
    simulate_with_truth,
)


def _profile(**kwargs) -> SimProfile:
    base = dict(
        user_id="stu001",
        default_params=BktParams(p_init=0.3, p_transit=0.1, p_guess=0.15, p_slip=0.1),
        hint_propensity=0.1,
        latency=LatencyModel(5.0, 0.5),
        abandon_probability=0.05,
    )
    base.update(kwargs)
    return SimProfile(**base)


def _mastered_profile(**kwargs) -> SimProfile:
    base = dict(
        default_params=BktParams(p_init=1.0, p_transit=0.0, p_guess=0.2, p_slip=0.0),
        hint_propensity=0.0,
        abandon_probability=0.0,
    )
    base.update(kwargs)
    return _profile(**base)


class TestSpecs:
    def test_step_requires_kc(self):
        with pytest.raises(ConfigError):
            StepSpec("b", ())

    def test_type_requires_steps(self):
        with pytest.raises(ConfigError):
            ProblemTypeSpec("empty", ())

    def test_duplicate_type_names(self):
        pt = demo_tutor().problem_types[0]
        with pytest.raises(ConfigError):
            TutorSpec("t", (pt, pt))

    def test_kc_map_covers_all_steps(self):
        tutor = demo_tutor()
        kc_map = tutor.kc_map()
        assert set(kc_map) == {pt.name for pt in tutor.problem_types}
        assert all(kcs for kcs in kc_map.values())


class TestProblemGeneration:
    def test_deterministic_per_seed(self):
        pt = demo_tutor().problem_types[0]
        a = generate_problem(pt, random.Random(3))
        b = generate_problem(pt, random.Random(3))
        assert a == b

    def test_monic_answers_cover_steps(self):
        pt = demo_tutor().problem_types[0]
        problem = generate_problem(pt, random.Random(1))
        assert problem.text.startswith("x^2")
        for step in pt.steps:
            assert step.selection in problem.answers

    def test_unknown_family_rejected(self):
        pt = ProblemTypeSpec("x", (StepSpec("s", ("k",)),), family="martian")
        with pytest.raises(ConfigError):
            generate_problem(pt, random.Random(0))


class TestSimulate:
    def test_mastered_student_completes_everything(self):
        records = simulate([_mastered_profile()], demo_tutor(), 4, seed=1, adaptive=False)
        attempts = reconstruct(normalize(records)).attempts
        assert attempts
        assert all(a.status is AttemptStatus.COMPLETE for a in attempts)
        kinds = {
            seg.kind.value for a in attempts for step in a.steps for seg in step.segments
        }
        assert kinds == {"correct"}

    def test_abandon_one_leaves_nothing_past_first_step(self):
        records = simulate(
            [_profile(abandon_probability=1.0)], demo_tutor(), 5, seed=2, adaptive=False
        )
        attempts = reconstruct(normalize(records)).attempts
        assert attempts
        for attempt in attempts:
            assert attempt.status in (AttemptStatus.INCOMPLETE, AttemptStatus.SKIPPED)
            assert len(attempt.steps) <= 1

    def test_seeded_runs_are_byte_identical(self):
        profiles = demo_profiles(10)
        a = simulate(profiles, demo_tutor(), 3, seed=42)
        b = simulate(profiles, demo_tutor(), 3, seed=42)
        assert serialize(a, "csv") == serialize(b, "csv")
        assert serialize(a, "jsonl") == serialize(b, "jsonl")

    def test_different_seeds_differ(self):
        profiles = demo_profiles(5)
        a = simulate(profiles, demo_tutor(), 3, seed=1)
        b = simulate(profiles, demo_tutor(), 3, seed=2)
        assert serialize(a, "csv") != serialize(b, "csv")

    def test_closed_loop_with_parser_and_provenance(self, seed7_records):
        text = serialize(seed7_records, "jsonl")
        parsed, errors = parse_log(text, "jsonl")
        assert errors == []
        result = reconstruct(normalize(parsed))
        assert result.warnings == []

    def test_hint_tiers_escalate_and_third_forces_correct(self):
        profile = _profile(
            hint_propensity=1.0,
            abandon_probability=0.0,
            default_params=BktParams(p_init=0.0, p_transit=0.0, p_guess=0.0, p_slip=0.5),
        )
        tutor = TutorSpec("t", (ProblemTypeSpec("only", (StepSpec("s1", ("k1",)),)),))
        records = simulate([profile], tutor, 1, seed=3, adaptive=False)
        hints = [r for r in records if r.action is Action.HINT_REQUEST]
        assert [r.input for r in hints] == ["hint:1", "hint:2", "hint:3"]
        inputs = [r for r in records if r.action is Action.INPUT]
        assert len(inputs) == 1 and inputs[0].correctness.value == "correct"
        assert records[-1].action is Action.DONE

    def test_complete_fraction_monotone_in_abandon(self):
        fractions = []
        for abandon in (0.0, 0.2, 0.5, 1.0):
            profiles = [
                _mastered_profile(user_id=f"stu{i+1:03d}", abandon_probability=abandon)
                for i in range(30)
            ]
            attempts = reconstruct(
                normalize(simulate(profiles, demo_tutor(), 4, seed=7, adaptive=False))
            ).attempts
            complete = sum(1 for a in attempts if a.status is AttemptStatus.COMPLETE)
            fractions.append(complete / len(attempts))
        assert all(a >= b for a, b in zip(fractions, fractions[1:]))
        assert fractions[0] == 1.0 and fractions[-1] == 0.0

    def test_adaptive_mode_stops_after_mastery(self):
        # a quick learner masters the estimator well before the attempt budget
        profile = _profile(
            default_params=BktParams(p_init=0.85, p_transit=0.4, p_guess=0.2, p_slip=0.02),
            hint_propensity=0.0,
            abandon_probability=0.0,
        )
        records = simulate([profile], demo_tutor(), 50, seed=4, adaptive=True)
        attempts = reconstruct(normalize(records)).attempts
        assert 0 < len(attempts) < 50

    def test_adaptive_mode_skips_generation_when_already_mastered(self):
        # estimator starts at p_init=1.0, so no attempt is ever selected
        records = simulate([_mastered_profile()], demo_tutor(), 50, seed=4, adaptive=True)
        assert records == []

    def test_adaptive_mode_prefers_unmastered_coverage(self):
        # first pick is the type covering the most unmastered KCs (4-way tie
        # on count, so the lexicographically first name)
        records = simulate([_profile()], demo_tutor(), 1, seed=5, adaptive=True)
        assert records[0].interface == "area_box_method"

    def test_truth_reported_per_user_and_kc(self):
        result = simulate_with_truth(demo_profiles(3), demo_tutor(), 2, seed=6)
        kcs = set(demo_tutor().all_kcs())
        users = {p.user_id for p in demo_profiles(3)}
        assert {(u, k) for u, k in result.final_knowledge} == {
            (u, k) for u in users for k in kcs
        }

    def test_timestamps_strictly_increase_per_user(self, seed7_records):
        by_user: dict[str, list] = {}
        for record in seed7_records:
            by_user.setdefault(record.user_id, []).append(record.time)
        for times in by_user.values():
            assert all(a < b for a, b in zip(times, times[1:]))

    def test_demo_corpus_is_desk_scale(self, seed7_records):
        assert len(seed7_records) >= 10_000
        statuses = Counter(
            a.status for a in reconstruct(normalize(seed7_records)).attempts
        )
        assert all(statuses[s] > 0 for s in AttemptStatus)
