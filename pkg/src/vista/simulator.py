"""Synthetic interaction-log generator driven by ground-truth student models.

Each simulated student has a binary latent knowledge state per KC. Observable
correctness is sampled through guess/slip; the latent state transitions with
p_transit after every practice opportunity. Hint tiers escalate 1..3 within a
step and tier 3 forces the next input correct. Runs are reproducible from the
seed: one RNG stream per student, derived deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from itertools import count
from random import Random
from typing import Mapping, NamedTuple, Sequence

from . import bkt
from .bkt import ALL_MASTERED, BktParams, ConfigError, MasteryState
from .events import Action, Correctness, InteractionRecord

DEFAULT_START = datetime(2024, 1, 8, 9, 0, 0, tzinfo=timezone.utc)
MAX_HINT_TIER = 3


@dataclass(frozen=True)
class StepSpec:
    selection: str
    kc_labels: tuple[str, ...]

    def __post_init__(self):
        if not self.selection:
            raise ConfigError("step selection must be non-empty")
        if not self.kc_labels:
            raise ConfigError(f"step {self.selection!r} must carry at least one KC")


@dataclass(frozen=True)
class ProblemTypeSpec:
    name: str
    steps: tuple[StepSpec, ...]
    family: str = "generic"  # problem-text generator family

    def __post_init__(self):
        if not self.steps:
            raise ConfigError(f"problem type {self.name!r} must have steps")


@dataclass(frozen=True)
class TutorSpec:
    name: str
    problem_types: tuple[ProblemTypeSpec, ...]

    def __post_init__(self):
        if not self.problem_types:
            raise ConfigError("tutor needs at least one problem type")
        names = [pt.name for pt in self.problem_types]
        if len(set(names)) != len(names):
            raise ConfigError("problem type names must be unique")

    def kc_map(self) -> dict[str, list[str]]:
        return {
            pt.name: [kc for step in pt.steps for kc in step.kc_labels]
            for pt in self.problem_types
        }

    def all_kcs(self) -> list[str]:
        seen: dict[str, None] = {}
        for pt in self.problem_types:
            for step in pt.steps:
                for kc in step.kc_labels:
                    seen.setdefault(kc)
        return list(seen)


@dataclass(frozen=True)
class LatencyModel:
    """Log-normal think time: median seconds and log-space sigma."""

    median_seconds: float
    sigma: float

    def __post_init__(self):
        if self.median_seconds <= 0:
            raise ConfigError("latency median must be > 0")
        if self.sigma < 0:
            raise ConfigError("latency sigma must be >= 0")

    def sample(self, rng: Random) -> float:
        seconds = self.median_seconds * math.exp(self.sigma * rng.gauss(0.0, 1.0))
        return max(0.001, round(seconds, 3))


@dataclass(frozen=True)
class SimProfile:
    user_id: str
    kc_params: Mapping[str, BktParams] = field(default_factory=dict)
    default_params: BktParams = bkt.DEFAULT_PARAMS
    hint_propensity: float = 0.1
    latency: LatencyModel = LatencyModel(6.0, 0.6)
    abandon_probability: float = 0.05

    def __post_init__(self):
        for name in ("hint_propensity", "abandon_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")

    def params_for(self, kc: str) -> BktParams:
        return self.kc_params.get(kc, self.default_params)


class SimulationResult(NamedTuple):
    records: list[InteractionRecord]
    final_knowledge: dict[tuple[str, str], bool]  # (user_id, kc) -> ended known


# ---------------------------------------------------------------------------
# Problem text generators


@dataclass(frozen=True)
class GeneratedProblem:
    text: str
    answers: Mapping[str, str]


def _term(value: int, suffix: str) -> str:
    if value == 0:
        return ""
    sign = "+" if value > 0 else "-"
    return f"{sign}{abs(value)}{suffix}"


def _signed(value: int) -> str:
    return f"+{value}" if value >= 0 else str(value)


def _nonzero(rng: Random, low: int, high: int) -> int:
    while True:
        value = rng.randint(low, high)
        if value != 0:
            return value


def _gen_factor_monic(rng: Random) -> GeneratedProblem:
    r1 = _nonzero(rng, -9, 9)
    r2 = _nonzero(rng, -9, 9)
    b = -(r1 + r2)
    c = r1 * r2
    text = "x^2" + _term(b, "x") + _term(c, "")
    return GeneratedProblem(
        text=text,
        answers={
            "b": str(b),
            "c": str(c),
            "first_factor": f"(x{_signed(-r1)})",
            "second_factor": f"(x{_signed(-r2)})",
        },
    )


def _gen_factor_grouping(rng: Random) -> GeneratedProblem:
    # a x^2 + (ap+n) x + pn = (ax+n)(x+p)
    a = rng.choice([2, 3])
    p = _nonzero(rng, -5, 5)
    n = _nonzero(rng, -5, 5)
    m = a * p
    b = m + n
    c = p * n
    text = f"{a}x^2" + _term(b, "x") + _term(c, "")
    return GeneratedProblem(
        text=text,
        answers={
            "product_term": str(a * c),
            "split_b": f"{m},{n}",
            "group_factor": f"(x{_signed(p)})",
            "final_factors": f"({a}x{_signed(n)})(x{_signed(p)})",
        },
    )


def _gen_area_box(rng: Random) -> GeneratedProblem:
    base = _gen_factor_monic(rng)
    return GeneratedProblem(
        text=base.text,
        answers={
            "width_terms": base.answers["b"],
            "area_terms": base.answers["c"],
            "box_fill": base.answers["c"],
            "read_factors": base.answers["first_factor"] + base.answers["second_factor"],
        },
    )


def _gen_generic(rng: Random) -> GeneratedProblem:
    return GeneratedProblem(text=f"expr-{rng.randrange(10_000, 99_999)}", answers={})


_FAMILIES = {
    "factor_monic": _gen_factor_monic,
    "factor_grouping": _gen_factor_grouping,
    "area_box": _gen_area_box,
    "generic": _gen_generic,
}


def generate_problem(ptype: ProblemTypeSpec, rng: Random) -> GeneratedProblem:
    family = _FAMILIES.get(ptype.family)
    if family is None:
        raise ConfigError(f"unknown problem family: {ptype.family!r}")
    return family(rng)


def _answer_for(problem: GeneratedProblem, selection: str, rng: Random) -> str:
    known = problem.answers.get(selection)
    return known if known is not None else str(rng.randrange(2, 99))


def _wrong_value(correct: str, rng: Random) -> str:
    try:
        value = int(correct)
    except ValueError:
        digit_positions = [i for i, ch in enumerate(correct) if ch.isdigit()]
        if digit_positions:
            i = rng.choice(digit_positions)
            replacement = str((int(correct[i]) + rng.randint(1, 8)) % 10)
            return correct[:i] + replacement + correct[i + 1:]
        return correct + str(rng.randint(1, 9))
    delta = rng.choice([-3, -2, -1, 1, 2, 3])
    return str(value + delta)


# ---------------------------------------------------------------------------
# Simulation


class _Emitter:
    def __init__(self, ids: count, tutor_name: str):
        self.ids = ids
        self.tutor_name = tutor_name
        self.records: list[InteractionRecord] = []

    def emit(
        self,
        at: datetime,
        user_id: str,
        interface: str,
        start_state: str,
        action: Action,
        selection: str = "",
        input_value: str = "",
        correctness: Correctness = Correctness.NOT_APPLICABLE,
        kc_labels: tuple[str, ...] = (),
    ) -> None:
        self.records.append(
            InteractionRecord(
                id=str(next(self.ids)),
                user_id=user_id,
                tutor=self.tutor_name,
                interface=interface,
                start_state=start_state,
                selection=selection,
                action=action,
                input=input_value,
                correctness=correctness,
                kc_labels=kc_labels,
                time=at,
            )
        )


def _simulate_student(
    profile: SimProfile,
    tutor: TutorSpec,
    n_attempts: int,
    rng: Random,
    emitter: _Emitter,
    adaptive: bool,
    threshold: float,
    max_retries: int,
    start_time: datetime,
) -> dict[str, bool]:
    kc_map = tutor.kc_map()
    types_by_name = {pt.name: pt for pt in tutor.problem_types}
    truth = {kc: rng.random() < profile.params_for(kc).p_init for kc in tutor.all_kcs()}
    estimates: dict[str, MasteryState] = {
        kc: bkt.initial_state(kc, profile.params_for(kc)) for kc in tutor.all_kcs()
    }

    def observe(labels: Sequence[str], obs: str) -> None:
        for kc in labels:
            try:
                estimates[kc] = bkt.update(estimates[kc], obs, profile.params_for(kc))
            except bkt.DegenerateParams:
                # forced-correct inputs (hint tier 3) can be impossible under
                # degenerate guess/slip corners; leave the estimate unchanged
                pass

    t = start_time + timedelta(seconds=round(rng.uniform(0, 36_000), 3))

    for attempt_no in range(n_attempts):
        if adaptive:
            choice = bkt.select_next_problem_type(estimates, kc_map, threshold)
            if choice is ALL_MASTERED:
                break
            ptype = types_by_name[choice]
        else:
            ptype = tutor.problem_types[attempt_no % len(tutor.problem_types)]

        problem = generate_problem(ptype, rng)
        t += timedelta(seconds=max(0.001, round(20.0 * math.exp(0.8 * rng.gauss(0, 1)), 3)))
        emitter.emit(t, profile.user_id, ptype.name, problem.text, Action.START_PROBLEM)

        abandoned = False
        for step in ptype.steps:
            if rng.random() < profile.abandon_probability:
                abandoned = True
                break
            tier = 0
            retries = 0
            while True:
                if tier < MAX_HINT_TIER and rng.random() < profile.hint_propensity:
                    tier += 1
                    t += timedelta(seconds=profile.latency.sample(rng))
                    emitter.emit(
                        t, profile.user_id, ptype.name, problem.text,
                        Action.HINT_REQUEST, selection=step.selection,
                        input_value=f"hint:{tier}", kc_labels=step.kc_labels,
                    )
                    observe(step.kc_labels, "hint")
                    continue
                known = all(truth[kc] for kc in step.kc_labels)
                params = profile.params_for(step.kc_labels[0])
                p_correct = (1.0 - params.p_slip) if known else params.p_guess
                correct = tier >= MAX_HINT_TIER or rng.random() < p_correct
                answer = _answer_for(problem, step.selection, rng)
                value = answer if correct else _wrong_value(answer, rng)
                t += timedelta(seconds=profile.latency.sample(rng))
                emitter.emit(
                    t, profile.user_id, ptype.name, problem.text,
                    Action.INPUT, selection=step.selection, input_value=value,
                    correctness=Correctness.CORRECT if correct else Correctness.INCORRECT,
                    kc_labels=step.kc_labels,
                )
                for kc in step.kc_labels:
                    if not truth[kc] and rng.random() < profile.params_for(kc).p_transit:
                        truth[kc] = True
                observe(step.kc_labels, "correct" if correct else "incorrect")
                if correct:
                    break
                retries += 1
                if retries >= max_retries or rng.random() < profile.abandon_probability:
                    abandoned = True
                    break
            if abandoned:
                break

        if not abandoned:
            t += timedelta(seconds=profile.latency.sample(rng))
            emitter.emit(
                t, profile.user_id, ptype.name, problem.text,
                Action.DONE, correctness=Correctness.CORRECT,
            )
    return truth


def simulate_with_truth(
    profiles: Sequence[SimProfile],
    tutor: TutorSpec,
    n_attempts_per_student: int,
    seed: int,
    adaptive: bool = True,
    mastery_threshold: float = bkt.DEFAULT_MASTERY_THRESHOLD,
    start_time: datetime = DEFAULT_START,
    max_retries_per_step: int = 50,
) -> SimulationResult:
    """Run the full cohort; also report each student's final latent knowledge."""
    ids = count(1)
    emitter = _Emitter(ids, tutor.name)
    final: dict[tuple[str, str], bool] = {}
    for profile in profiles:
        rng = Random(f"{seed}/{profile.user_id}")
        truth = _simulate_student(
            profile, tutor, n_attempts_per_student, rng, emitter,
            adaptive, mastery_threshold, max_retries_per_step, start_time,
        )
        for kc, known in truth.items():
            final[(profile.user_id, kc)] = known
    return SimulationResult(records=emitter.records, final_knowledge=final)


def simulate(
    profiles: Sequence[SimProfile],
    tutor: TutorSpec,
    n_attempts_per_student: int,
    seed: int,
    adaptive: bool = True,
    mastery_threshold: float = bkt.DEFAULT_MASTERY_THRESHOLD,
    start_time: datetime = DEFAULT_START,
    max_retries_per_step: int = 50,
) -> list[InteractionRecord]:
    return simulate_with_truth(
        profiles, tutor, n_attempts_per_student, seed,
        adaptive=adaptive, mastery_threshold=mastery_threshold,
        start_time=start_time, max_retries_per_step=max_retries_per_step,
    ).records


# ---------------------------------------------------------------------------
# Demo fixtures


def demo_tutor() -> TutorSpec:
    return TutorSpec(
        name="factoring",
        problem_types=(
            ProblemTypeSpec(
                name="leading_coeff_1",
                family="factor_monic",
                steps=(
                    StepSpec("b", ("identify-b",)),
                    StepSpec("c", ("identify-c",)),
                    StepSpec("first_factor", ("first-factor",)),
                    StepSpec("second_factor", ("second-factor",)),
                ),
            ),
            ProblemTypeSpec(
                name="grouping_method",
                family="factor_grouping",
                steps=(
                    StepSpec("product_term", ("compute-ac",)),
                    StepSpec("split_b", ("split-middle-term",)),
                    StepSpec("group_factor", ("factor-by-grouping",)),
                    StepSpec("final_factors", ("write-factored-form",)),
                ),
            ),
            ProblemTypeSpec(
                name="area_box_method",
                family="area_box",
                steps=(
                    StepSpec("width_terms", ("identify-b",)),
                    StepSpec("area_terms", ("identify-c",)),
                    StepSpec("box_fill", ("partition-area",)),
                    StepSpec("read_factors", ("write-factored-form",)),
                ),
            ),
        ),
    )


_COHORTS = (
    # (share, hint, abandon, latency median, latency sigma, params)
    (0.40, 0.08, 0.03, 6.0, 0.6, BktParams(0.25, 0.12, 0.15, 0.08)),
    (0.35, 0.22, 0.10, 9.0, 0.7, BktParams(0.10, 0.04, 0.15, 0.10)),
    (0.25, 0.02, 0.01, 4.0, 0.5, BktParams(0.70, 0.30, 0.20, 0.05)),
)


def demo_profiles(n_students: int = 200) -> list[SimProfile]:
    profiles: list[SimProfile] = []
    boundaries = []
    acc = 0.0
    for share, *_ in _COHORTS:
        acc += share
        boundaries.append(acc)
    for i in range(n_students):
        frac = (i + 0.5) / n_students
        cohort_idx = next(j for j, b in enumerate(boundaries) if frac <= b)
        _, hint, abandon, median, sigma, params = _COHORTS[cohort_idx]
        profiles.append(
            SimProfile(
                user_id=f"stu{i + 1:03d}",
                default_params=params,
                hint_propensity=hint,
                latency=LatencyModel(median, sigma),
                abandon_probability=abandon,
            )
        )
    return profiles


def demo_corpus(seed: int = 7, n_students: int = 200, attempts_per_student: int = 7) -> list[InteractionRecord]:
    """The standard desk-scale corpus used by tests and the documentation."""
    return simulate(demo_profiles(n_students), demo_tutor(), attempts_per_student, seed)
