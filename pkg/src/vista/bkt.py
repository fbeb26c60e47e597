"""Per-skill Bayesian Knowledge Tracing: posterior updates, mastery, problem selection.

The update is the standard two-phase rule. Evidence first:

    posterior | correct   = p(1-slip) / (p(1-slip) + (1-p) guess)
    posterior | incorrect = p slip    / (p slip    + (1-p)(1-guess))

then learning: p' = posterior + (1 - posterior) * transit. A hint request is
scored as incorrect evidence.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence, Union

logger = logging.getLogger(__name__)

OBSERVATIONS = ("correct", "incorrect", "hint")


class DegenerateParams(ValueError):
    """The Bayes denominator vanished; parameters give no usable evidence."""


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BktParams:
    p_init: float
    p_transit: float
    p_guess: float
    p_slip: float

    def __post_init__(self):
        for name in ("p_init", "p_transit", "p_guess", "p_slip"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        # Identifiability: below the diagonal a correct answer must be evidence
        # of knowing, not of guessing.
        if self.p_guess + self.p_slip >= 1.0:
            raise ConfigError(
                f"p_guess + p_slip must be < 1, got {self.p_guess + self.p_slip}"
            )


DEFAULT_PARAMS = BktParams(p_init=0.3, p_transit=0.2, p_guess=0.2, p_slip=0.1)
DEFAULT_MASTERY_THRESHOLD = 0.95


@dataclass(frozen=True)
class MasteryState:
    kc: str
    p_known: float
    observations: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_known <= 1.0:
            raise ConfigError(f"p_known must be in [0, 1], got {self.p_known}")


def initial_state(kc: str, params: BktParams) -> MasteryState:
    return MasteryState(kc=kc, p_known=params.p_init, observations=0)


def update(state: MasteryState, obs: str, params: BktParams) -> MasteryState:
    """One evidence-then-learning step; hint counts as incorrect evidence."""
    if obs not in OBSERVATIONS:
        raise ValueError(f"unknown observation: {obs!r}")
    p = state.p_known
    if obs == "correct":
        numerator = p * (1.0 - params.p_slip)
        denominator = numerator + (1.0 - p) * params.p_guess
    else:
        numerator = p * params.p_slip
        denominator = numerator + (1.0 - p) * (1.0 - params.p_guess)
    if denominator == 0.0:
        raise DegenerateParams(
            f"zero evidence denominator for obs={obs} at p_known={p}"
        )
    posterior = numerator / denominator
    p_next = posterior + (1.0 - posterior) * params.p_transit
    return replace(state, p_known=min(1.0, max(0.0, p_next)),
                   observations=state.observations + 1)


def is_mastered(state: MasteryState, threshold: float = DEFAULT_MASTERY_THRESHOLD) -> bool:
    return state.p_known >= threshold


ObservationEvent = tuple[str, Sequence[str]]


def trajectory(
    events: Iterable[ObservationEvent],
    params: Mapping[str, BktParams],
    kcs: Iterable[str] = (),
    default_params: BktParams = DEFAULT_PARAMS,
) -> dict[str, list[float]]:
    """Replay observations into per-KC p_known histories.

    ``events`` is a time-ordered stream of (observation, kc_labels) pairs;
    a multi-label event updates every listed KC. Each history starts at the
    KC's p_init. KCs without configured params fall back to
    ``default_params`` (flagged via a log warning).
    """
    states: dict[str, MasteryState] = {}
    histories: dict[str, list[float]] = {}
    flagged: set[str] = set()

    def ensure(kc: str) -> None:
        if kc in states:
            return
        kc_params = params.get(kc)
        if kc_params is None:
            kc_params = default_params
            if kc not in flagged:
                flagged.add(kc)
                logger.warning("no BKT params for KC %r; using defaults", kc)
        states[kc] = initial_state(kc, kc_params)
        histories[kc] = [kc_params.p_init]

    for kc in kcs:
        ensure(kc)
    for obs, labels in events:
        for kc in labels:
            ensure(kc)
            kc_params = params.get(kc, default_params)
            states[kc] = update(states[kc], obs, kc_params)
            histories[kc].append(states[kc].p_known)
    return histories


class AllMastered:
    """Signal value: every knowledge component meets the mastery threshold."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover
        return "ALL_MASTERED"


ALL_MASTERED = AllMastered()


def select_next_problem_type(
    mastery: Mapping[str, MasteryState],
    kc_map: Mapping[str, Sequence[str]],
    threshold: float = DEFAULT_MASTERY_THRESHOLD,
) -> Union[str, AllMastered]:
    """Pick the problem type exercising the most unmastered KCs.

    Ties break to the lexicographically smaller type name. KCs without a
    mastery state count as unmastered. Returns :data:`ALL_MASTERED` when
    every KC in the map meets the threshold.
    """
    if not kc_map:
        raise ConfigError("kc_map must not be empty")

    def unmastered(kc: str) -> bool:
        state = mastery.get(kc)
        return state is None or not is_mastered(state, threshold)

    all_kcs = {kc for kcs in kc_map.values() for kc in kcs}
    if not any(unmastered(kc) for kc in all_kcs):
        return ALL_MASTERED

    best_name: str | None = None
    best_count = -1
    for name in sorted(kc_map):
        count = sum(1 for kc in set(kc_map[name]) if unmastered(kc))
        if count > best_count:
            best_name = name
            best_count = count
    assert best_name is not None
    return best_name
