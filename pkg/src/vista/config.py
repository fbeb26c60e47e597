"""Service/CLI configuration: TOML file plus environment overrides.

Environment variables win over the file; both win over built-in defaults.
Recognized variables: PORT, DATA_DIR, IDLE_CAP_SECONDS, MASTERY_THRESHOLD,
AUTH_TOKEN, BKT_P_INIT, BKT_P_TRANSIT, BKT_P_GUESS, BKT_P_SLIP.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import bkt, simulator
from .bkt import BktParams, ConfigError
from .provenance import DEFAULT_IDLE_CAP


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8000
    data_dir: Path = Path("./data")
    idle_cap_seconds: float = DEFAULT_IDLE_CAP
    mastery_threshold: float = bkt.DEFAULT_MASTERY_THRESHOLD
    bkt_defaults: BktParams = bkt.DEFAULT_PARAMS
    kc_params: Mapping[str, BktParams] = field(default_factory=dict)
    auth_token: str = ""  # empty = auth disabled
    cors_origins: tuple[str, ...] = ("*",)
    static_dir: Optional[Path] = None
    max_body_bytes: int = 32 * 1024 * 1024


def _read_toml(path: Path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _params_from_table(table: Mapping[str, Any], base: BktParams) -> BktParams:
    return BktParams(
        p_init=float(table.get("p_init", base.p_init)),
        p_transit=float(table.get("p_transit", base.p_transit)),
        p_guess=float(table.get("p_guess", base.p_guess)),
        p_slip=float(table.get("p_slip", base.p_slip)),
    )


def load_config(
    path: Optional[Path] = None, env: Optional[Mapping[str, str]] = None
) -> ServiceConfig:
    env = os.environ if env is None else env
    data: dict = {}
    if path is not None:
        data = _read_toml(Path(path))
    service = data.get("service", {})
    bkt_table = data.get("bkt", {})

    defaults = ServiceConfig()
    bkt_defaults = _params_from_table(bkt_table, defaults.bkt_defaults)
    bkt_defaults = BktParams(
        p_init=float(env.get("BKT_P_INIT", bkt_defaults.p_init)),
        p_transit=float(env.get("BKT_P_TRANSIT", bkt_defaults.p_transit)),
        p_guess=float(env.get("BKT_P_GUESS", bkt_defaults.p_guess)),
        p_slip=float(env.get("BKT_P_SLIP", bkt_defaults.p_slip)),
    )
    kc_params = {
        kc: _params_from_table(table, bkt_defaults)
        for kc, table in bkt_table.get("kc", {}).items()
    }

    static_dir = service.get("static_dir", "")
    return ServiceConfig(
        port=int(env.get("PORT", service.get("port", defaults.port))),
        data_dir=Path(env.get("DATA_DIR", service.get("data_dir", defaults.data_dir))),
        idle_cap_seconds=float(
            env.get("IDLE_CAP_SECONDS", service.get("idle_cap_seconds", defaults.idle_cap_seconds))
        ),
        mastery_threshold=float(
            env.get("MASTERY_THRESHOLD", service.get("mastery_threshold", defaults.mastery_threshold))
        ),
        bkt_defaults=bkt_defaults,
        kc_params=kc_params,
        auth_token=str(env.get("AUTH_TOKEN", service.get("auth_token", defaults.auth_token))),
        cors_origins=tuple(service.get("cors_origins", defaults.cors_origins)),
        static_dir=Path(static_dir) if static_dir else None,
        max_body_bytes=int(service.get("max_body_bytes", defaults.max_body_bytes)),
    )


# ---------------------------------------------------------------------------
# Simulation config


@dataclass(frozen=True)
class SimConfig:
    tutor: simulator.TutorSpec
    profiles: tuple[simulator.SimProfile, ...]
    attempts_per_student: int = 7
    seed: int = 7
    adaptive: bool = True


def _tutor_from_table(table: Mapping[str, Any]) -> simulator.TutorSpec:
    problem_types = []
    for pt in table.get("problem_types", []):
        steps = tuple(
            simulator.StepSpec(
                selection=str(step["selection"]),
                kc_labels=tuple(str(kc) for kc in step["kcs"]),
            )
            for step in pt.get("steps", [])
        )
        problem_types.append(
            simulator.ProblemTypeSpec(
                name=str(pt["name"]),
                steps=steps,
                family=str(pt.get("family", "generic")),
            )
        )
    return simulator.TutorSpec(name=str(table.get("name", "tutor")), problem_types=tuple(problem_types))


def _profiles_from_cohorts(cohorts: Sequence[Mapping[str, Any]]) -> tuple[simulator.SimProfile, ...]:
    profiles: list[simulator.SimProfile] = []
    index = 1
    for cohort in cohorts:
        base = _params_from_table(cohort, bkt.DEFAULT_PARAMS)
        kc_params = {
            kc: _params_from_table(table, base)
            for kc, table in cohort.get("kc_params", {}).items()
        }
        prefix = str(cohort.get("prefix", "stu"))
        for _ in range(int(cohort.get("count", 1))):
            profiles.append(
                simulator.SimProfile(
                    user_id=f"{prefix}{index:03d}",
                    kc_params=kc_params,
                    default_params=base,
                    hint_propensity=float(cohort.get("hint_propensity", 0.1)),
                    latency=simulator.LatencyModel(
                        median_seconds=float(cohort.get("latency_median", 6.0)),
                        sigma=float(cohort.get("latency_sigma", 0.6)),
                    ),
                    abandon_probability=float(cohort.get("abandon_probability", 0.05)),
                )
            )
            index += 1
    return tuple(profiles)


def load_sim_config(path: Path) -> SimConfig:
    """Load a declarative simulation config (tutor spec + student cohorts)."""
    data = _read_toml(Path(path))
    if "tutor" not in data:
        raise ConfigError("sim config needs a [tutor] table")
    tutor = _tutor_from_table(data["tutor"])
    cohorts = data.get("cohorts", [])
    if not cohorts:
        raise ConfigError("sim config needs at least one [[cohorts]] entry")
    return SimConfig(
        tutor=tutor,
        profiles=_profiles_from_cohorts(cohorts),
        attempts_per_student=int(data.get("attempts_per_student", 7)),
        seed=int(data.get("seed", 7)),
        adaptive=bool(data.get("adaptive", True)),
    )
