from __future__ import annotations

from pathlib import Path

import pytest

from vista.bkt import ConfigError
from vista.config import load_config, load_sim_config

SERVICE_TOML = """
[service]
port = 9100
data_dir = "/tmp/corpus"
idle_cap_seconds = 300
mastery_threshold = 0.9
auth_token = "sesame"
cors_origins = ["http://localhost:5173"]

[bkt]
p_init = 0.4
p_slip = 0.05

[bkt.kc."identify-b"]
p_init = 0.6
"""

SIM_TOML = """
seed = 11
attempts_per_student = 3
adaptive = false

[tutor]
name = "factoring"

[[tutor.problem_types]]
name = "leading_coeff_1"
family = "factor_monic"
steps = [
  { selection = "b", kcs = ["identify-b"] },
  { selection = "c", kcs = ["identify-c"] },
]

[[cohorts]]
count = 2
prefix = "kid"
hint_propensity = 0.5
abandon_probability = 0.25
latency_median = 3.0
latency_sigma = 0.4
p_init = 0.2
p_transit = 0.3

[cohorts.kc_params."identify-b"]
p_init = 0.9
"""


def test_service_config_from_file(tmp_path: Path):
    path = tmp_path / "vista.toml"
    path.write_text(SERVICE_TOML)
    cfg = load_config(path, env={})
    assert cfg.port == 9100
    assert cfg.data_dir == Path("/tmp/corpus")
    assert cfg.idle_cap_seconds == 300.0
    assert cfg.mastery_threshold == 0.9
    assert cfg.auth_token == "sesame"
    assert cfg.cors_origins == ("http://localhost:5173",)
    assert cfg.bkt_defaults.p_init == 0.4
    assert cfg.bkt_defaults.p_slip == 0.05
    assert cfg.bkt_defaults.p_transit == 0.2  # built-in default survives
    assert cfg.kc_params["identify-b"].p_init == 0.6
    assert cfg.kc_params["identify-b"].p_slip == 0.05  # inherits file default


def test_env_overrides_file(tmp_path: Path):
    path = tmp_path / "vista.toml"
    path.write_text(SERVICE_TOML)
    cfg = load_config(
        path,
        env={"PORT": "7777", "DATA_DIR": "/elsewhere", "MASTERY_THRESHOLD": "0.8",
             "IDLE_CAP_SECONDS": "120", "AUTH_TOKEN": "", "BKT_P_INIT": "0.55"},
    )
    assert cfg.port == 7777
    assert cfg.data_dir == Path("/elsewhere")
    assert cfg.mastery_threshold == 0.8
    assert cfg.idle_cap_seconds == 120.0
    assert cfg.auth_token == ""
    assert cfg.bkt_defaults.p_init == 0.55


def test_defaults_without_file():
    cfg = load_config(None, env={})
    assert cfg.port == 8000
    assert cfg.auth_token == ""
    assert cfg.idle_cap_seconds == 600.0


def test_sim_config_round_trip(tmp_path: Path):
    path = tmp_path / "sim.toml"
    path.write_text(SIM_TOML)
    sim = load_sim_config(path)
    assert sim.seed == 11
    assert sim.attempts_per_student == 3
    assert sim.adaptive is False
    assert sim.tutor.name == "factoring"
    (ptype,) = sim.tutor.problem_types
    assert [s.selection for s in ptype.steps] == ["b", "c"]
    assert len(sim.profiles) == 2
    assert [p.user_id for p in sim.profiles] == ["kid001", "kid002"]
    profile = sim.profiles[0]
    assert profile.hint_propensity == 0.5
    assert profile.abandon_probability == 0.25
    assert profile.default_params.p_init == 0.2
    assert profile.params_for("identify-b").p_init == 0.9
    assert profile.params_for("identify-b").p_transit == 0.3  # inherits cohort value
    assert profile.params_for("identify-c").p_init == 0.2


def test_sim_config_requires_tutor_and_cohorts(tmp_path: Path):
    path = tmp_path / "sim.toml"
    path.write_text("seed = 1\n")
    with pytest.raises(ConfigError):
        load_sim_config(path)
    path.write_text("[tutor]\nname='t'\n[[tutor.problem_types]]\nname='a'\nsteps=[{selection='s', kcs=['k']}]\n")
    with pytest.raises(ConfigError):
        load_sim_config(path)
