"""Operator command line: ingest, serve, summaries, queries, simulation, export.

Exit codes: 0 success, 1 usage error, 2 data error. Subcommands print
human-readable tables by default; ``--json`` switches to the same canonical
JSON the HTTP service emits.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from . import service as service_mod
from .config import ServiceConfig, load_config, load_sim_config
from .events import FormatError, serialize
from .jsonutil import canonical_json
from .seqquery import PatternSyntaxError, SemanticError
from .service import CorpusStore
from .simulator import demo_profiles, demo_tutor, simulate


class DataError(Exception):
    """Problem with the data or arguments' referents; exits with code 2."""


def _service_config(config_path: Optional[str], data_dir: Optional[str]) -> ServiceConfig:
    cfg = load_config(Path(config_path) if config_path else None)
    if data_dir:
        from dataclasses import replace

        cfg = replace(cfg, data_dir=Path(data_dir))
    return cfg


def _open_store(config_path: Optional[str], data_dir: Optional[str]) -> CorpusStore:
    cfg = _service_config(config_path, data_dir)
    return CorpusStore(cfg.data_dir, idle_cap=cfg.idle_cap_seconds)


def _echo_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    cells = [[str(c) for c in row] for row in rows]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in cells)) if cells else len(headers[i])
        for i in range(len(headers))
    ]
    click.echo("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip())
    for row in cells:
        click.echo("  ".join(row[i].ljust(widths[i]) for i in range(len(headers))).rstrip())


common_config = click.option("--config", "config_path", type=click.Path(), default=None,
                             help="Service config file (TOML).")
common_data_dir = click.option("--data-dir", default=None, help="Record log directory.")
json_flag = click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")


@click.group()
def cli() -> None:
    """Tutor interaction-log analytics."""


@cli.command()
@click.argument("file", type=click.Path(path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default=None)
@common_config
@common_data_dir
def ingest(file: Path, fmt: Optional[str], config_path: Optional[str], data_dir: Optional[str]) -> None:
    """Append a log file to the record store."""
    if not file.exists():
        raise DataError(f"no such file: {file}")
    if fmt is None:
        suffix = file.suffix.lower().lstrip(".")
        if suffix not in ("csv", "jsonl"):
            raise DataError(f"cannot infer format from {file.name!r}; pass --format")
        fmt = suffix
    store = _open_store(config_path, data_dir)
    try:
        result, version = store.ingest(file.read_bytes(), fmt)
    except FormatError as exc:
        raise DataError(str(exc)) from None
    click.echo(f"accepted {len(result.records)} records (snapshot v{version})")
    for error in result.errors:
        click.echo(f"row {error.row}: {error.reason}", err=True)


@cli.command()
@click.option("--port", type=int, default=None)
@click.option("--host", default="127.0.0.1")
@common_config
@common_data_dir
def serve(port: Optional[int], host: str, config_path: Optional[str], data_dir: Optional[str]) -> None:
    """Run the HTTP API server."""
    import uvicorn

    cfg = _service_config(config_path, data_dir)
    if port is not None:
        from dataclasses import replace

        cfg = replace(cfg, port=port)
    app = service_mod.create_app(cfg)
    uvicorn.run(app, host=host, port=cfg.port, log_level="warning")


@cli.command()
@click.option("--include-skipped/--hide-skipped", default=True)
@json_flag
@common_config
@common_data_dir
def overview(include_skipped: bool, as_json: bool, config_path: Optional[str], data_dir: Optional[str]) -> None:
    """Per-problem-type outcome counts."""
    snapshot = _open_store(config_path, data_dir).snapshot()
    payload = service_mod.overview_payload(snapshot, include_skipped)
    if as_json:
        click.echo(canonical_json(payload))
        return
    _echo_table(
        ["problem type", "correct", "incorrect", "skipped"],
        [[r["problem_type"], r["correct"], r["incorrect"],
          "(hidden)" if r["skipped_hidden"] else r["skipped"]] for r in payload],
    )


@cli.command()
@click.argument("user_id")
@click.option("--problem-type", default=None)
@json_flag
@common_config
@common_data_dir
def student(user_id: str, problem_type: Optional[str], as_json: bool,
            config_path: Optional[str], data_dir: Optional[str]) -> None:
    """One student's attempt timeline."""
    snapshot = _open_store(config_path, data_dir).snapshot()
    if user_id not in snapshot.users:
        raise DataError(f"unknown student: {user_id}")
    payload = service_mod.timeline_payload(snapshot, user_id, problem_type)
    if as_json:
        click.echo(canonical_json(payload))
        return
    _echo_table(
        ["start", "problem type", "steps", "duration (s)", "done"],
        [[b["start_time"], b["interface"], len(b["steps"]), b["total_duration"],
          "*" if b["completed"] else ""] for b in payload],
    )


@cli.command(name="problem-type")
@click.argument("name")
@json_flag
@common_config
@common_data_dir
def problem_type(name: str, as_json: bool, config_path: Optional[str], data_dir: Optional[str]) -> None:
    """Step paths of every attempt of one problem type."""
    snapshot = _open_store(config_path, data_dir).snapshot()
    if name not in snapshot.problem_types:
        raise DataError(f"unknown problem type: {name}")
    payload = service_mod.paths_payload(snapshot, name)
    if as_json:
        click.echo(canonical_json(payload))
        return
    click.echo("steps: " + " > ".join(payload["step_order"]))
    _echo_table(
        ["attempt", "user", "terminal", "total (s)"],
        [[p["attempt_id"], p["user_id"], p["terminal"],
          p["points"][-1]["cumulative_time"] if p["points"] else 0.0]
         for p in payload["paths"]],
    )


@cli.command()
@click.argument("pattern")
@click.option("--scope", type=click.Choice(["attempt", "student"]), default="attempt")
@click.option("--same-step", is_flag=True, default=False)
@json_flag
@common_config
@common_data_dir
def query(pattern: str, scope: str, same_step: bool, as_json: bool,
          config_path: Optional[str], data_dir: Optional[str]) -> None:
    """Find sequence-pattern matches over event streams."""
    snapshot = _open_store(config_path, data_dir).snapshot()
    try:
        payload = service_mod.query_payload(snapshot, pattern, scope, same_step)
    except (PatternSyntaxError, SemanticError) as exc:
        raise DataError(f"bad pattern: {exc}") from None
    if as_json:
        click.echo(canonical_json(payload))
        return
    _echo_table(
        ["stream", "span", "symbols"],
        [[m["stream_id"], f"{m['start']}-{m['end']}", m["symbols"]]
         for m in payload["matches"]],
    )


@cli.command(name="simulate")
@click.option("--config", "sim_config_path", type=click.Path(), default=None,
              help="Simulation config (TOML); omit for the built-in demo cohort.")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Output file; defaults to stdout.")
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default=None)
@click.option("--students", type=int, default=200, help="Demo cohort size (no --config).")
@click.option("--attempts", type=int, default=None, help="Attempts per student.")
def simulate_cmd(sim_config_path: Optional[str], seed: Optional[int], out: Optional[Path],
                 fmt: Optional[str], students: int, attempts: Optional[int]) -> None:
    """Generate a synthetic interaction log."""
    if sim_config_path is not None:
        if not Path(sim_config_path).exists():
            raise DataError(f"no such file: {sim_config_path}")
        sim = load_sim_config(Path(sim_config_path))
        profiles, tutor, adaptive = sim.profiles, sim.tutor, sim.adaptive
        n_attempts = attempts if attempts is not None else sim.attempts_per_student
        use_seed = seed if seed is not None else sim.seed
    else:
        profiles, tutor, adaptive = demo_profiles(students), demo_tutor(), True
        n_attempts = attempts if attempts is not None else 7
        use_seed = seed if seed is not None else 7
    records = simulate(profiles, tutor, n_attempts, use_seed, adaptive=adaptive)
    if fmt is None:
        fmt = "csv" if out is None or out.suffix.lower() != ".jsonl" else "jsonl"
    text = serialize(records, fmt)
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(records)} records to {out}", err=True)


@cli.command()
@click.argument("what", type=click.Choice(["records", "attempts"]))
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl", "json"]), default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@common_config
@common_data_dir
def export(what: str, fmt: Optional[str], out: Optional[Path],
           config_path: Optional[str], data_dir: Optional[str]) -> None:
    """Dump the normalized record log or reconstructed attempt summaries."""
    snapshot = _open_store(config_path, data_dir).snapshot()
    if what == "records":
        fmt = fmt or "csv"
        if fmt == "json":
            raise DataError("records export supports csv or jsonl")
        text = serialize(list(snapshot.records), fmt)
    else:
        if fmt not in (None, "json"):
            raise DataError("attempts export supports only json")
        text = canonical_json(
            [
                {
                    "attempt_id": a.id,
                    "user_id": a.key.user_id,
                    "tutor": a.key.tutor,
                    "interface": a.key.interface,
                    "start_state": a.key.start_state,
                    "start_time": a.key.start_time.isoformat(),
                    "status": a.status.value,
                    "total_duration": round(a.total_duration, 3),
                    "steps": len(a.steps),
                }
                for a in snapshot.attempts
            ]
        ) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}", err=True)


def run(argv: Sequence[str]) -> int:
    """Execute the CLI; returns the exit code instead of exiting."""
    try:
        cli.main(args=list(argv), prog_name="vista", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (FormatError, PatternSyntaxError, SemanticError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def main() -> None:  # console entry point
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
