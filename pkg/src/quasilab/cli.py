"""Command line front end: ``quasilab <suite> [--config FILE] [--emit DIR]``."""

from __future__ import annotations

import csv
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import click

from . import __version__
from .config import SUITES, ConfigError, RunConfig, load, validate
from .report import CheckReport, _jsonable
from .suites import SUITE_FUNCS

OUTPUT_ENV = "QUASILAB_OUTPUT_DIR"
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class Report:
    config: RunConfig
    records: list[tuple[str, CheckReport]]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for _, r in self.records)

    def to_dict(self) -> dict[str, Any]:
        records = []
        for suite, r in self.records:
            d = r.to_dict()
            records.append({"suite": suite, **d})
        out = {
            "schema_version": self.config.schema_version,
            "quasilab_version": __version__,
            "config": _jsonable(self.config.to_dict()),
            "summary": {
                "checks": len(records),
                "failed": sum(not r["passed"] for r in records),
                "passed": self.passed,
            },
            "records": records,
        }
        if self.timings:
            out["timings"] = {k: round(v, 3) for k, v in sorted(self.timings.items())}
        return out


def run(config: RunConfig, timings: bool = False) -> Report:
    """Run the selected suites concurrently and collect their records in a fixed order."""

    def one(suite: str):
        start = time.perf_counter()
        reports = SUITE_FUNCS[suite](config)
        return suite, reports, time.perf_counter() - start

    if not config.suites:
        return Report(config, [])
    with ThreadPoolExecutor(max_workers=len(config.suites)) as pool:
        results = list(pool.map(one, config.suites))
    records = sorted(((s, r) for s, reps, _ in results for r in reps), key=lambda x: (x[0], x[1].name))
    return Report(config, records, {s: t for s, _, t in results} if timings else {})


def _table_name(suite: str, name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.=-]+", "_", f"{suite}__{name}").strip("_") + ".csv"


def emit(report: Report, directory: str | Path) -> list[Path]:
    """Write report.json, checks.csv and one table per check that has rows."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data = report.to_dict()
    paths = [directory / "report.json", directory / "checks.csv"]
    paths[0].write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    with open(paths[1], "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["suite", "name", "passed", "lhs", "rhs", "margin", "witness"])
        for rec in data["records"]:
            writer.writerow([rec["suite"], rec["name"], rec["passed"], _cell(rec["lhs"]),
                             _cell(rec["rhs"]), _cell(rec["margin"]), json.dumps(rec["witness"])])
    for suite, r in report.records:
        if not r.rows:
            continue
        path = directory / "tables" / _table_name(suite, r.name)
        path.parent.mkdir(exist_ok=True)
        keys = list(r.rows[0])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(keys)
            for row in r.rows:
                writer.writerow([_cell(_jsonable(row.get(k))) for k in keys])
        paths.append(path)
    return paths


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def load_report(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text())


def _resolve_config(config_path: str | None) -> RunConfig:
    if config_path is None:
        return validate({"schema_version": 1})
    return load(config_path)


def _execute(suites: tuple[str, ...] | None, config_path: str | None, emit_dir: str | None,
             timings: bool) -> None:
    try:
        cfg = _resolve_config(config_path)
    except ConfigError as exc:
        for path, msg in exc.errors:
            click.echo(f"config error at {path or '<root>'}: {msg}", err=True)
        sys.exit(EXIT_CONFIG)
    if suites is not None:
        cfg = cfg.with_suites(suites)
    report = run(cfg, timings)
    for suite, r in report.records:
        click.echo(f"{'PASS' if r.passed else 'FAIL'}  {suite:8s} {r.name}")
    click.echo(f"{len(report.records)} checks, {sum(not r.passed for _, r in report.records)} failed")
    target = emit_dir or os.environ.get(OUTPUT_ENV)
    if target:
        emit(report, target)
        click.echo(f"wrote {Path(target) / 'report.json'}")
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)


def _common(fn):
    fn = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                      help="JSON run configuration.")(fn)
    fn = click.option("--emit", "emit_dir", type=click.Path(file_okay=False),
                      help=f"Output directory (default: ${OUTPUT_ENV}).")(fn)
    fn = click.option("--timings", is_flag=True,
                      help="Record wall time per suite (breaks bit-identical output).")(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Numerical checks for weighted shifts, convolution operators and quasianalytic weights."""


@main.command("run")
@_common
def run_cmd(config_path, emit_dir, timings):
    """Run the suites listed in the configuration."""
    _execute(None, config_path, emit_dir, timings)


@main.command("all")
@_common
def all_cmd(config_path, emit_dir, timings):
    """Run every suite."""
    _execute(SUITES, config_path, emit_dir, timings)


def _suite_command(name: str):
    @_common
    def cmd(config_path, emit_dir, timings):
        _execute((name,), config_path, emit_dir, timings)

    cmd.__doc__ = f"Run the {name} suite."
    main.command(name)(cmd)


for _name in SUITES:
    _suite_command(_name)


if __name__ == "__main__":
    main()
