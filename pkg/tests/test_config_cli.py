import json

import pytest
from click.testing import CliRunner
from hypothesis import given, settings, strategies as st

from quasilab import cli
from quasilab.config import ConfigError, RunConfig, SUITES, validate


def _paths(exc):
    return [p for p, _ in exc.value.errors]


def test_defaults_round_trip():
    cfg = validate({"schema_version": 1})
    assert cfg == validate(json.loads(json.dumps(cfg.to_dict())))
    assert cfg.suites == SUITES


def test_schema_version_required():
    with pytest.raises(ConfigError) as exc:
        validate({})
    assert "schema_version" in _paths(exc)


def test_errors_carry_field_paths():
    raw = {"schema_version": 1, "alpha": -1, "grid": {"per_cell": 30}, "bogus": 1,
           "family": {"kind": "shifted-geometric", "a": 2.0}, "suites": ["weights", "nope"]}
    with pytest.raises(ConfigError) as exc:
        validate(raw)
    paths = _paths(exc)
    for p in ("alpha", "grid.per_cell", "bogus", "family.a", "suites[1]"):
        assert p in paths


def test_explicit_family_validation():
    raw = {"schema_version": 1, "family": {"kind": "explicit", "a": [0.5, 0.25], "v": [1.0, 2.0]}}
    with pytest.raises(ConfigError) as exc:
        validate(raw)
    assert "family.v[1]" in _paths(exc)
    raw["family"]["v"] = [2.0, 1.0]
    cfg = validate(raw)
    assert cfg.family.build(1.0).K == 2


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.01, 0.99), K=st.integers(1, 200), N=st.integers(4, 500),
       alpha=st.floats(0.1, 10.0), seed=st.integers(0, 2**31))
def test_config_round_trip(a, K, N, alpha, seed):
    raw = {"schema_version": 1, "family": {"kind": "shifted-geometric", "a": a, "K": K},
           "N": N, "alpha": alpha, "seed": seed}
    cfg = validate(raw)
    assert validate(cfg.to_dict()) == cfg


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"schema_version": 1, "N": 40, "suites": ["weights", "shift", "beurling"]}))
    return path


def test_cli_run_and_determinism(fast_config, tmp_path):
    runner = CliRunner()
    outs = []
    for name in ("a", "b"):
        res = runner.invoke(cli.main, ["run", "--config", str(fast_config), "--emit", str(tmp_path / name)])
        assert res.exit_code == 0, res.output
        outs.append(tmp_path / name)
    for rel in ("report.json", "checks.csv"):
        assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes()
    tables = sorted(p.name for p in (outs[0] / "tables").iterdir())
    assert tables and tables == sorted(p.name for p in (outs[1] / "tables").iterdir())
    data = cli.load_report(outs[0] / "report.json")
    assert data["summary"]["passed"] and "timings" not in data


def test_cli_env_output_dir(fast_config, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "env"))
    res = CliRunner().invoke(cli.main, ["weights", "--config", str(fast_config)])
    assert res.exit_code == 0
    assert (tmp_path / "env" / "report.json").exists()


def test_cli_timings_flag(fast_config, tmp_path):
    res = CliRunner().invoke(cli.main, ["shift", "--config", str(fast_config), "--emit", str(tmp_path), "--timings"])
    assert res.exit_code == 0
    assert "shift" in cli.load_report(tmp_path / "report.json")["timings"]


def test_cli_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 1, "N": "many"}))
    res = CliRunner().invoke(cli.main, ["run", "--config", str(bad)])
    assert res.exit_code == cli.EXIT_CONFIG
    assert "N" in res.output
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{")
    assert CliRunner().invoke(cli.main, ["run", "--config", str(garbled)]).exit_code == cli.EXIT_CONFIG


def test_cli_failing_check_exit_code(tmp_path):
    # an absurdly tight translation tolerance makes that check fail honestly
    cfg = tmp_path / "tight.json"
    cfg.write_text(json.dumps({"schema_version": 1, "N": 40, "suites": ["shift"],
                               "tolerances": {"translation": 1e-300}}))
    res = CliRunner().invoke(cli.main, ["run", "--config", str(cfg)])
    assert res.exit_code == cli.EXIT_FAIL


def test_empty_suite_list():
    report = cli.run(RunConfig(suites=()))
    assert report.passed and report.records == []
