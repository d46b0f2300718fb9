import json
import subprocess
import sys

import pytest

from graphhybrid.cli import EXIT_FAULT, EXIT_INVALID, EXIT_OK, EXIT_USAGE, OUTPUT_ENV, run


def small_scenario(**sim):
    return {
        "universe": list(range(1, 12)),
        "initial_state": {
            "vertices": [{"id": 1, "attr": 0.7}, {"id": 2, "attr": 0.3}],
            "edges": [
                {"from": 1, "to": 1, "weight": -0.21},
                {"from": 2, "to": 2, "weight": -0.1},
                {"from": 1, "to": 2, "weight": 0.1},
            ],
        },
        "params": {"t_star": 1.0},
        "jump_config": {"lambda": 1e-6, "enable_jminus": True},
        "schedule": [
            {
                "t": 2.0,
                "mode": "add",
                "input": {
                    "vertices": [{"id": 9, "attr": 0.5}],
                    "edges": [{"from": 9, "to": 9, "weight": -2.0}],
                },
            }
        ],
        "sim": {"t_max": 4.0, "dt": 0.01, "freeze_weights": False, **sim},
    }


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(small_scenario()))
    return path


def test_simulate_writes_outputs(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["simulate", str(scenario_file), "-o", str(out)]) == EXIT_OK
    for name in ("vertices.csv", "edges.csv", "dimension.csv", "jumps.csv", "run_manifest.json"):
        assert (out / name).exists()
    assert "dims 2 -> 3" in capsys.readouterr().out


def test_validate_ok(scenario_file, capsys):
    assert run(["validate", str(scenario_file)]) == EXIT_OK
    assert "ok" in capsys.readouterr().out


def test_validate_dangling_edge(tmp_path, capsys):
    raw = small_scenario()
    raw["initial_state"]["edges"].append({"from": 1, "to": 3, "weight": 0.5})
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(raw))
    assert run(["validate", str(path)]) == EXIT_INVALID
    assert "dangling endpoint 3" in capsys.readouterr().out


def test_simulate_invalid_scenario(tmp_path):
    raw = small_scenario()
    raw["schedule"][0]["t"] = 99.0
    path = tmp_path / "late.json"
    path.write_text(json.dumps(raw))
    assert run(["simulate", str(path), "-o", str(tmp_path / "o")]) == EXIT_INVALID


def test_validate_reports_unknown_mode_and_label(tmp_path, capsys):
    raw = small_scenario()
    raw["schedule"][0]["mode"] = "swap"
    raw["schedule"][0]["input"]["vertices"][0]["id"] = 42
    raw["schedule"][0]["input"]["edges"] = []
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(raw))
    assert run(["validate", str(path)]) == EXIT_INVALID
    out = capsys.readouterr().out
    assert "mode" in out and "outside the universe" in out


def test_unknown_flag_is_usage_error(capsys):
    assert run(["--bogus"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_console_entry_exit_code():
    proc = subprocess.run([sys.executable, "-m", "graphhybrid", "simulate"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE


def test_runtime_fault(tmp_path):
    raw = small_scenario()
    raw["initial_state"]["vertices"][0]["attr"] = 1e200
    raw["initial_state"]["edges"][0]["weight"] = 1e200
    path = tmp_path / "boom.json"
    path.write_text(json.dumps(raw))
    assert run(["simulate", str(path), "-o", str(tmp_path / "o")]) == EXIT_FAULT


def test_halving_dt_doubles_samples(scenario_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["simulate", str(scenario_file), "-o", str(a)]) == EXIT_OK
    assert run(["simulate", str(scenario_file), "-o", str(b), "--dt", "0.005"]) == EXIT_OK
    rows_a = (a / "dimension.csv").read_text().count("\n") - 1
    rows_b = (b / "dimension.csv").read_text().count("\n") - 1
    segments = 2
    assert rows_b - segments == 2 * (rows_a - segments)


def test_deterministic_outputs(scenario_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(["simulate", str(scenario_file), "-o", str(a)])
    run(["simulate", str(scenario_file), "-o", str(b)])
    for name in ("vertices.csv", "edges.csv", "dimension.csv", "jumps.csv", "run_manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_overrides_recorded_in_manifest(scenario_file, tmp_path):
    out = tmp_path / "o"
    argv = ["simulate", str(scenario_file), "-o", str(out), "--t-max", "3", "--freeze-weights", "--disable-jminus"]
    assert run(argv) == EXIT_OK
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["overrides"] == {"t_max": 3.0, "freeze_weights": True, "disable_jminus": True}
    sim = manifest["scenario"]["sim"]
    assert sim["t_max"] == 3.0 and sim["freeze_weights"] is True
    assert manifest["scenario"]["jump_config"]["enable_jminus"] is False
    assert manifest["scenario"]["params"]["t_star"] == 1.0


def test_output_dir_from_environment(scenario_file, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert run(["simulate", str(scenario_file)]) == EXIT_OK
    assert (tmp_path / "env" / "s" / "vertices.csv").exists()


def test_params_override(scenario_file, tmp_path):
    bad = tmp_path / "p.csv"
    bad.write_text("species_id,growth_rate,susceptibility\n1,0.1,-0.1\n")
    assert run(["simulate", str(scenario_file), "-o", str(tmp_path / "o"), "--params", str(bad)]) == EXIT_INVALID


def test_paper_scenario_fig8a(tmp_path, capsys):
    assert run(["paper-scenario", "fig8a", "-o", str(tmp_path), "--t-max", "20"]) == EXIT_OK
    manifest = json.loads((tmp_path / "fig8a" / "run_manifest.json").read_text())
    assert manifest["summary"]["dimension_trace"] == [4]
    assert manifest["scenario"]["sim"]["antibiotic"] is False


def test_paper_scenario_fig9b_configuration(tmp_path):
    assert run(["paper-scenario", "fig9b", "-o", str(tmp_path), "--t-max", "200"]) == EXIT_OK
    scen = json.loads((tmp_path / "fig9b" / "run_manifest.json").read_text())["scenario"]
    assert scen["sim"]["antibiotic"] is True and scen["sim"]["freeze_weights"] is True
    assert scen["jump_config"]["enable_jminus"] is True and scen["jump_config"]["enable_jplus"] is False


def test_paper_scenarios_in_parallel(tmp_path):
    argv = ["paper-scenario", "fig8a", "fig8b", "-j", "2", "-o", str(tmp_path), "--t-max", "10"]
    assert run(argv) == EXIT_OK
    assert (tmp_path / "fig8a" / "edges.csv").exists() and (tmp_path / "fig8b" / "edges.csv").exists()
