import json

import pytest
import yaml

from relayplan.cli import main
from relayplan.config import ConfigError, load_config, parse_seeds
from relayplan.metrics import read_runs_csv
from relayplan.scenario import generate_scenario, load_scenario


def small_config(tmp_path, **extra):
    cfg = {
        "time": {"horizon": 1.0, "period": 0.1},
        "sa": {"s_max": 50},
        "solvers": ["safnet"],
        "sweep": {"seeds": "0:2", "fens": [2, 3], "total_min_rates": [3e8]},
    }
    cfg.update(extra)
    p = tmp_path / "cfg.yaml"
    p.write_text(yaml.safe_dump(cfg))
    return p


def test_parse_seeds():
    assert parse_seeds("0:3") == [0, 1, 2]
    assert parse_seeds("1,4,9") == [1, 4, 9]
    assert parse_seeds(5) == [5]


def test_config_overrides_and_errors(tmp_path):
    cfg = load_config(small_config(tmp_path), {"sa.s_max": 7})
    assert cfg.sa.s_max == 7 and cfg.time.horizon == 1.0
    with pytest.raises(ConfigError, match="unknown solvers"):
        load_config(None, {"solvers": ["magic"]})
    with pytest.raises(ConfigError):
        load_config(None, {"typo_field": 1})


def test_gen_round_trip(tmp_path):
    out = tmp_path / "s.json"
    assert main(["gen", "--config", str(small_config(tmp_path)), "--seed", "3", "--fens", "4", "-o", str(out)]) == 0
    cfg = load_config(small_config(tmp_path))
    want = generate_scenario(3, 4, 450e6, cfg.zone_obj(), cfg.time_grid(), backhaul_pos=cfg.backhaul_pos())
    assert load_scenario(out) == want


def test_solve_zero_iterations_is_heuristic(tmp_path, capsys):
    cfg = small_config(tmp_path)
    scen = tmp_path / "s.json"
    main(["gen", "--config", str(cfg), "--split", "equal", "-o", str(scen)])
    capsys.readouterr()
    assert main(["solve", "--scenario", str(scen), "--config", str(cfg), "--solver", "safnet", "--s-max", "0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["assignment_mhz"] == {"fen[0]": 40, "fen[1]": 40, "fen[2]": 40, "backhaul": 160}
    assert doc["iterations_run"] == 0


def test_sweep_rows_and_determinism(tmp_path):
    cfg = small_config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(b)]) == 0
    rows = read_runs_csv(a / "runs.csv")
    assert len(rows) == 4
    assert (a / "runs.csv").read_bytes() == (b / "runs.csv").read_bytes()
    assert (a / "aggregates.json").read_bytes() == (b / "aggregates.json").read_bytes()


def test_report_matches_inline(tmp_path):
    cfg = small_config(tmp_path)
    a = tmp_path / "a"
    main(["sweep", "--config", str(cfg), "--out", str(a)])
    inline = (a / "aggregates.json").read_bytes()
    r = tmp_path / "r"
    assert main(["report", str(a / "runs.csv"), "--out", str(r)]) == 0
    assert (r / "aggregates.json").read_bytes() == inline


def test_parallel_equals_serial(tmp_path):
    cfg = small_config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    main(["sweep", "--config", str(cfg), "--out", str(a)])
    main(["sweep", "--config", str(cfg), "--out", str(b), "--parallel", "2"])
    assert (a / "runs.csv").read_bytes() == (b / "runs.csv").read_bytes()


def test_trace_files(tmp_path):
    cfg = small_config(tmp_path)
    a = tmp_path / "a"
    main(["sweep", "--config", str(cfg), "--out", str(a), "--trace", "--seeds", "0:1"])
    traces = sorted((a / "traces").glob("*.jsonl"))
    assert len(traces) == 2
    lines = traces[0].read_text().splitlines()
    assert len(lines) == 50
    assert set(json.loads(lines[0])) == {"iteration", "fitness", "p_f", "accepted", "bandwidth_total"}


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("solvers: [nope]\n")
    assert main(["sweep", "--config", str(bad)]) == 1
    assert main(["report", str(tmp_path / "missing")]) == 1
    assert main(["solve", "--scenario", str(tmp_path / "nothing.json")]) == 1
    cfg = small_config(tmp_path, solvers=["des"], strict_des=True, des={"grid_step": 1.0, "cap": 100})
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
