from __future__ import annotations

import json
import subprocess
import sys

import pytest

from builders import make_instance
from mcbp.cli import main
from mcbp.io import load_instance, load_solution, save_instance
from mcbp.model import validate_solution


@pytest.fixture
def gen_file(tmp_path):
    path = tmp_path / "inst.json"
    assert main(["gen", "--n", "7", "--compartments", "2", "--seed", "3", "--horizon", "2",
                 "--windows-per-day", "2", "--out", str(path)]) == 0
    return path


@pytest.mark.parametrize("mode", ["bnp", "rsbnp", "lh", "oracle"])
def test_solve_modes_write_valid_solutions(gen_file, tmp_path, mode, capsys):
    out = tmp_path / f"{mode}.json"
    code = main(["solve", "--mode", mode, "--instance", str(gen_file), "--out", str(out),
                 "--cluster-min", "2", "--cluster-max", "4", "--kappa", "0.2"])
    assert code == 0
    sol = load_solution(out)
    assert validate_solution(load_instance(gen_file), sol) == []
    assert capsys.readouterr().out.startswith(sol.status)


def test_options_reach_the_solver(gen_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"topk": 5, "dive_every": 3}))
    log = tmp_path / "trace.tsv"
    code = main(["solve", "--mode", "bnp", "--instance", str(gen_file), "--out", str(tmp_path / "s.json"),
                 "--partitioning", "--eps-time", "0.1", "--eps-frac", "0.05", "--node-limit", "50",
                 "--config", str(cfg), "--log", str(log)])
    assert code == 0 and log.read_text().strip()


def test_infeasible_instance_exit_code(tmp_path):
    path = tmp_path / "inf.json"
    save_instance(make_instance([(0, 0), (1, 0), (50, 0)], [10, 10], [[(0, 24, 0)], [(0, 5, 0)]]), path)
    assert main(["solve", "--mode", "bnp", "--instance", str(path), "--out", str(tmp_path / "s.json")]) == 2
    assert load_solution(tmp_path / "s.json").status == "infeasible"


def test_time_limit_without_incumbent_exit_code(gen_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"warm_start": False}))
    code = main(["solve", "--mode", "bnp", "--instance", str(gen_file), "--out", str(tmp_path / "s.json"),
                 "--time-limit", "0", "--config", str(cfg)])
    assert code == 3
    assert load_solution(tmp_path / "s.json").status == "time_limit"


@pytest.mark.parametrize("setup", ["missing", "garbage", "bad_option", "bad_config_key"])
def test_input_errors_exit_code(tmp_path, gen_file, setup):
    inst = tmp_path / "nope.json"
    extra = []
    if setup == "garbage":
        inst.write_text("not json")
    elif setup == "bad_option":
        inst = gen_file
        extra = ["--cluster-min", "9", "--cluster-max", "3"]
    elif setup == "bad_config_key":
        inst = gen_file
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"no_such_option": 1}))
        extra = ["--config", str(cfg)]
    code = main(["solve", "--mode", "rsbnp", "--instance", str(inst), "--out", str(tmp_path / "s.json"), *extra])
    assert code == 4


def test_gen_rejects_unknown_preset(tmp_path):
    assert main(["gen", "--n", "5", "--compartments", "3", "--out", str(tmp_path / "x.json")]) == 4


def test_experiment_command(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({}))
    assert main(["experiment", "--spec", str(spec), "--out", str(tmp_path / "out")]) == 0
    assert "(no runs)" in capsys.readouterr().out
    spec.write_text(json.dumps({"instances": [{"generator": {"n_clients": 5, "horizon_days": 2, "seed": 1}}],
                                "modes": ["lh"]}))
    assert main(["experiment", "--spec", str(spec), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "results.csv").exists()


def test_module_entry_point(gen_file, tmp_path):
    res = subprocess.run([sys.executable, "-m", "mcbp", "solve", "--mode", "lh", "--instance", str(gen_file),
                          "--out", str(tmp_path / "s.json")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert res.stdout.startswith("feasible")
