import json
from pathlib import Path

import pytest

from udtune.cli import main
from udtune.config import ConfigError, env_workers, load_config, parse_config, shipped_config


def write_cfg(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def quad_cfg(**extra):
    return {"plant": "quadratic", "n": 11, **extra}


def read_all(d: Path):
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_table_n5_s2(tmp_path, capsys):
    assert main(["table", "--n", "5", "--s", "2", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "ud_table.csv").read_text().splitlines()
    assert rows[0] == "h_1,h_2,h_3,h_4"
    assert len(rows) == 6
    sel = json.loads((tmp_path / "selection.json").read_text())
    assert len(sel["indices"]) == 2


def test_table_n2_s1(tmp_path):
    assert main(["table", "--n", "2", "--s", "1", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "ud_table.csv").read_text() == "h_1\n1\n2\n"


def test_table_insufficient_columns(tmp_path, capsys):
    assert main(["table", "--n", "6", "--s", "3", "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("data", [{"n": 11}, {"plant": "submarine"}])
def test_unknown_plant(tmp_path, capsys, data):
    assert main(["search", "--config", write_cfg(tmp_path, data)]) == 2
    assert "unknown plant" in capsys.readouterr().err


@pytest.mark.parametrize("data", [
    quad_cfg(bogus=1), quad_cfg(n=1), quad_cfg(criterion="mse"), quad_cfg(sim={"dt": -1}),
    quad_cfg(weights=[1, 2]), quad_cfg(parameters=[{"name": "a"}]), quad_cfg(ga={"population": 7}),
])
def test_config_errors_exit_2(tmp_path, data):
    assert main(["search", "--config", write_cfg(tmp_path, data), "--out", str(tmp_path / "o")]) == 2


def test_missing_config_file(tmp_path):
    assert main(["search", "--config", str(tmp_path / "nope.json")]) == 2


def test_odd_population_exit_2(tmp_path):
    assert main(["ga", "--config", write_cfg(tmp_path, quad_cfg(ga={"population": 7}))]) == 2


def test_search_quadratic_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["search", "--config", write_cfg(tmp_path, quad_cfg()), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["n"] == 11 and len(rep["rows"]) == 11
    assert (out / "report.csv").read_text().count("\n") == 12
    assert (out / "ud_table.csv").read_text().splitlines()[0].count(",") == 2
    assert "wall time" in capsys.readouterr().out


def test_search_all_diverged_exit_3(tmp_path):
    data = {"plant": "helicopter3dof", "n": 7, "sim": {"dt": 0.01, "horizon": 5.0, "state_bound": 1e-3}}
    assert main(["search", "--config", write_cfg(tmp_path, data), "--out", str(tmp_path / "o")]) == 3


def test_search_n_override(tmp_path):
    out = tmp_path / "o"
    assert main(["search", "--config", write_cfg(tmp_path, quad_cfg()), "--n", "7", "--out", str(out)]) == 0
    assert json.loads((out / "report.json").read_text())["n"] == 7


def test_helicopter_search_writes_trajectory(tmp_path):
    data = json.loads(shipped_config("helicopter_n301.json").read_text())
    data["n"] = 13
    out = tmp_path / "o"
    assert main(["search", "--config", write_cfg(tmp_path, data), "--out", str(out)]) == 0
    head = (out / "best_trajectory.csv").read_text().splitlines()
    assert head[0].startswith("time,state_elevation")
    assert len(head) == 2002


def test_quadrotor_verification(tmp_path):
    data = json.loads(shipped_config("quadrotor.json").read_text())
    data["sim"]["horizon"] = 5.0
    out = tmp_path / "o"
    assert main(["search", "--config", write_cfg(tmp_path, data), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["mode"] == "verification" and rep["best"]["diverged"] is False


def test_ga_repeat_six(tmp_path, capsys):
    out = tmp_path / "o"
    data = quad_cfg(ga={"population": 6, "generations": 4, "seed": 0})
    assert main(["ga", "--config", write_cfg(tmp_path, data), "--repeat", "6", "--out", str(out)]) == 0
    for k in range(6):
        assert (out / f"seed_{k}" / "ga_report.json").exists()
        assert (out / f"seed_{k}" / "ga_curve.csv").exists()
    summary = (out / "ga_summary.csv").read_text().splitlines()
    assert summary[0] == "seed,k1,k2,k3,best_aggregate,evaluations"
    assert [line.split(",")[0] for line in summary[1:]] == [str(k) for k in range(6)]


def test_ga_seed_flag_is_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, quad_cfg(ga={"population": 6, "generations": 5}))
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["ga", "--config", cfg, "--seed", "7", "--out", str(a)]) == 0
    assert main(["ga", "--config", cfg, "--seed", "7", "--out", str(b)]) == 0
    assert main(["ga", "--config", cfg, "--seed", "8", "--out", str(c)]) == 0
    assert read_all(a) == read_all(b)
    assert read_all(a) != read_all(c)
    assert json.loads((a / "ga_report.json").read_text())["seed"] == 7


def test_shipped_configs_parse():
    for name in ("helicopter_n301.json", "helicopter_n601.json", "quadrotor.json", "quadratic.json"):
        cfg = load_config(shipped_config(name))
        assert cfg.plant.name
    assert load_config(shipped_config("helicopter_n601.json")).n == 601


def test_weights_by_channel_name():
    cfg = parse_config({"plant": "helicopter3dof", "weights": {"ele": 2, "pit": 0.5}})
    assert cfg.weights == [2.0, 0.5]
    with pytest.raises(ConfigError):
        parse_config({"plant": "helicopter3dof", "weights": {"ele": 2}})
    with pytest.raises(ConfigError):
        parse_config({"plant": "helicopter3dof", "weights": [1, -1]})


def test_env_workers(monkeypatch):
    monkeypatch.delenv("UDTUNE_WORKERS", raising=False)
    assert env_workers(3) == 3
    monkeypatch.setenv("UDTUNE_WORKERS", "5")
    assert env_workers(1) == 5
    monkeypatch.setenv("UDTUNE_WORKERS", "zero")
    with pytest.raises(ConfigError):
        env_workers(1)


def test_env_workers_do_not_change_search_output(tmp_path, monkeypatch):
    data = json.loads(shipped_config("helicopter_n301.json").read_text())
    data["n"] = 11
    cfg = write_cfg(tmp_path, data)
    monkeypatch.setenv("UDTUNE_WORKERS", "1")
    assert main(["search", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("UDTUNE_WORKERS", "4")
    assert main(["search", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    assert read_all(tmp_path / "a") == read_all(tmp_path / "b")


def test_csv_outputs_use_lf(tmp_path):
    out = tmp_path / "o"
    main(["search", "--config", write_cfg(tmp_path, quad_cfg()), "--out", str(out)])
    for p in out.glob("*.csv"):
        assert b"\r" not in p.read_bytes()


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "udtune", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "table" in r.stdout
