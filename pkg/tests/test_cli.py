import json
import subprocess
import sys
from dataclasses import replace

import pytest

from bistab import cli, serialize
from bistab.config import Quantity, SimulateConfig
from bistab.presets import PRESETS, get_preset
from bistab.roots import RootFindingError


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(cfg.dumps())
    return str(path)


def point(preset, curve, p_pu, unit, **drive):
    cfg = get_preset(preset).scenario(curve, unit)
    d = {**cfg.drive, "p_pu": Quantity(p_pu, unit), **drive}
    return replace(cfg, sweep=None, drive=d)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def solve_rows(tmp_path, cfg, capsys, *extra):
    code, out, err = run(["solve", "--config", write_cfg(tmp_path, cfg), "--format", "json", *extra], capsys)
    assert code == cli.EXIT_OK, err
    doc = json.loads(out)
    return [dict(zip(doc["columns"], r)) for r in doc["rows"]]


def test_solve_below_threshold_single_stable_root(tmp_path, capsys):
    rows = solve_rows(tmp_path, point("fig3", "Pco=0.005uW", 0.001, "nW"), capsys)
    assert [r["stability"] for r in rows] == ["stable"]


def test_solve_mid_window_pattern(tmp_path, capsys):
    rows = solve_rows(tmp_path, point("fig3", "Pco=0.005uW", 0.05, "nW"), capsys)
    assert [r["stability"] for r in rows] == ["stable", "unstable", "stable"]
    assert rows[0]["n_p1"] < rows[1]["n_p1"] < rows[2]["n_p1"]
    assert all(r["residual"] < 1e-9 for r in rows)


def test_solve_literal_microwatt_point_is_single_valued(tmp_path, capsys):
    # the microwatt reading is far above threshold for the coupling cavity
    # alone; the single root carries an oscillatory instability
    rows = solve_rows(tmp_path, point("fig3", "Pco=0.005uW", 0.001, "uW"), capsys)
    assert len(rows) == 1
    assert rows[0]["stability"] == "unstable"


def test_solve_zero_power(tmp_path, capsys):
    cfg = point("fig3", "Pco=0.005uW", 0.0, "nW", p_co=Quantity(0.0, "nW"))
    rows = solve_rows(tmp_path, cfg, capsys)
    assert len(rows) == 1
    assert (rows[0]["n_p1"], rows[0]["n_p2"]) == (0.0, 0.0)
    assert rows[0]["stability"] == "stable"


def test_solve_exact_mode_and_csv_file(tmp_path, capsys):
    cfg = point("fig3", "Pco=0.005uW", 0.05, "nW")
    out = tmp_path / "roots.csv"
    code, stdout, _ = run(["solve", "--config", write_cfg(tmp_path, cfg), "--mode", "exact", "--out", str(out)], capsys)
    assert code == 0 and "root(s)" in stdout
    rows = serialize.read_csv(out)
    assert list(rows[0]) == list(serialize.COLUMNS)
    assert len(rows) == 3


def test_solve_rejects_sweep_section(tmp_path, capsys):
    cfg = get_preset("fig3").scenario("Pco=0.005uW", "nW")
    code, _, err = run(["solve", "--config", write_cfg(tmp_path, cfg)], capsys)
    assert code == cli.EXIT_CONFIG
    assert json.loads(err) == {"error": "config", "field": "sweep", "message": json.loads(err)["message"]}


@pytest.mark.parametrize(
    "text, field",
    [
        ("{not json", ""),
        ('{"system": {}, "drive": {}}', "system.omega_pu"),
    ],
)
def test_malformed_config_exit_code(tmp_path, capsys, text, field):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, _, err = run(["solve", "--config", str(path)], capsys)
    assert code == cli.EXIT_CONFIG
    e = json.loads(err)
    assert e["error"] == "config" and e["field"] == field and e["message"]


def test_bare_number_config_is_rejected(tmp_path, capsys):
    d = point("fig3", "Pco=0.005uW", 0.05, "nW").to_dict()
    d["drive"]["p_pu"] = 5e-11
    path = tmp_path / "bare.json"
    path.write_text(json.dumps(d))
    code, _, err = run(["solve", "--config", str(path)], capsys)
    assert code == cli.EXIT_CONFIG and json.loads(err)["field"] == "drive.p_pu"


def test_missing_config_flag_and_unknown_preset(capsys):
    code, _, err = run(["solve"], capsys)
    assert code == cli.EXIT_CONFIG and json.loads(err)["field"] == "--config"
    code, _, err = run(["figures", "fig99"], capsys)
    assert code == cli.EXIT_CONFIG and json.loads(err)["field"] == "preset"
    code, _, err = run(["sweep", "--config", "x.json", "--points", "1"], capsys)
    assert code == cli.EXIT_CONFIG


def test_io_errors(tmp_path, capsys):
    code, _, err = run(["solve", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == cli.EXIT_IO and json.loads(err)["error"] == "io"
    cfg = point("fig3", "Pco=0.005uW", 0.05, "nW")
    code, _, err = run(["solve", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "no" / "dir.csv")], capsys)
    assert code == cli.EXIT_IO


def test_solver_errors_exit_3(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise RootFindingError("no steady state found")

    monkeypatch.setattr(cli, "find_all_roots", boom)
    cfg = point("fig3", "Pco=0.005uW", 0.05, "nW")
    code, _, err = run(["solve", "--config", write_cfg(tmp_path, cfg)], capsys)
    assert code == cli.EXIT_SOLVER
    assert json.loads(err)["error"] == "solver"


def test_sweep_output_is_deterministic(tmp_path, capsys):
    cfg = get_preset("fig3").scenario("Pco=0.005uW", "nW", points=41)
    path = write_cfg(tmp_path, cfg)
    outs = []
    for k, fmt in enumerate(("csv", "csv", "json", "json")):
        out = tmp_path / f"s{k}.{fmt}"
        assert run(["sweep", "--config", path, "--format", fmt, "--out", str(out)], capsys)[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] and outs[2] == outs[3]
    rows = serialize.read_csv(tmp_path / "s0.csv")
    doc = json.loads(outs[2])
    # 17 significant digits reload to the same doubles as the JSON repr
    assert [float(r["n_p1"]) for r in rows] == [r[1] for r in doc["rows"]]
    assert sorted({float(r["axis"]) for r in rows}) == list(cfg.sweep.values())


def test_hysteresis_writes_both_passes(tmp_path, capsys):
    cfg = get_preset("fig3").scenario("Pco=0.005uW", "nW", points=161)
    path = write_cfg(tmp_path, cfg)
    code, _, err = run(["hysteresis", "--config", path], capsys)
    assert code == cli.EXIT_CONFIG and json.loads(err)["field"] == "--out"
    code, out, _ = run(["hysteresis", "--config", path, "--out", str(tmp_path / "h.csv")], capsys)
    assert code == 0
    up, down = serialize.read_csv(tmp_path / "h_up.csv"), serialize.read_csv(tmp_path / "h_down.csv")
    assert len(up) == len(down) == 161
    assert float(up[0]["axis"]) < float(up[-1]["axis"])
    assert float(down[0]["axis"]) > float(down[-1]["axis"])
    assert "up: 1 jump(s)" in out and "down: 1 jump(s)" in out


def test_figures_fig2a_writes_three_sweeps(tmp_path, capsys):
    code, out, _ = run(["figures", "fig2a", "--out", str(tmp_path), "--points", "121"], capsys)
    assert code == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["fig2a_Ppu_0.01uW.csv", "fig2a_Ppu_0.10uW.csv", "fig2a_Ppu_0.20uW.csv"]
    rows = serialize.read_csv(tmp_path / files[0])
    assert len({r["axis"] for r in rows}) == 121


@pytest.mark.parametrize("unit, jumps_at_020", [("uW", 0), ("nW", 2)])
def test_figures_fig4_writes_three_pairs(tmp_path, capsys, unit, jumps_at_020):
    code, out, _ = run(["figures", "fig4", "--out", str(tmp_path), "--power-unit", unit], capsys)
    assert code == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert len(files) == 6
    assert f"fig4_Pco_0.020{unit}_up.csv" in files
    line = next(s for s in out.splitlines() if s.startswith("Pco=0.020uW up"))
    assert f": {jumps_at_020} jump(s)" in line


def test_figures_are_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["figures", "fig9", "--out", str(tmp_path / d), "--points", "101", "--format", "json"], capsys)[0] == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 6
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_simulate_from_origin_and_seeded_perturbation(tmp_path, capsys):
    base = point("fig3", "Pco=0.005uW", 0.05, "nW")
    sim = SimulateConfig(t_max=Quantity(0.05, "us"), initial="root:0", perturbation=1e-3, samples=11)
    path = write_cfg(tmp_path, replace(base, simulate=sim))
    a = run(["simulate", "--config", path, "--seed", "3"], capsys)[1]
    b = run(["simulate", "--config", path, "--seed", "3"], capsys)[1]
    c = run(["simulate", "--config", path, "--seed", "4"], capsys)[1]
    assert a == b != c
    lines = a.splitlines()
    assert lines[0].split(",") == list(serialize.TRAJECTORY_COLUMNS)
    assert len(lines) == 12

    sim = SimulateConfig(t_max=Quantity(0.05, "us"), initial="origin", samples=5)
    rows = run(["simulate", "--config", write_cfg(tmp_path, replace(base, simulate=sim)), "--format", "json"], capsys)[1]
    doc = json.loads(rows)
    assert doc["rows"][0][2:] == [0.0] * 10
    assert doc["meta"]["ramp"] is False


def test_simulate_ramp(tmp_path, capsys):
    cfg = get_preset("fig3").ramp_scenario("Pco=0.005uW", Quantity(0.2, "us"), "nW", samples=21)
    code, out, _ = run(["simulate", "--config", write_cfg(tmp_path, cfg)], capsys)
    assert code == 0
    rows = out.splitlines()[1:]
    powers = [float(r.split(",")[1]) for r in rows]
    assert powers[0] == 0.0 and powers[-1] == pytest.approx(0.4e-9)


def test_simulate_config_errors(tmp_path, capsys):
    base = point("fig3", "Pco=0.005uW", 0.05, "nW")
    for sim, field in (
        (None, "simulate"),
        (SimulateConfig(), "simulate.t_max"),
        (SimulateConfig(ramp_start=Quantity(0.0, "nW")), "simulate"),
        (SimulateConfig(t_max=Quantity(1.0, "ns"), initial="root:7"), "simulate.initial"),
    ):
        code, _, err = run(["simulate", "--config", write_cfg(tmp_path, replace(base, simulate=sim))], capsys)
        assert code == cli.EXIT_CONFIG and json.loads(err)["field"] == field


def test_list_presets(capsys):
    code, out, _ = run(["list-presets"], capsys)
    assert code == 0
    names = [line.split("\t")[0] for line in out.splitlines()]
    assert names == list(PRESETS)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bistab", "list-presets"], capture_output=True, text=True, check=True)
    assert res.stdout.startswith("fig2a\t")
