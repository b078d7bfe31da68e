import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qmac import cli, formats
from qmac.ensemble import classical_ensemble, two_basis_example

from conftest import H_RHO_C


@pytest.fixture
def example_dict():
    return formats.ensemble_to_dict(two_basis_example())


def write_config(tmp_path, name="run.json", **cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_entropy_example(tmp_path, example_dict):
    cfg = write_config(tmp_path, ensemble=example_dict)
    out = tmp_path / "out.json"
    assert run("entropy", "--config", cfg, "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["command"] == "entropy"
    assert data["h_joint"] == pytest.approx(1.0, abs=1e-9)
    assert data["h_cond_A"] == pytest.approx(H_RHO_C, abs=1e-9)
    assert data["h_cond_B"] == pytest.approx(1.0, abs=1e-9)


def test_json_is_sorted_and_17_digits(tmp_path, example_dict):
    cfg = write_config(tmp_path, ensemble=example_dict)
    out = tmp_path / "out.json"
    run("entropy", "--config", cfg, "--out", out)
    text = out.read_text()
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert f"{H_RHO_C:.17g}" in text
    assert '"h_joint": 1.0' in text


def test_stdout_when_no_out(tmp_path, example_dict, capsys):
    cfg = write_config(tmp_path, ensemble=example_dict)
    assert run("entropy", "--config", cfg) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "entropy"


def test_ensemble_file_reference(tmp_path, example_dict):
    (tmp_path / "ens.json").write_text(json.dumps(example_dict))
    cfg = write_config(tmp_path, ensemble="ens.json")
    out = tmp_path / "out.json"
    assert run("entropy", "--config", cfg, "--out", out) == 0


def test_region_trivial_alphabets(tmp_path):
    ens = formats.ensemble_to_dict(classical_ensemble([1.0], [1.0]))
    cfg = write_config(tmp_path, ensemble=ens, grid_step=1.0)
    out = tmp_path / "r.json"
    assert run("region", "--config", cfg, "--out", out) == 0
    assert json.loads(out.read_text())["region"]["vertices"] == [[0.0, 0.0]]


def test_region_csv(tmp_path, example_dict):
    cfg = write_config(tmp_path, ensemble=example_dict, grid_step=0.25)
    out = tmp_path / "r.csv"
    assert run("region", "--config", cfg, "--out", out, "--format", "csv") == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r1,r2"
    pts = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    assert np.allclose(pts[0], 0)
    assert np.all(pts.sum(axis=1) <= 1 + 1e-9)


def test_region_random_samples_need_seed(tmp_path, example_dict):
    cfg = write_config(tmp_path, ensemble=example_dict, grid_step=0.5, random_samples=10)
    out = tmp_path / "r.json"
    assert run("region", "--config", cfg, "--out", out) == 1
    assert not out.exists()
    assert run("region", "--config", cfg, "--out", out, "--seed", 3) == 0


def test_simulate_codebook(tmp_path, example_dict):
    cb = {"alice_strings": ["AA", "AB"], "bob_strings": ["CD", "DD"]}
    cfg = write_config(tmp_path, ensemble=example_dict, codebook=cb, delta=1.0)
    out = tmp_path / "s.json"
    assert run("simulate", "--config", cfg, "--out", out) == 0
    assert json.loads(out.read_text())["p_error"] == pytest.approx(0.5, abs=1e-9)


def test_simulate_random_code_and_figure(tmp_path, example_dict):
    rc = {"alice_cycle": ["A"], "N": 2, "L": [2, 3], "trials": 20}
    cfg = write_config(tmp_path, ensemble=example_dict, random_code=rc, seed=11)
    out = tmp_path / "s.json"
    assert run("simulate", "--config", cfg, "--out", out, "--figure") == 0
    res = json.loads(out.read_text())["results"]
    assert [r["L"] for r in res] == [2, 3]
    assert all(r["trials"] == 20 for r in res)
    png = out.with_suffix(".png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_simulate_random_needs_seed(tmp_path, example_dict):
    rc = {"alice_cycle": ["A"], "N": 2, "L": 2, "trials": 5}
    cfg = write_config(tmp_path, ensemble=example_dict, random_code=rc)
    assert run("simulate", "--config", cfg, "--out", tmp_path / "x.json") == 1
    assert not (tmp_path / "x.json").exists()


def test_seed_determinism_and_threads(tmp_path, example_dict):
    rc = {"alice_cycle": ["A", "B"], "N": 3, "L": [2, 3], "trials": 30}
    cfg = write_config(tmp_path, ensemble=example_dict, random_code=rc)
    outs = []
    for k, threads in enumerate((1, 1, 3)):
        out = tmp_path / f"d{k}.json"
        assert run("simulate", "--config", cfg, "--out", out, "--seed", 99, "--threads", threads) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    other = tmp_path / "other.json"
    run("simulate", "--config", cfg, "--out", other, "--seed", 100)
    assert other.read_bytes() != outs[0]


def test_cli_seed_overrides_config(tmp_path, example_dict):
    rc = {"alice_cycle": ["A"], "N": 3, "L": 2, "trials": 10}
    a = write_config(tmp_path, "a.json", ensemble=example_dict, random_code=rc, seed=5)
    b = write_config(tmp_path, "b.json", ensemble=example_dict, random_code=rc, seed=6)
    run("simulate", "--config", a, "--out", tmp_path / "a.out", "--seed", 7)
    run("simulate", "--config", b, "--out", tmp_path / "b.out", "--seed", 7)
    assert (tmp_path / "a.out").read_bytes() == (tmp_path / "b.out").read_bytes()


def test_superdense_bell(tmp_path):
    cfg = write_config(tmp_path, schmidt=[2 ** -0.5, 2 ** -0.5], emit_ensemble=True)
    out = tmp_path / "sd.json"
    assert run("superdense", "--config", cfg, "--out", out, "--figure") == 0
    data = json.loads(out.read_text())
    assert data["profile"]["h_joint"] == pytest.approx(2.0, abs=1e-9)
    assert data["bounds_hold"]
    # the emitted ensemble is usable as input to other commands
    cfg2 = write_config(tmp_path, "e.json", ensemble=data["ensemble"])
    assert run("entropy", "--config", cfg2, "--out", tmp_path / "e.out") == 0
    assert out.with_suffix(".png").exists()


def test_superdense_subset_and_identity(tmp_path):
    cfg = write_config(tmp_path, schmidt=[2 ** -0.5, 2 ** -0.5],
                       bob={"shifts": False, "phases": False})
    out = tmp_path / "sd.json"
    assert run("superdense", "--config", cfg, "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["profile"]["h_cond_A"] == pytest.approx(2.0, abs=1e-9)
    assert data["bob_unitaries"] == ["X0Z0"]
    bad = write_config(tmp_path, "bad.json", schmidt=[1.0, 0.0], alice={"subset": [9]})
    assert run("superdense", "--config", bad) == 1


def test_converse_command(tmp_path, example_dict):
    cfg = write_config(tmp_path, ensemble=example_dict,
                       codebook={"alice_strings": ["AA", "AB"], "bob_strings": ["CD", "DD"]},
                       random_codebooks={"count": 4, "M": 2, "N": 3, "L": 2}, seed=1)
    out = tmp_path / "c.json"
    assert run("converse", "--config", cfg, "--out", out) == 0
    data = json.loads(out.read_text())
    assert len(data["codebooks"]) == 5 and data["all_hold"]
    csv_out = tmp_path / "c.csv"
    assert run("converse", "--config", cfg, "--out", csv_out, "--format", "csv") == 0
    assert csv_out.read_text().splitlines()[0] == "codebook,position,h,h_cond_A,h_cond_B"


def test_check_table(tmp_path, example_dict):
    cfg = write_config(tmp_path, ensemble=example_dict)
    out = tmp_path / "chk.csv"
    assert run("check", "--config", cfg, "--out", out, "--format", "csv") == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "check,pass,value"
    names = {r.split(",")[0] for r in rows[1:]}
    assert {"subadditivity", "ssa_witness_identities", "concavity_h_cond_A"} <= names
    assert all(r.split(",")[1] == "True" for r in rows[1:])


def test_check_reports_invalid_ensemble(tmp_path, example_dict):
    example_dict["states"][0][0] = [[2.0, 0.0], [0.0, 0.0]]
    cfg = write_config(tmp_path, ensemble=example_dict)
    out = tmp_path / "chk.json"
    assert run("check", "--config", cfg, "--out", out) == 2
    data = json.loads(out.read_text())
    assert not data["all_pass"] and data["problems"]


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(p=[0.7, 0.7]),
    lambda d: d.pop("states"),
    lambda d: d.update(dim=3),
    lambda d: d["states"][0].pop(),
])
def test_invalid_ensembles_exit_1(tmp_path, example_dict, mutate):
    mutate(example_dict)
    cfg = write_config(tmp_path, ensemble=example_dict)
    out = tmp_path / "o.json"
    assert run("entropy", "--config", cfg, "--out", out) == 1
    assert not out.exists()


def test_usage_errors_exit_1(tmp_path, example_dict, capsys):
    cfg = write_config(tmp_path, ensemble=example_dict)
    with pytest.raises(SystemExit) as exc:
        run("bogus", "--config", cfg)
    assert exc.value.code == 1
    assert run("entropy", "--config", tmp_path / "missing.json") == 1
    (tmp_path / "broken.json").write_text("{not json")
    assert run("entropy", "--config", tmp_path / "broken.json") == 1
    wrong = write_config(tmp_path, "w.json", command="region", ensemble=example_dict)
    assert run("entropy", "--config", wrong) == 1
    assert "invalid input" in capsys.readouterr().err


def test_dimension_cap_exit_2(tmp_path, example_dict, monkeypatch):
    cb = {"alice_strings": ["AAAA"], "bob_strings": ["CCCC", "DDDD"]}
    cfg = write_config(tmp_path, ensemble=example_dict, codebook=cb)
    out = tmp_path / "o.json"
    monkeypatch.setenv("QMAC_DIM_CAP", "8")
    assert run("simulate", "--config", cfg, "--out", out) == 2
    assert not out.exists()
    monkeypatch.setenv("QMAC_DIM_CAP", "16")
    assert run("simulate", "--config", cfg, "--out", out) == 0


def test_no_partial_output_and_existing_file_kept(tmp_path, example_dict):
    out = tmp_path / "o.json"
    out.write_text("previous")
    bad = dict(example_dict, q=[1.5, -0.5])
    cfg = write_config(tmp_path, ensemble=bad)
    assert run("entropy", "--config", cfg, "--out", out) == 1
    assert out.read_text() == "previous"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["o.json", "run.json"]


def test_inputs_not_mutated(tmp_path, example_dict):
    (tmp_path / "ens.json").write_text(json.dumps(example_dict))
    cfg = write_config(tmp_path, ensemble="ens.json",
                       codebook={"alice_strings": ["AA"], "bob_strings": ["CD", "DC"]})
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    for cmd in ("entropy", "simulate", "converse", "check"):
        assert run(cmd, "--config", cfg, "--out", tmp_path / "out" / f"{cmd}.json") == 0
    assert {n: (tmp_path / n).read_bytes() for n in before} == before


def test_module_entry_point(tmp_path, example_dict):
    cfg = write_config(tmp_path, ensemble=example_dict)
    proc = subprocess.run([sys.executable, "-m", "qmac", "entropy", "--config", str(cfg)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["h_joint"] == pytest.approx(1.0)


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("name", sorted(p.stem for p in CONFIG_DIR.glob("*.json") if p.stem != "two_basis"))
def test_shipped_configs_run(tmp_path, name):
    cfg = CONFIG_DIR / f"{name}.json"
    command = json.loads(cfg.read_text())["command"]
    out = tmp_path / f"{name}.json"
    assert run(command, "--config", cfg, "--out", out) == 0
    assert json.loads(out.read_text())["command"] == command
