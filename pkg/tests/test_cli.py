import json

import pytest

from confindex.cli import main

SMALL = ["--n", "60", "--features", "16", "--repeats", "3"]


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_simulate_writes_dataset(tmp_path):
    out = tmp_path / "s"
    code = main(["simulate", "--preset", "disjoint", "--ky", "5", "--kc", "5", "--n", "200",
                 "--seed", "7", "--out", str(out)])
    assert code == 0
    lines = (out / "dataset.csv").read_text().splitlines()
    assert len(lines) == 801
    sim = json.loads((out / "simconfig.json").read_text())
    assert sim["k_plus"] == sim["k_minus"] == 5 and sim["seed"] == 7
    resolved = json.loads((out / "resolved-config.json").read_text())
    assert resolved["command"] == "simulate"
    assert resolved["simulation"]["preset"] == "disjoint"


def test_simulate_twice_identical(tmp_path):
    args = ["simulate", "--ky", "1", "--kc", "2", "--n", "20", "--seed", "3"]
    main([*args, "--out", str(tmp_path / "a")])
    main([*args, "--out", str(tmp_path / "b")])
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_invalid_preset_lists_presets(tmp_path, capsys):
    code = main(["simulate", "--preset", "no-such", "--out", str(tmp_path / "x")])
    assert code == 1
    err = capsys.readouterr().err
    assert "no-such" in err and "disjoint" in err and "minus-alpha" in err
    assert not (tmp_path / "x").exists()


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ci", "--no-such-flag"])
    assert exc.value.code == 1


@pytest.fixture(scope="module")
def ci_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("ci")
    code = main(["ci", "--ky", "0", "--kc", "10", *SMALL, "--seed", "5", "--out", str(out)])
    return code, out


def test_ci_outputs(ci_out):
    code, out = ci_out
    assert code == 0
    assert {"report.json", "resolved-config.json", "curves_phi.csv",
            "curves_phi_star.csv"} <= set(_files(out))
    rep = json.loads((out / "report.json").read_text())
    assert rep["scenario"] == "BOTH_MONOTONE"
    assert rep["ci"] > 0.5
    assert rep["phi"]["pro_monotone_increasing"] and rep["phi"]["cons_monotone_decreasing"]
    assert rep["config"] == json.loads((out / "resolved-config.json").read_text())
    assert rep["config"]["schedule"]["cell_size"] == 24
    header = (out / "curves_phi.csv").read_text().splitlines()[0]
    assert header == "b,mean_auc_pro,stderr_pro,mean_auc_cons,stderr_cons"


def test_ci_deterministic_for_any_jobs(ci_out, tmp_path):
    _, first = ci_out
    again = tmp_path / "again"
    main(["ci", "--ky", "0", "--kc", "10", *SMALL, "--seed", "5", "--jobs", "2",
          "--out", str(again)])
    assert _files(again) == _files(first)


def test_ci_undefined_exits_two(tmp_path, capsys):
    code = main(["ci", "--ky", "0", "--kc", "0", *SMALL, "--delta", "1e-6", "--seed", "0",
                 "--out", str(tmp_path)])
    assert code == 2
    assert "matched" in capsys.readouterr().err
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["scenario"] == "UNDEFINED" and rep["ci"] is None


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "seed": 9,
        "simulation": {"n_per_cell": 60, "n_features": 16, "k_alpha": 10, "k_beta": 10},
        "schedule": {"repeats": 2, "step": 0.5},
    }))
    out = tmp_path / "o"
    assert main(["ci", "--config", str(cfg), "--seed", "4", "--out", str(out)]) in (0, 2)
    resolved = json.loads((out / "resolved-config.json").read_text())
    assert resolved["seed"] == 4
    assert resolved["schedule"] == {"cell_size": 24, "repeats": 2, "step": 0.5}
    assert resolved["simulation"]["k_alpha"] == 10


@pytest.mark.parametrize("doc, where", [
    ({"schedule": {"step": 0}}, "schedule/step"),
    ({"simulation": {"k_plus": "big"}}, "simulation/k_plus"),
    ({"unknown_key": 1}, "<root>"),
])
def test_schema_violation_exits_one(tmp_path, capsys, doc, where):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(doc))
    assert main(["ci", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert where in capsys.readouterr().err


def test_ci_from_csv(tmp_path):
    sim = tmp_path / "sim"
    main(["simulate", "--kc", "10", *SMALL[:4], "--seed", "2", "--out", str(sim)])
    out = tmp_path / "o"
    code = main(["ci", "--data", str(sim / "dataset.csv"), "--label", "label",
                 "--confounder", "confounder", "--repeats", "2", "--out", str(out)])
    assert code in (0, 2)
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["data"]["path"].endswith("dataset.csv")


def test_ci_missing_data_file_exits_one(tmp_path, capsys):
    code = main(["ci", "--data", str(tmp_path / "none.csv"), "--confounder", "c",
                 "--out", str(tmp_path)])
    assert code == 1
    assert "not found" in capsys.readouterr().err


def test_monotonicity_toy_curve(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("b,mean_auc\n0,0.5\n0.5,0.6\n1,0.7\n")
    assert main(["monotonicity", str(p), "--delta", "0.05"]) == 0
    v = json.loads(capsys.readouterr().out)["series"]["curve"]
    assert v["INCREASING"] is True and v["DECREASING"] is False
    assert [(q["i"], q["j"]) for q in v["pairs"]] == [(0, 1), (1, 2)]


def test_monotonicity_flat_curve_vacuous(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("b,mean_auc\n0,0.50\n0.5,0.52\n1,0.49\n")
    main(["monotonicity", str(p), "--delta", "0.1"])
    v = json.loads(capsys.readouterr().out)["series"]["curve"]
    assert v["INCREASING"] and v["DECREASING"] and v["pairs"] == []


def test_monotonicity_on_engine_curves(ci_out, tmp_path, capsys):
    _, out = ci_out
    assert main(["monotonicity", str(out / "curves_phi.csv"), "--out", str(tmp_path)]) == 0
    v = json.loads(capsys.readouterr().out)["series"]
    assert v["pro"]["INCREASING"] and v["cons"]["DECREASING"]
    assert (tmp_path / "report.json").exists()


def test_monotonicity_malformed(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("b,mean_auc\n0,oops\n1,0.5\n")
    assert main(["monotonicity", str(p)]) == 1
    assert main(["monotonicity", str(tmp_path / "missing.csv")]) == 1


def test_monotonicity_needs_delta_without_stderr(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("b,mean_auc\n0,0.5\n1,0.6\n")
    assert main(["monotonicity", str(p)]) == 1
    assert "--delta" in capsys.readouterr().err


def test_rp_sweep(tmp_path):
    out = tmp_path / "rp"
    code = main(["rp-sweep", "--P", "0.5,0.9", "--perms", "10", "--n-per-class", "100",
                 "--seed", "1", "--out", str(out)])
    assert code == 0
    rows = (out / "rp_sweep.csv").read_text().splitlines()
    assert rows[0] == "P,rp_mean_auc,p_value" and len(rows) == 3
    rep = json.loads((out / "report.json").read_text())
    assert rep["sweep"][1]["rp_mean_auc"] > rep["sweep"][0]["rp_mean_auc"]
    assert rep["config"]["permutation"]["n_perms"] == 10
