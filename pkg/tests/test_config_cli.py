import copy
import json

import pytest

from ritt_lab.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, compare, main, run
from ritt_lab.config import ConfigError, parse_config
from ritt_lab.seq import seq_from_json

BASE = {
    "version": 1,
    "output_dir": "unused",
    "seed": 3,
    "experiments": [
        {
            "name": "alpha",
            "family": {"family": "alpha_frac", "alpha": 0.5, "N": 4096},
            "diagnostics": [
                {"kind": "ritt_table", "n_grid": [2, 4, 8, 16]},
                {"kind": "half_table", "n_grid": [2, 4, 8, 16]},
                "sector_report",
            ],
        },
        {
            "name": "ops",
            "operator_suite": {
                "matrix": {"source": "random_normal", "d": 3, "count": 2},
                "family": {"family": "alpha_frac", "alpha": 0.5, "N": 4096},
                "checks": ["power_bound", "subordination", "spectral_map", "semigroup_law"],
                "params": {"n_angles": 16},
            },
        },
    ],
}


def cfg_text(obj=BASE) -> str:
    return json.dumps(obj, indent=2)


def write_cfg(tmp_path, obj=BASE, name="c.json"):
    p = tmp_path / name
    p.write_text(cfg_text(obj))
    return p


# --------------------------------------------------------------------------
# validation


def test_parse_valid_config():
    cfg = parse_config(cfg_text())
    assert [e.name for e in cfg.experiments] == ["alpha", "ops"]


def test_invalid_alpha_names_field_and_line():
    bad = copy.deepcopy(BASE)
    bad["experiments"][0]["family"]["alpha"] = 1.5
    with pytest.raises(ConfigError, match=r"line \d+: experiments\[0\]\.family.*alpha"):
        parse_config(cfg_text(bad))


@pytest.mark.parametrize(
    "mutate,pattern",
    [
        (lambda c: c.update(colour=1), "colour"),
        (lambda c: c.update(version=7), "version"),
        (lambda c: c["experiments"][0].update(extra=True), "extra"),
        (lambda c: c["experiments"][1]["operator_suite"]["params"].update(nope=1), "nope"),
        (lambda c: c["experiments"][0].update(tolerances={"subordination": -1.0}), "subordination"),
        (lambda c: c["experiments"][0]["diagnostics"].append("bogus"), "bogus"),
        (lambda c: c["experiments"][0].update(diagnostics=[], family=None), "experiments\\[0\\]"),
    ],
)
def test_config_errors(mutate, pattern):
    bad = copy.deepcopy(BASE)
    mutate(bad)
    with pytest.raises(ConfigError, match=pattern):
        parse_config(cfg_text(bad))


def test_config_error_exit_code(tmp_path, capsys):
    bad = copy.deepcopy(BASE)
    bad["experiments"][0]["family"]["alpha"] = 1.5
    assert main(["run", "--config", str(write_cfg(tmp_path, bad)), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "line" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


# --------------------------------------------------------------------------
# runs and comparison


@pytest.fixture(scope="module")
def base_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run_a")
    assert run(parse_config(cfg_text()), str(out)) == EXIT_OK
    return out


def test_run_writes_tables_and_manifest(base_run):
    manifest = (base_run / "MANIFEST").read_text().splitlines()
    names = {line.split()[1] for line in manifest}
    assert {"alpha/ritt_table.csv", "alpha/half_table.csv", "alpha/sector.csv", "ops/operators.json"} <= names
    rows = (base_run / "alpha" / "ritt_table.csv").read_text().splitlines()
    assert rows[0] == "index,lower,upper"
    assert [int(r.split(",")[0]) for r in rows[1:]] == [2, 4, 8, 16]


def test_rerun_is_byte_identical(base_run, tmp_path):
    out = tmp_path / "b"
    assert run(parse_config(cfg_text()), str(out)) == EXIT_OK
    for f in base_run.rglob("*.csv"):
        assert f.read_bytes() == (out / f.relative_to(base_run)).read_bytes()
    assert (base_run / "MANIFEST").read_text() == (out / "MANIFEST").read_text()
    rep = compare(base_run, out)
    assert rep["ok"] and not rep["failed"] and not rep["missing"]
    assert all(r["status"] == "pass" for r in rep["rows"])


def test_perturbed_tolerance_is_localized(base_run, tmp_path):
    pert = copy.deepcopy(BASE)
    pert["experiments"][1]["tolerances"] = {"subordination": 1e-300}
    out = tmp_path / "p"
    run(parse_config(cfg_text(pert)), str(out))
    rep = compare(base_run, out)
    assert not rep["ok"]
    assert "ops/operators.json" in rep["failed"]
    assert not any(a.startswith("alpha/") for a in rep["failed"])


def _method_runs(tmp_path):
    one = copy.deepcopy(BASE)
    one["experiments"] = one["experiments"][:1]
    a, b = tmp_path / "direct", tmp_path / "fft"
    run(parse_config(cfg_text(one)), str(a), method="direct")
    run(parse_config(cfg_text(one)), str(b), method="fft")
    return a, b


def test_direct_and_fft_runs_agree(tmp_path):
    a, b = _method_runs(tmp_path)
    rep = compare(a, b, tolerance=1e-10)
    # method-independent artifacts are identical
    assert {"alpha/sector.csv", "alpha/sector.json", "config.json"} <= {
        r["artifact"] for r in rep["rows"] if r["status"] == "pass"
    }
    for name in ("ritt_table", "half_table"):
        ta = json.loads((a / "alpha" / f"{name}.json").read_text())
        tb = json.loads((b / "alpha" / f"{name}.json").read_text())
        for ra, rb in zip(ta["rows"] + ta["raw"], tb["rows"] + tb["raw"]):
            assert abs(ra["estimate"] - rb["estimate"]) <= 1e-10 * max(1, abs(ra["estimate"]))
            assert max(ra["lower"], rb["lower"]) <= min(ra["upper"], rb["upper"])
        assert ta["verdict"] == tb["verdict"]


@pytest.mark.xfail(strict=True, reason="certified bounds carry method-specific rounding budgets (~1e-9 apart)")
def test_direct_and_fft_compare_at_1e10(tmp_path):
    a, b = _method_runs(tmp_path)
    assert compare(a, b, tolerance=1e-10)["ok"]


def test_missing_artifact_is_listed(base_run, tmp_path):
    one = copy.deepcopy(BASE)
    one["experiments"] = one["experiments"][:1]
    out = tmp_path / "short"
    run(parse_config(cfg_text(one)), str(out))
    rep = compare(base_run, out)
    assert "ops/operators.json" in rep["missing"]
    # only the run-level files differ; missing artifacts are not failures
    assert set(rep["failed"]) <= {"config.json", "summary.json"}
    assert all(r["status"] == "pass" for r in rep["rows"] if r["artifact"].startswith("alpha/"))


def test_cli_compare_exit_codes(base_run, tmp_path, capsys):
    assert main(["compare", str(base_run), str(base_run)]) == EXIT_OK
    pert = copy.deepcopy(BASE)
    pert["experiments"][1]["tolerances"] = {"subordination": 1e-300}
    out = tmp_path / "p"
    main(["op", "--config", str(write_cfg(tmp_path, pert)), "--out", str(out)])
    report = tmp_path / "cmp.json"
    assert main(["compare", str(base_run), str(out), "--out", str(report)]) == EXIT_FAIL
    assert json.loads(report.read_text())["failed"]
    assert "FAIL" in capsys.readouterr().out


# --------------------------------------------------------------------------
# family subcommand


def test_family_spec_dump(tmp_path, capsys):
    spec = json.dumps({"family": "bernoulli", "beta": 0.25})
    assert main(["family", "--spec", spec]) == EXIT_OK
    f = seq_from_json(capsys.readouterr().out)
    assert list(f.coeffs) == [0.75, 0.25]
    assert main(["family", "--spec", spec, "--format", "csv", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "family.csv").exists() and (tmp_path / "MANIFEST").exists()
    assert main(["family", "--spec", json.dumps({"family": "alpha_frac", "alpha": 2})]) == EXIT_CONFIG


def test_family_from_config(tmp_path):
    out = tmp_path / "fam"
    assert main(["family", "--config", str(write_cfg(tmp_path)), "--out", str(out)]) == EXIT_OK
    f = seq_from_json((out / "alpha" / "family.json").read_text())
    assert len(f) == 4096


def test_shipped_reproduction_config_validates():
    from pathlib import Path

    from ritt_lab.config import load_config

    cfg = load_config(Path(__file__).resolve().parents[1] / "configs" / "reproduce.json")
    names = [e.name for e in cfg.experiments]
    assert {"A_half", "Z_half", "power_tail_mix", "B_half", "counterexample", "volterra"} <= set(names)
