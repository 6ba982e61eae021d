from __future__ import annotations

import json

import pytest

from edgeindex.cli import main


def run(tmp_path, *args, config=None):
    argv = list(args) + ["--out", str(tmp_path / "out"), "--jobs", "1"]
    if config is not None:
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"schema": "edgeindex/1", **config}))
        argv += ["--config", str(path)]
    return main(argv)


def test_bulk_flux13(tmp_path):
    assert run(tmp_path, "bulk") == 0
    out = tmp_path / "out" / "bulk"
    chern = json.loads((out / "chern.json").read_text())
    assert chern["per_band"] == [1, -2, 1]
    assert (out / "spectrum.csv").read_text().count("\n") == 901
    assert (out / "spectrum.svg").read_text().startswith("<svg")


def test_bulk_zero_flux(tmp_path):
    assert run(tmp_path, "bulk", "--flux", "0") == 0
    chern = json.loads((tmp_path / "out" / "bulk" / "chern.json").read_text())
    assert chern["per_band"] == [0] and chern["gaps"] == []


def test_malformed_flux(tmp_path):
    assert run(tmp_path, "bulk", "--flux", "2/4") == 2


def test_wrong_schema(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"schema": "other/2"}))
    assert main(["bulk", "--config", str(p), "--out", str(tmp_path)]) == 2


def test_unreadable_config(tmp_path):
    assert main(["bulk", "--config", str(tmp_path / "missing.json")]) == 2


def test_bad_arguments():
    assert main(["frobnicate"]) == 2
    assert main(["bulk", "--jobs", "many"]) == 2


def test_help(capsys):
    assert main(["--help"]) == 0
    assert "exit codes" in capsys.readouterr().out.lower()


def test_closed_gap_is_physics_precondition(tmp_path):
    assert run(tmp_path, "index", config={"flux": "1/4", "gap": 3}) == 3


def test_gap_beyond_band_count(tmp_path):
    assert run(tmp_path, "index", config={"flux": "1/3", "gap": 5}) == 2


def test_domain_reports(tmp_path):
    cfg = {"flux": "0", "mass": 1.0, "shape": {"kind": "cylinder"}, "bbox": [30, 30],
           "max_fill": 0.05}
    assert run(tmp_path, "domain", config=cfg) == 0
    rep = json.loads((tmp_path / "out" / "domain" / "domain.json").read_text())
    assert rep["fill"] == [0.0]


def test_domain_assertion_failure(tmp_path):
    cfg = {"shape": {"kind": "torus"}, "bbox": [12, 12], "min_fill": 0.5}
    assert run(tmp_path, "domain", config=cfg) == 5


def test_index_default(tmp_path):
    assert run(tmp_path, "index") == 0
    rep = json.loads((tmp_path / "out" / "index" / "index.json").read_text())
    assert rep["verdict"] == [1, -1]
    assert run(tmp_path, "index", config={"expected": [1, -1]}) == 0
    assert run(tmp_path, "index", config={"expected": [-1, 1]}) == 5


def test_index_torus_empty(tmp_path):
    cfg = {"shape": {"kind": "torus"}, "bbox": [12, 12], "cut": {"kind": "horizontal", "y": 6}}
    assert run(tmp_path, "index", config=cfg) == 0
    rep = json.loads((tmp_path / "out" / "index" / "index.json").read_text())
    assert rep["crossings"] == [] and rep["theta"] == 0


def test_index_inadmissible(tmp_path, capsys):
    assert run(tmp_path, "index", config={"cut": {"kind": "vertical", "x": 2}}) == 4
    rep = json.loads((tmp_path / "out" / "index" / "admissibility.json").read_text())
    assert rep["admissible"] is False
    assert '"admissible": false' in capsys.readouterr().out


def test_bad_cut(tmp_path):
    assert run(tmp_path, "index", config={"cut": {"kind": "ray", "origin": [0, 0],
                                                  "direction": [0, 1]}}) == 2


def test_current_matches_index(tmp_path):
    assert run(tmp_path, "current") == 0
    rep = json.loads((tmp_path / "out" / "current" / "current.json").read_text())
    assert rep["agreement"] == [True, True]
    assert rep["current"]["quantized"] == [1, -1]
    assert (tmp_path / "out" / "current" / "density.csv").exists()


def test_current_identity_projection(tmp_path):
    assert run(tmp_path, "current", config={"projection": "identity"}) == 0
    rep = json.loads((tmp_path / "out" / "current" / "current.json").read_text())
    assert all(abs(v) < 1e-9 for v in rep["current"]["minus_2pi_trace"])


def test_suite_unknown(tmp_path):
    assert run(tmp_path, "suite", "nope") == 2


def test_suite_shifts(tmp_path, capsys):
    assert run(tmp_path, "suite", "shifts") == 0
    rep = json.loads((tmp_path / "out" / "suite.json").read_text())
    data = rep["scenarios"][0]["data"]
    assert data["forward"] == [1.0, -1.0]
    assert "PASS shifts-ring-40" in capsys.readouterr().out


def test_rerun_overwrites_deterministically(tmp_path):
    assert run(tmp_path, "bulk") == 0
    first = (tmp_path / "out" / "bulk" / "chern.json").read_bytes()
    assert run(tmp_path, "bulk") == 0
    assert (tmp_path / "out" / "bulk" / "chern.json").read_bytes() == first


@pytest.mark.parametrize("cmd", ["bulk", "domain", "index", "current", "suite"])
def test_subcommands_accept_common_flags(cmd):
    from edgeindex.cli import build_parser
    extra = ["shifts"] if cmd == "suite" else []
    args = build_parser().parse_args([cmd, *extra, "--seed", "7", "--window", "8",
                                      "--tolerance", "0.1", "--jobs", "2"])
    assert (args.seed, args.window, args.tolerance, args.jobs) == (7, 8, 0.1, 2)
