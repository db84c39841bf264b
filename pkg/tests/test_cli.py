import json

import numpy as np
import pytest

from elopt import convex_plateau, eval_at, linear_opt
from elopt.cli import main
from elopt.serialize import dumps, expr_from_dict, expr_to_dict

QC_SURFACE = {
    "kind": "curve",
    "family": "quadratic",
    "a": 1.0,
    "b": 1.0,
    "shape": "strictly_convex",
    "params": {"c2": 0.5},
}

H12_SURFACE = {"kind": "hyperplane", "c": [1.0, 2.0], "M": 1.0}


def write_config(tmp_path, surface, **extra):
    doc = {"schema": 1, "surface": surface}
    doc.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_validate_ok(tmp_path, capsys):
    cfg = write_config(tmp_path, QC_SURFACE)
    assert main(["--config", cfg, "validate"]) == 0
    out = capsys.readouterr().out
    assert "valid: True" in out
    assert "slope_range" in out


def test_validate_failure_exits_3(tmp_path, capsys):
    bad = dict(QC_SURFACE, params={"c2": 1.0})  # alpha'(a) = 0
    cfg = write_config(tmp_path, bad)
    assert main(["--config", cfg, "validate"]) == 3


def test_config_errors_exit_2(tmp_path):
    assert main(["validate"]) == 2  # no --config
    missing = tmp_path / "nope.json"
    assert main(["--config", str(missing), "validate"]) == 2
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    assert main(["--config", str(bad_json), "validate"]) == 2
    cfg = write_config(tmp_path, QC_SURFACE, extra_key=1)
    assert main(["--config", cfg, "validate"]) == 2
    cfg = write_config(tmp_path, dict(QC_SURFACE, family="circle"))
    assert main(["--config", cfg, "validate"]) == 2
    cfg = write_config(tmp_path, QC_SURFACE, construction="mystery")
    assert main(["--config", cfg, "validate"]) == 2
    no_schema = tmp_path / "ns.json"
    no_schema.write_text(json.dumps({"surface": QC_SURFACE}))
    assert main(["--config", str(no_schema), "validate"]) == 2


def test_bound_output(tmp_path, capsys):
    cfg = write_config(tmp_path, H12_SURFACE)
    assert main(["--config", cfg, "bound"]) == 0
    assert "normal_ratio_bound: 2.0" in capsys.readouterr().out


def test_construct_emits_both_convex_builders(tmp_path, capsys, qc):
    cfg = write_config(tmp_path, QC_SURFACE)
    out = tmp_path / "artifacts"
    assert main(["--config", cfg, "--out", str(out), "construct"]) == 0
    text = capsys.readouterr().out
    assert "convex_plateau: cost 2.0" in text
    assert "convex_diag: cost 2.0" in text
    plateau = expr_from_dict(json.loads((out / "convex_plateau.expr.json").read_text()))
    diag = expr_from_dict(json.loads((out / "convex_diag.expr.json").read_text()))
    # the two emitted optima disagree at the seam point: non-uniqueness
    assert eval_at(plateau, (0.5, 0.375)) == pytest.approx(1.125, abs=1e-9)
    assert eval_at(diag, (0.5, 0.375)) == pytest.approx(1.75, abs=1e-9)


def test_serialized_expression_round_trips_bit_exactly(qc):
    expr = convex_plateau(qc).expr
    clone = expr_from_dict(json.loads(dumps(expr_to_dict(expr))))
    rng = np.random.default_rng(17)
    pts = rng.uniform(0.0, 1.5, (100, 2))
    assert np.array_equal(eval_at(expr, pts), eval_at(clone, pts))


def test_check_pass_and_fail(tmp_path, h12):
    cfg = write_config(tmp_path, QC_SURFACE, samples=2000, surface_samples=300)
    assert main(["--config", cfg, "check"]) == 0

    cfg12 = write_config(tmp_path, H12_SURFACE, samples=1000, surface_samples=300)
    halved = {"op": "scale", "factor": 0.5, "inner": expr_to_dict(linear_opt(h12).expr)}
    expr_file = tmp_path / "halved.json"
    expr_file.write_text(json.dumps(halved))
    assert main(["--config", cfg12, "check", "--expr", str(expr_file)]) == 4


def test_lp_command(tmp_path, capsys):
    cfg = write_config(tmp_path, H12_SURFACE, grid=[4, 8])
    out = tmp_path / "lp_out"
    assert main(["--config", cfg, "--out", str(out), "lp", "--dump-lp"]) == 0
    text = capsys.readouterr().out
    assert "m=4: lp_value" in text
    assert "m=8: lp_value" in text
    assert (out / "grid_lp_m4.lp").exists()


def test_lp_rejects_higher_dimensions(tmp_path):
    cfg = write_config(
        tmp_path, {"kind": "hyperplane", "c": [1.0, 2.0, 3.0], "M": 1.0}, grid=[4]
    )
    assert main(["--config", cfg, "lp"]) == 2


def test_report_is_byte_reproducible(tmp_path):
    cfg = write_config(tmp_path, QC_SURFACE, grid=[8])
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["--config", cfg, "--out", str(out_a), "report"]) == 0
    assert main(["--config", cfg, "--out", str(out_b), "report"]) == 0
    first = (out_a / "report.json").read_bytes()
    assert first == (out_b / "report.json").read_bytes()
    doc = json.loads(first)
    assert doc["ratio_bound"] == 2.0
    assert doc["construction_cost"] == 2.0
    assert doc["gap_cost_minus_bound"] == 0.0


def test_json_format_output_parses(tmp_path, capsys):
    cfg = write_config(tmp_path, QC_SURFACE)
    assert main(["--config", cfg, "--format", "json", "bound"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == 2.0
    assert doc["type"] == "RatioBound"


def test_sample_csv_contract(tmp_path, capsys):
    cfg = write_config(tmp_path, QC_SURFACE, construction="convex_plateau")
    out = tmp_path / "plots"
    assert main(["--config", cfg, "--out", str(out), "--grid", "8", "sample"]) == 0
    lines = (out / "sample.csv").read_text().splitlines()
    assert lines[0] == "x,y,f,fx_left,fx_right,fy_left,fy_right"
    assert len(lines) == 1 + 9 * 9
    first = lines[1].split(",")
    assert first[0] == "0.0" and first[1] == "0.0" and first[2] == "0.0"
    assert first[3] == "nan"  # no left derivative on the axis
    # deterministic bytes
    blob = (out / "sample.csv").read_bytes()
    assert main(["--config", cfg, "--out", str(out), "--grid", "8", "sample"]) == 0
    assert blob == (out / "sample.csv").read_bytes()


def test_seed_and_samples_overrides(tmp_path, capsys):
    cfg = write_config(tmp_path, QC_SURFACE, samples=500, surface_samples=100, seed=1)
    assert main(["--config", cfg, "--seed", "9", "--samples", "800", "--format", "json", "check"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["el_report"]["seed"] == 9
    assert doc["el_report"]["samples"] == 800
