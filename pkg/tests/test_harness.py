import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from pmoduli.errors import InvalidInputError
from pmoduli.harness import (REPORT_SCHEMA, Report, dump_json,
                             exact_ring_curve_module,
                             exact_ring_surface_module, parse_scenario_text,
                             report_to_json, run_cli, run_scenario, signed_gap)
from pmoduli.harness.runner import image_ring_of
from pmoduli.mappings import RadialPowerMap, ScalingMap, Box
from pmoduli.moduli import RingSpec, ring_module, ziemer_dual

LIGHT = """
[scenario]
name = {name}
theorem = {theorem}

[mapping]
kind = {mapping}
{mapping_extra}

[weight]
kind = constant
value = {weight}

[ring]
center = 0,0
r1 = 1.0
r2 = 2.0

[params]
n = 2
p = 2.0
grid_cells = 96
curve_count = 192
surface_count = 32
{params_extra}
"""


def _light(name, theorem, mapping="identity", weight=1.0, mapping_extra="",
           params_extra=""):
    return parse_scenario_text(LIGHT.format(
        name=name, theorem=theorem, mapping=mapping, weight=weight,
        mapping_extra=mapping_extra, params_extra=params_extra))


def test_parse_rejects_unknown_key():
    bad = LIGHT.format(name="x", theorem="sandwich", mapping="identity",
                       weight=1.0, mapping_extra="", params_extra="")
    with pytest.raises(InvalidInputError, match="unknown key"):
        parse_scenario_text(bad + "\n[params]\nwobble = 3\n")
    with pytest.raises(InvalidInputError, match="unknown section"):
        parse_scenario_text("[nonsense]\nkey = 1\n")
    with pytest.raises(InvalidInputError, match="theorem"):
        parse_scenario_text("[scenario]\nname = x\n")


def test_signed_gap_directions():
    assert signed_gap(1.0, 2.0, "le") == pytest.approx(0.5)
    assert signed_gap(3.0, 2.0, "le") == pytest.approx(-0.5)
    assert signed_gap(3.0, 2.0, "ge") == pytest.approx(0.5)
    with pytest.raises(ValueError):
        signed_gap(1.0, 2.0, "eq")


def test_report_json_schema_and_digits():
    rep = Report(scenario="s", theorem="sandwich", params={"n": 2},
                 lhs=math.pi, rhs=math.inf, satisfied=True, rel_gap=0.25,
                 diagnostics={"iterations": 3, "residual": 0.0,
                              "grid": "96^2", "runtimeMs": 1.5},
                 notes=["note"])
    text = report_to_json(rep)
    data = json.loads(text)
    jsonschema.validate(data, REPORT_SCHEMA)
    assert data["rhs"] == "infinite"
    # 17 significant digits round-trip the double exactly
    assert "3.1415926535897931" in text
    assert float(data["lhs"]) == math.pi


def test_dump_json_handles_divergent():
    text = dump_json({"v": math.nan, "w": [1.5, -math.inf]})
    data = json.loads(text)
    assert data["v"] == "divergent"
    assert data["w"][1] == "-infinite"


def test_exact_module_helpers():
    assert exact_ring_curve_module(2, 2.0, 1.0, math.e) == pytest.approx(
        2.0 * math.pi, rel=1e-14)
    assert exact_ring_curve_module(3, 2.0, 1.0, 2.0) == pytest.approx(
        ring_module(3, 2.0, 1.0, 2.0), rel=1e-14)
    # surface module via duality: circles of the annulus
    assert exact_ring_surface_module(2, 2.0, 1.0, 2.0) == pytest.approx(
        math.log(2.0) / (2.0 * math.pi), rel=1e-14)
    d = ziemer_dual(3, 2.0, ring_module(3, 2.0, 1.0, 2.0))
    assert exact_ring_surface_module(3, d["alphaDual"], 1.0, 2.0) == \
        pytest.approx(d["modAlpha"], rel=1e-12)


def test_image_ring_of():
    ring = RingSpec(dim=2, center=(0.0, 0.0), r1=1.0, r2=2.0)
    box = Box.around((0.0, 0.0), 4.0)
    img = image_ring_of(ScalingMap(3.0, box), ring)
    assert (img.r1, img.r2) == (3.0, 6.0)
    img = image_ring_of(RadialPowerMap(2.0, (0.0, 0.0), box), ring)
    assert (img.r1, img.r2) == (1.0, 4.0)


def test_identity_sandwich_equalities():
    rep = run_scenario(_light("ident_sandwich", "sandwich",
                              params_extra="alpha = 2.0\nk = 1"))
    assert rep.satisfied
    mid = rep.diagnostics["imageModule"]
    assert rep.lhs == pytest.approx(mid, rel=1e-9)
    assert rep.rhs == pytest.approx(mid, rel=1e-9)


def test_identity_quasiinvariance():
    rep = run_scenario(_light("ident_quasi", "quasiinvariance"))
    assert rep.satisfied
    assert rep.diagnostics["K"] == pytest.approx(1.0, rel=1e-12)
    assert rep.lhs == pytest.approx(rep.diagnostics["sourceModule"], rel=1e-9)


def test_identity_ring_criterion_analytic_equality():
    rep = run_scenario(_light("ident_ring", "ring_criterion"))
    assert rep.satisfied
    assert abs(rep.diagnostics["relGapAnalytic"]) <= 1e-8
    assert rep.diagnostics["etaUnitIntegral"] == pytest.approx(1.0, abs=1e-10)
    assert abs(rep.diagnostics["extremalWeightedIntegral"] - rep.rhs) \
        <= 1e-8 * rep.rhs


def test_zero_weight_violation_detected():
    rep = run_scenario(_light("zero_weight", "ring_criterion", weight=0.0))
    assert not rep.satisfied
    assert rep.rhs == 0.0
    assert rep.diagnostics["flaggedInfinite"]


def test_scaled_ring_criterion_slack():
    # Q == 2 doubles the bound; the identity image module stays put
    rep = run_scenario(_light("slack_ring", "ring_criterion", weight=2.0))
    assert rep.satisfied
    assert rep.rhs == pytest.approx(2.0 * 2.0 * math.pi / math.log(2.0),
                                    rel=1e-9)


def test_lower_criterion_weight_scaling():
    rep1 = run_scenario(_light("lower_q1", "lower_criterion"))
    rep10 = run_scenario(_light("lower_q10", "lower_criterion", weight=10.0))
    assert rep1.satisfied and rep10.satisfied
    assert rep10.rhs == pytest.approx(rep1.rhs / 10.0, rel=1e-9)


def test_transfer_identity_fixed_point():
    rep = run_scenario(_light("transfer_ident", "transfer"))
    assert rep.satisfied
    assert rep.diagnostics["alphaTilde"] == 2.0
    assert rep.diagnostics["s"] == 1.0
    assert abs(rep.diagnostics["relGapAnalytic"]) <= 1e-8


def test_scaling_scenario_scales_modules():
    base = run_scenario(_light("sandwich_base", "sandwich",
                               params_extra="alpha = 2.0"))
    scaled = run_scenario(_light("sandwich_scaled", "sandwich",
                                 mapping="scaling", mapping_extra="lam = 2.0",
                                 params_extra="alpha = 2.0"))
    # n = alpha = 2: the module is scale invariant, image equals source
    assert scaled.satisfied
    assert scaled.diagnostics["imageModule"] == pytest.approx(
        base.diagnostics["imageModule"], rel=1e-9)


def test_report_notes_flag_ring_families():
    rep = run_scenario(_light("notes", "ring_criterion"))
    assert any("ring-family certification" in n for n in rep.notes)


def _run_cli(*argv):
    return run_cli(list(argv))


def test_cli_ring_module(capsys):
    code = _run_cli("ring-module", "--n", "3", "--p", "2", "--a", "1",
                    "--b", "2", "--json")
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["value"] == pytest.approx(8.0 * math.pi, rel=1e-14)


def test_cli_rejects_p_equal_n(capsys):
    code = _run_cli("ring-module", "--n", "3", "--p", "3", "--a", "1",
                    "--b", "2")
    err = capsys.readouterr().err
    assert code == 2
    assert "p must differ from n" in err


def test_cli_unknown_flag_exits_2():
    proc = subprocess.run(
        [sys.executable, "-c",
         "from pmoduli.harness.cli import run_cli; import sys; "
         "sys.exit(run_cli(['ring-module', '--n', '3', '--wat', '1']))"],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage" in proc.stderr.lower()


def test_cli_criterion_and_transfer(capsys):
    code = _run_cli("criterion", "ring", "--n", "2", "--p", "2",
                    "--r1", "1", "--r2", str(math.e))
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["bound"] == pytest.approx(2.0 * math.pi, rel=1e-9)
    code = _run_cli("criterion", "lower", "--n", "2", "--p", "2",
                    "--r1", "1", "--r2", str(math.e))
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["value"] == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-9)
    code = _run_cli("transfer", "--n", "3", "--p", "3")
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out == {"s": 2.0, "alphaTilde": 3.0, "qTildeExponent": 2.0}


def test_cli_mean_dilatation(capsys):
    code = _run_cli("mean-dilatation", "--kind", "inner", "--c", "0.4",
                    "--alpha", "2", "--beta", "4")
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["value"] == pytest.approx(5.0, abs=5e-6)
    code = _run_cli("mean-dilatation", "--kind", "outer", "--c", "0.4",
                    "--gamma", "2", "--delta", "4")
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["divergent"] is True
    assert out["value"] == "divergent"


def test_cli_dilatation(capsys):
    code = _run_cli("dilatation", "--matrix", "1,0;0,2", "--alpha", "3")
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["inner"] == pytest.approx(2.0)
    assert out["outer"] == pytest.approx(4.0)
    assert out["linear"] == pytest.approx(2.0)


def test_cli_verify_and_report(tmp_path, capsys):
    scn = tmp_path / "light.scn"
    scn.write_text(LIGHT.format(name="cli_ident", theorem="ring_criterion",
                                mapping="identity", weight=1.0,
                                mapping_extra="", params_extra=""))
    out_path = tmp_path / "rep.json"
    code = _run_cli("verify", str(scn), "--out", str(out_path))
    assert code == 0
    data = json.loads(out_path.read_text())
    jsonschema.validate(data, REPORT_SCHEMA)
    assert data["satisfied"] is True
    assert abs(data["diagnostics"]["relGapAnalytic"]) <= 1e-8

    bad = tmp_path / "bad.scn"
    bad.write_text(LIGHT.format(name="cli_zero", theorem="ring_criterion",
                                mapping="identity", weight=0.0,
                                mapping_extra="", params_extra=""))
    bad_out = tmp_path / "bad.json"
    assert _run_cli("verify", str(bad), "--out", str(bad_out)) == 1

    code = _run_cli("report", str(out_path), str(bad_out))
    summary = json.loads(capsys.readouterr().out)
    assert code == 1
    assert summary["allSatisfied"] is False
    assert summary["reports"][0]["satisfied"] is True


def test_cli_capacity_csv(tmp_path, capsys):
    csv_path = tmp_path / "field.csv"
    code = _run_cli("capacity", "--n", "2", "--p", "2", "--a", "1", "--b", "2",
                    "--cells", "48", "--csv", str(csv_path))
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["value"] == pytest.approx(2.0 * math.pi / math.log(2.0),
                                         rel=0.08)
    header = csv_path.read_text().splitlines()[0]
    assert header == "idx,x,y,value"


def test_cli_invalid_scenario_file(tmp_path, capsys):
    bad = tmp_path / "broken.scn"
    bad.write_text("[scenario]\ntheorem = ring_criterion\n[params]\nbad = 1\n")
    assert _run_cli("verify", str(bad)) == 2
    assert _run_cli("verify", str(tmp_path / "missing.scn")) == 2


def test_report_reproducibility():
    rep1 = run_scenario(_light("repro", "ring_criterion"))
    rep2 = run_scenario(_light("repro", "ring_criterion"))
    assert rep1.satisfied == rep2.satisfied
    assert rep1.lhs == rep2.lhs
    assert rep1.rhs == rep2.rhs
    assert rep1.rel_gap == rep2.rel_gap


def test_quasiinvariance_circle_family_2d():
    # circles carry surface semantics (k = n - 1 = 1): the image circle
    # module lands exactly at the upper bound K * M
    rep = run_scenario(_light(
        "quasi_circles", "quasiinvariance", mapping="radial_power",
        mapping_extra="beta_exp = 2.0", params_extra="family = separating"))
    assert rep.satisfied
    assert rep.diagnostics["K"] == pytest.approx(2.0, rel=1e-9)
    assert rep.lhs == pytest.approx(2.0 * rep.diagnostics["sourceModule"],
                                    rel=0.05)


def test_scaling_sandwich_3d():
    # under pure scaling all three sandwich quantities scale by lam^(n-alpha)
    base_txt = """
[scenario]
name = {name}
theorem = sandwich

[mapping]
kind = {kind}
{extra}

[weight]
kind = constant
value = 1.0

[ring]
center = 0,0,0
r1 = 1.0
r2 = 2.0

[params]
n = 3
p = 2.0
alpha = 2.0
k = 1
grid_cells = 32
curve_count = 1024
"""
    ident = run_scenario(parse_scenario_text(
        base_txt.format(name="sw3_id", kind="identity", extra="")))
    scaled = run_scenario(parse_scenario_text(
        base_txt.format(name="sw3_sc", kind="scaling", extra="lam = 2.0")))
    lam_pow = 2.0 ** (3 - 2.0)
    assert scaled.satisfied
    assert scaled.diagnostics["imageModule"] == pytest.approx(
        lam_pow * ident.diagnostics["imageModule"], rel=1e-9)
    assert scaled.lhs == pytest.approx(lam_pow * ident.lhs, rel=1e-9)
    assert scaled.rhs == pytest.approx(lam_pow * ident.rhs, rel=1e-9)
