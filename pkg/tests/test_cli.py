# gkwcert: validated spectral certificates for transfer operators.
#
# DISTRIBUTION STATEMENT A. Approved for public release. Distribution is unlimited.
#
# This material is based upon work supported by the Federal Aviation Administration under Air Force Contract No. FA8702-15-D-0001.
# Any opinions, findings, conclusions or recommendations expressed in this material are those of the author(s)
# and do not necessarily reflect the views of the Federal Aviation Administration.
#
# © 2023 Massachusetts Institute of Technology.
#
# Subject to FAR52.227-11 Patent Rights - Ownership by the contractor (May 2014)
#
# The software/firmware is provided to you on an As-Is basis
#
# Delivered to the U.S. Government with Unlimited Rights, as defined in DFARS Part 252.227-7013 or 7014 (Feb 2014).
# Notwithstanding any copyright notice, U.S. Government rights in this work are defined by DFARS 252.227-7013
# or DFARS 252.227-7014 as detailed above. Use of this work other than as specifically authorized by the
# U.S. Government may violate any copyrights that exist in this work.

import json

from flint import arb, acb
from pytest import raises
from typer import BadParameter
from typer.testing import CliRunner

from gkwcert import pipeline
from gkwcert.balls import ball_from_str
from gkwcert.cli import app, parse_windows
from gkwcert.gkw import best_c2, truncation_budget
from gkwcert.pipeline import TABLE_COLUMNS

runner = CliRunner(mix_stderr=False)

def test_c2_table():
    result = runner.invoke(app, ["gkw", "c2", "--N", "1", "--N", "2"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert len(lines) == 2
    assert "11.70008070" in lines[0]
    assert "10.48495070" in lines[1]

    result = runner.invoke(app, ["--json", "gkw", "c2", "--N", "3"])
    assert result.exit_code == 0
    value = ball_from_str(json.loads(result.stdout)["3"])
    assert abs(value - arb("10.2709840576")) < arb("1e-9")

def test_budget():
    result = runner.invoke(app, ["gkw", "budget", "--K", "48"])
    assert result.exit_code == 0
    assert "2.366" in result.stdout

def test_assemble(tmp_path):
    result = runner.invoke(app, ["gkw", "assemble", "--K", "4", "--prec", "32"])
    assert result.exit_code == 1
    assert "precision exhausted" in result.stderr

    out = tmp_path/"assemble.txt"
    store = tmp_path/"store"
    result = runner.invoke(app, ["--out", str(out), "--store", str(store), "gkw", "assemble", "--K", "4",
                                 "--prec", "128"])
    assert result.exit_code == 0
    assert out.read_text().startswith("assembled K=4 at 128 bits")
    assert (store/"index.db").exists()
    assert len(list((store/"matrix").iterdir())) == 1

    # the written header carries the norm bound and the truncation budget
    result = runner.invoke(app, ["--json", "--out", str(out), "gkw", "assemble", "--K", "4", "--prec", "128"])
    assert result.exit_code == 0
    header = json.loads(out.read_text())
    assert (header["K"], header["prec"]) == (4, 128)
    assert ball_from_str(header["c2"]).overlaps(best_c2(128))
    assert ball_from_str(header["eps_K"]).overlaps(truncation_budget(4, best_c2(128), 128).eps_K)

def test_certify_reads_the_stored_schur_certificate(tmp_path, monkeypatch):
    store = tmp_path/"store"
    result = runner.invoke(app, ["--store", str(store), "gkw", "schur", "--K", "4", "--prec", "128"])
    assert result.exit_code == 0
    assert result.stdout.startswith("Schur certificate K=4 at 128 bits")
    assert len(list((store/"schur").iterdir())) == 1

    def recompute(*args):
        raise AssertionError("recomputed a stored certificate")

    monkeypatch.setattr(pipeline, "assemble_matrix", recompute)
    monkeypatch.setattr(pipeline, "approx_schur", recompute)

    # at K=4 the budget is far too large to certify, but the gates run on the stored pair
    result = runner.invoke(app, ["--store", str(store), "certify", "--K", "4", "--prec", "128", "--windows", "1"])
    assert isinstance(result.exception, SystemExit)
    assert result.exit_code == 1
    assert len(list((store/"schur").iterdir())) == 1

def test_dfly_check():
    result = runner.invoke(app, ["--json", "dfly", "check", "--kmax", "12"])
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["eventual_pass"]
    assert len(report["rows"]) == 12

    # the first member alone never passes
    result = runner.invoke(app, ["dfly", "check", "--kmax", "1"])
    assert result.exit_code == 1
    assert result.stdout.splitlines()[0].split()[0] == "k"

def test_pipeline_tables_from_an_empty_store(tmp_path):
    out_dir = tmp_path/"tables"
    result = runner.invoke(app, ["--store", str(tmp_path/"store"), "pipeline", "tables", "--out-dir", str(out_dir)])
    assert result.exit_code == 0
    assert (out_dir/"eigenvalues.csv").read_text() == ",".join(TABLE_COLUMNS) + "\n"

def test_parse_windows():
    candidates = [acb(1), acb(arb("-0.3")), acb(arb("0.1")), acb(0)]
    windows = parse_windows("2-3", candidates, 1/3)
    assert [index for index, _, _ in windows] == [2, 3]
    assert abs(windows[0][1] - arb("-0.3")) < arb("1e-12")

    windows = parse_windows("1", candidates, 1/3)
    assert len(windows) == 1

    windows = parse_windows("0.5:0.1,-0.25+0.1j:0.05", candidates)
    assert [index for index, _, _ in windows] == [1, 2]
    assert abs(windows[1][1].imag - arb("0.1")) < arb("1e-12")
    assert abs(windows[1][2] - arb("0.05")) < arb("1e-12")

    with raises(BadParameter):
        parse_windows("3-1", candidates)
