import json
import subprocess
import sys

import pytest

from defeq.cli import INCONCLUSIVE, INPUT_ERROR, REFUTED, VERIFIED, main
from defeq.demo import corpus_text


@pytest.fixture
def files(tmp_path):
    for name in ("t1.theory", "t2.theory", "t3.theory", "d13.defs", "d31.defs", "d23.defs",
                 "d32.defs", "negate.tr"):
        (tmp_path / name).write_text(corpus_text(name))
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_parse_and_models(files, capsys):
    assert run("parse", files / "t1.theory") == VERIFIED
    assert "axiom A x0 . p(x0)" in capsys.readouterr().out
    assert run("models", files / "t1.theory", "-k", 2) == VERIFIED
    assert "model 1" in capsys.readouterr().out


def test_check_merge_with_deltas(files, capsys):
    code = run("check-merge", files / "t1.theory", files / "t3.theory",
               "--deltas", files / "d13.defs", files / "d31.defs", "-k", 2)
    assert code == VERIFIED
    code = run("check-merge", files / "t2.theory", files / "t3.theory",
               "--deltas", files / "d13.defs", files / "d31.defs", "-k", 2)
    assert code in (REFUTED, INPUT_ERROR)


def test_check_merge_search_incompatible(files, capsys):
    code = run("check-merge", files / "t1.theory", files / "t2.theory", "-k", 2)
    assert code == REFUTED
    assert "NOT-MERGEABLE-AT-2" in capsys.readouterr().out


def test_search_merge(files, capsys):
    assert run("search-merge", files / "t1.theory", files / "t3.theory", "-k", 2) == VERIFIED


def test_check_defeq(files, capsys):
    assert run("check-defeq", files / "t1.theory", files / "t2.theory", "--via", files / "t3.theory",
               "-k", 2) == VERIFIED
    assert run("check-defeq", files / "t1.theory", files / "t2.theory", "-k", 2) == INCONCLUSIVE
    assert run("check-defeq", files / "t1.theory", files / "t2.theory", "--depth", 2, "-k", 2) == VERIFIED
    assert run("check-defeq", files / "t1.theory", files / "t1.theory", "-k", 2) == VERIFIED


def test_check_intertrans(files, capsys):
    assert run("check-intertrans", files / "t1.theory", files / "t2.theory",
               "--tr12", files / "negate.tr", "--tr21", files / "negate.tr", "-k", 2) == VERIFIED
    (files / "id.tr").write_text("translate p/1 => p(x1)\n")
    assert run("check-intertrans", files / "t1.theory", files / "t2.theory",
               "--tr12", files / "id.tr", "--tr21", files / "id.tr", "-k", 2) == REFUTED


def test_check_model_merge(files, capsys):
    assert run("check-model-merge", files / "t2.theory", files / "t3.theory",
               "--deltas", files / "d23.defs", files / "d32.defs", "-k", 2) == VERIFIED


def test_certificate_written_and_verified(files, capsys):
    cert = files / "m.json"
    assert run("check-merge", files / "t1.theory", files / "t3.theory", "--deltas",
               files / "d13.defs", files / "d31.defs", "-k", 2, "-o", cert) == VERIFIED
    assert json.loads(cert.read_text())["kind"] == "merger"
    assert run("verify", cert) == VERIFIED
    assert run("verify", cert, "--bound-override", "-k", 3) == VERIFIED


def test_rename_and_compose(files, capsys):
    a = files / "a.json"
    assert run("rename", files / "t1.theory", "-o", a, "-k", 2) == VERIFIED
    out = capsys.readouterr().out
    assert "rename p -> p_r1" in out
    b = files / "b.json"
    assert run("check-merge", files / "t3.theory", files / "t1.theory", "--deltas",
               files / "d31.defs", files / "d13.defs", "-k", 2, "-o", b) == VERIFIED
    # T1 and T3 are disjoint and so are T3 and the renamed T1, so T3~T1 then T1~T1' composes
    assert run("compose", b, a, "-k", 2) == VERIFIED


def test_demo(capsys):
    assert run("demo-counterexample") == VERIFIED
    out = capsys.readouterr().out
    assert "bound k = 2" in out and "FAILED" not in out


def test_demo_json_bundle_verifies(tmp_path, capsys):
    bundle = tmp_path / "demo.json"
    assert run("demo-counterexample", "--json", "-o", bundle) == VERIFIED
    capsys.readouterr()
    assert run("verify", bundle) == VERIFIED


def test_input_errors(files, capsys):
    assert run("parse", files / "missing.theory") == INPUT_ERROR
    (files / "bad.theory").write_text("theory B\nrel p 1\naxiom p(\n")
    assert run("parse", files / "bad.theory") == INPUT_ERROR
    assert run("models", files / "t1.theory", "-k", 0) == INPUT_ERROR


def test_console_script_entry_point(files):
    out = subprocess.run([sys.executable, "-m", "defeq.cli", "parse", str(files / "t2.theory")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "theory T2" in out.stdout
