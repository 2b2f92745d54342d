import json
import os
import subprocess
import sys

import pytest

from modalctx.cli import main
from modalctx.parser import corpus_text

@pytest.fixture
def corpus(tmp_path):
    def write(name, text=None):
        path = tmp_path / f"{name}.ctx"
        path.write_text(corpus_text(name) if text is None else text, encoding="utf-8")
        return str(path)
    return write


@pytest.mark.parametrize("name", ["box", "forallbox", "circ"])
def test_check_accepts_the_corpus(corpus, capsys, name):
    assert main(["check", corpus(name)]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_check_under_k_rejects_the_t_axiom(corpus, capsys):
    assert main(["check", "--variant", "k", corpus("box")]) == 1
    captured = capsys.readouterr()
    assert "LevelViolation" in captured.out
    assert "axiom_t" in captured.err


def test_normalize_prints_normal_forms(corpus, capsys):
    assert main(["normalize", corpus("box")]) == 0
    assert "normal form: `{y:s} y" in capsys.readouterr().out


def test_normalize_reports_fuel_exhaustion(corpus, capsys):
    path = corpus("loop", r"box k twice = (\x:[s]s. x) ((\y:[s]s. y) `{z:s} z) : [s]s;")
    assert main(["normalize", "--fuel", "1", path]) == 1
    assert "FuelExhausted" in capsys.readouterr().out


def test_translate_output_rechecks_under_k(corpus, capsys, tmp_path):
    assert main(["translate", corpus("circ")]) == 0
    out = capsys.readouterr().out
    decls = []
    lines = out.splitlines()
    for i, line in enumerate(lines):
        if line.startswith("forallbox k"):
            decls.append("\n".join(lines[i:i + 3]))
    assert len(decls) >= 10
    again = tmp_path / "translated.ctx"
    again.write_text("\n".join(decls), encoding="utf-8")
    assert main(["check", "--variant", "k", str(again)]) == 0


def test_translate_json_schema(corpus, capsys):
    assert main(["translate", "--json", corpus("circ")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["command"] == "translate"
    first = doc["declarations"][0]
    assert set(first) == {"name", "calculus", "status", "type", "translation", "declaration"}
    assert set(first["translation"]) == {"source", "allocators", "output"}
    assert set(first["translation"]["output"]) == {"stack", "term", "type"}


def test_erase_json(corpus, capsys):
    assert main(["erase", "--json", corpus("box")]) == 0
    doc = json.loads(capsys.readouterr().out)
    k = next(d for d in doc["declarations"] if d["name"] == "axiom_k")
    assert k["erasure"]["type"] == "(u -> s -> t) -> (u -> s) -> u -> t"


def test_check_error_json_carries_rule_and_path(corpus, capsys):
    path = corpus("bad", r"box k bad = \x:s. x x : s;")
    assert main(["check", "--json", path]) == 1
    (decl,) = json.loads(capsys.readouterr().out)["declarations"]
    assert decl["status"] == "error"
    assert decl["error"]["kind"] == "NotAFunction" and decl["error"]["rule"] == "App"


def test_declared_type_mismatch(corpus, capsys):
    path = corpus("wrong", r"box k id = \x:s. x : t -> t;")
    assert main(["check", path]) == 1
    assert "TypeMismatch" in capsys.readouterr().out


def test_parse_error_exits_with_two(corpus, capsys):
    assert main(["check", corpus("broken", "box k = ;")]) == 2
    assert "broken.ctx:1:" in capsys.readouterr().err


def test_missing_file_exits_with_two(tmp_path, capsys):
    assert main(["check", str(tmp_path / "nope.ctx")]) == 2


def test_usage_errors_exit_with_two():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", "x.ctx"])
    assert info.value.code == 2


def test_module_entry_point(corpus):
    proc = subprocess.run([sys.executable, "-m", "modalctx", "check", corpus("forallbox")],
                          capture_output=True, text=True, env={**os.environ, "NO_COLOR": "1"})
    assert proc.returncode == 0, proc.stderr
    assert "\033[" not in proc.stdout
