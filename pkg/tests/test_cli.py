import json
import subprocess
import sys
from importlib import resources

import pytest

from dlgram.cli import main

WOODS_FORM = ("exists(V0,window(V0),and(def(V1,car(V1),"
              "drove_through(john,V1,V0)),demolished(john,V0)))")


@pytest.fixture(scope="session")
def english_path():
    return str(resources.files("dlgram") / "grammars" / "english_sem.dlg")


@pytest.fixture(scope="session")
def french_path():
    return str(resources.files("dlgram") / "grammars" / "french_syn.dlg")


def test_parse_woods(english_path, capsys):
    rc = main(["parse", "-g", english_path,
               "-s", "john drove the car through and demolished a window"])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert out == [WOODS_FORM]


def test_parse_french_trace(french_path, capsys):
    rc = main(["parse", "-g", french_path,
               "-s", "jean mange une pomme rouge et une verte", "--trace"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "np(6,8)" in out
    assert "np(2,8)" in out
    assert "n(7,7)" in out


def test_check_ok(english_path, capsys):
    rc = main(["check", "-g", english_path])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_check_bad_grammar(tmp_path, capsys):
    p = tmp_path / "bad.dlg"
    p.write_text("np --> det, adj.\ndet --> [the].\n")
    rc = main(["check", "-g", str(p)])
    out = capsys.readouterr().out
    assert rc == 2
    assert "undefined category adj" in out


def test_missing_grammar_file(capsys):
    assert main(["parse", "-g", "/nonexistent.dlg", "-s", "x"]) == 2
    assert main(["check", "-g", "/nonexistent.dlg"]) == 2


def test_failed_parse_exit_code(english_path, capsys):
    rc = main(["parse", "-g", english_path, "-s", "john drove"])
    out = capsys.readouterr().out
    assert rc == 1
    assert out.startswith("no parse")


def test_layer_cap_exit_code(english_path, capsys):
    rc = main(["parse", "-g", english_path, "-s", "john laughed",
               "--layer-cap", "1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "layer cap" in err


def test_json_french(french_path, capsys):
    rc = main(["parse", "-g", french_path,
               "-s", "jean mange une pomme rouge et une verte", "--json"])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert list(doc.keys()) == ["tokens", "edges", "parses", "constraints"]
    assert doc["tokens"][0] == "jean"
    conj = [e for e in doc["edges"] if e["cat"] == "conj"]
    assert [(e["start"], e["end"]) for e in conj] == [(5, 6)]
    assert list(conj[0].keys()) == ["id", "cat", "args", "start", "end",
                                    "layer", "provenance"]
    assert len(doc["parses"]) == 1
    assert doc["constraints"][0]["status"] == "resolved"


def test_json_failed_parse(english_path, capsys):
    rc = main(["parse", "-g", english_path, "-s", "john drove", "--json"])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 1
    assert doc["parses"] == []


def test_json_woods_constraints(english_path, capsys):
    rc = main(["parse", "-g", english_path, "--json",
               "-s", "john drove the car through and demolished a window"])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    c = doc["constraints"][0]
    assert list(c.keys()) == ["N", "M", "connective", "status", "resolutions"]
    assert (c["N"], c["M"], c["status"]) == (5, 6, "resolved")
    assert len(c["resolutions"]) == 1
    assert doc["parses"][0]["logical_form"] == WOODS_FORM


def test_json_and_human_agree(english_path, capsys):
    sentence = "each man ate an apple and a pear"
    main(["parse", "-g", english_path, "-s", sentence])
    human = set(capsys.readouterr().out.strip().splitlines())
    main(["parse", "-g", english_path, "-s", sentence, "--json"])
    doc = json.loads(capsys.readouterr().out)
    assert {p["logical_form"] for p in doc["parses"]} == human


def test_reshape_flags(english_path, capsys):
    sentence = "each man ate an apple and a pear"
    rc = main(["parse", "-g", english_path, "-s", sentence,
               "--no-meta-coord", "--reshape"])
    out = capsys.readouterr().out.strip()
    assert rc == 0
    # distribution does not apply here (restriction is atomic), so the
    # form passes through unchanged
    assert out.startswith("each(V0,man(V0),and(")


def test_reshape_distributes_conjoined_restriction(english_path, capsys):
    # the meta-level reading of this sentence conjoins the restrictions,
    # which is exactly what distribution then splits apart
    sentence = "each man and each woman ate an apple"
    main(["parse", "-g", english_path, "-s", sentence])
    plain = capsys.readouterr().out.strip().splitlines()
    assert any(",and(man(" in f for f in plain)

    rc = main(["parse", "-g", english_path, "-s", sentence, "--reshape"])
    reshaped = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert not any(",and(man(" in f for f in reshaped)
    assert any(f.startswith("and(each(V0,man(V0),") for f in reshaped)

    main(["parse", "-g", english_path, "-s", sentence, "--reshape", "--json"])
    doc = json.loads(capsys.readouterr().out)
    assert {p["logical_form"] for p in doc["parses"]} == set(reshaped)


def test_sentence_file_order(french_path, tmp_path, capsys):
    f = tmp_path / "sents.txt"
    f.write_text("jean mange une pomme rouge\n\njean mange\n")
    rc = main(["parse", "-g", french_path, "-f", str(f)])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 1  # second sentence fails
    assert out == ["sent", "no parse: jean mange"]


def test_no_meta_coord_flag(french_path, capsys):
    rc = main(["parse", "-g", french_path, "--no-meta-coord",
               "-s", "jean mange une pomme rouge et une verte"])
    assert rc == 1


def test_all_coord_flag_runs(english_path, capsys):
    rc = main(["parse", "-g", english_path, "--all-coord",
               "-s", "john drove the car through and demolished a window"])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert WOODS_FORM in out


def test_gap_budget_flag(french_path, capsys):
    rc = main(["parse", "-g", french_path, "--gap-budget", "0",
               "-s", "jean mange une pomme rouge et une verte"])
    assert rc == 1


def test_bad_flag_values(english_path, capsys):
    assert main(["parse", "-g", english_path, "-s", "x", "--layer-cap", "0"]) == 2
    assert main(["parse", "-g", english_path, "-s", "x", "--gap-budget", "-1"]) == 2


def _run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "dlgram.cli", *argv],
        capture_output=True, timeout=120)


def test_byte_identical_across_processes(english_path):
    argv = ["parse", "-g", english_path, "--trace", "--json",
            "-s", "john drove the car through and demolished a window"]
    a = _run_cli(*argv)
    b = _run_cli(*argv)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    assert a.stdout  # nonempty


def test_console_entry_point_matches_module(english_path):
    argv = ["parse", "-g", english_path, "-s", "john laughed"]
    via_module = _run_cli(*argv)
    via_script = subprocess.run(["dlgram", *argv], capture_output=True, timeout=120)
    assert via_module.returncode == via_script.returncode == 0
    assert via_module.stdout == via_script.stdout == b"laugh(john)\n"
