import json
from pathlib import Path

import pytest

from compsynth import io
from compsynth.cli import main
from compsynth.embedded import make_alternating
from compsynth.games import almost_sure_parity
from compsynth.pos import separating_example

FIXTURES = Path(__file__).parent / "fixtures"
LIB = str(FIXTURES / "library.json")
INDEX = str(FIXTURES / "library_index.json")
MONITOR = str(FIXTURES / "monitor.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_dpw_writes_a_verified_composer(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, text, _ = run(capsys, "synth", "dpw", "--library", LIB, "--dpw", MONITOR,
                        "--out", str(out))
    doc = json.loads(text)
    assert code == 0 and doc["realizable"] and doc["verdict"] == "realizable"
    assert doc["bound"]["memory_bound"] == 2
    code, text, _ = run(capsys, "verify", "composer", "--composer", str(out), "--library", LIB,
                        "--dpw", MONITOR)
    doc = json.loads(text)
    assert code == 0 and doc["valid"] and doc["value"] == "1/1"


def test_synth_embedded_exit_codes(capsys):
    code, text, _ = run(capsys, "synth", "embedded", "--library", LIB, "--index", INDEX,
                        "--relation", str(FIXTURES / "relation.json"))
    assert code == (0 if json.loads(text)["realizable"] else 1)
    code, text, _ = run(capsys, "synth", "unrestricted", "--library", LIB, "--index", INDEX,
                        "--eta", "1/3")
    doc = json.loads(text)
    assert code == (0 if doc["realizable"] else 1) and "/" in doc["value"]


def test_bad_input_exits_with_2(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"kind": "library",', encoding="utf-8")
    code, _, err = run(capsys, "synth", "dpw", "--library", str(broken), "--dpw", MONITOR)
    assert code == 2 and "line 1" in err
    code, _, err = run(capsys, "synth", "dpw", "--library", str(tmp_path / "missing.json"),
                       "--dpw", MONITOR)
    assert code == 2 and "error" in err


def test_missing_arguments_are_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["synth", "embedded", "--library", LIB])
    assert e.value.code == 2
    with pytest.raises(SystemExit):
        main(["synth", "embedded", "--library", LIB, "--index", INDEX, "--eta", "3/2"])


def test_reduce_and_export(capsys, tmp_path):
    fig = str(FIXTURES / "separating_game.json")
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "reduce", "collapsed", "--in", fig, "--out", str(out))
    reduced = io.load(out)
    assert code == 0 and len(reduced.game.owner) == 8 * (2 * 2 + 2) + 1
    code, text, _ = run(capsys, "export", "dot", "--in", fig)
    assert code == 0 and text.startswith("digraph")
    code, text, _ = run(capsys, "reduce", "product", "--library", LIB, "--dpw", MONITOR)
    assert code == 0 and json.loads(text)["kind"] == "observed-game"


def test_gadgets_and_oracle(capsys, tmp_path):
    auto = str(FIXTURES / "automaton.json")
    lib, mon = tmp_path / "lib.json", tmp_path / "mon.json"
    code, _, _ = run(capsys, "gadget", "pa", "--in", auto, "--out-lib", str(lib),
                     "--out-dpw", str(mon))
    assert code == 0 and io.load(lib) and io.load(mon)
    code, text, _ = run(capsys, "oracle", "pa-lasso", "--automaton", auto, "--lasso", "0;1,0")
    assert code == 0 and json.loads(text)["lasso"]["cycle"] == [1, 0]
    code, _, err = run(capsys, "oracle", "pa-lasso", "--automaton", auto, "--lasso", "01")
    assert code == 2 and "prefix;cycle" in err

    code, _, err = run(capsys, "gadget", "parity", "--game", str(FIXTURES / "game.json"),
                       "--initial", "0", "--out-lib", "x", "--out-index", "y",
                       "--out-relation", "z")
    assert code == 2 and "deterministic" in err


def test_parity_gadget_keeps_the_winner(capsys, tmp_path):
    game = FIXTURES / "parity_game.json"
    g = make_alternating(io.load(game))
    win, _ = almost_sure_parity(g)
    files = {k: str(tmp_path / (k + ".json")) for k in ("l", "i", "r")}
    code, _, _ = run(capsys, "gadget", "parity", "--game", str(game), "--initial", "0",
                     "--alternate", "--out-lib", files["l"], "--out-index", files["i"],
                     "--out-relation", files["r"])
    assert code == 0
    code, text, _ = run(capsys, "synth", "embedded", "--library", files["l"], "--index",
                        files["i"], "--relation", files["r"])
    assert json.loads(text)["realizable"] == (0 in win)
    assert code == (0 if 0 in win else 1)


def test_generate_is_repeatable(capsys):
    for kind in ("library", "index", "game", "dpw", "automaton"):
        first = run(capsys, "generate", kind, "--seed", "3")
        assert first == run(capsys, "generate", kind, "--seed", "3")
        assert first[0] == 0 and json.loads(first[1])["kind"] == kind


def test_fixture_matches_built_in_example():
    assert io.load(FIXTURES / "separating_game.json") == separating_example()
