import json
import subprocess
import sys

import pytest

from semgame.cli import main
from semgame.game import Terminal, apply_move, initial_position, legal_moves, move_from_dict, position_hash
from semgame.structure import parse_model
from semgame.syntax import index_subformulas, parse_formula

MODEL = """
domain: a
relation R/1 partial
constant c0 = a
"""


@pytest.fixture()
def model_file(tmp_path):
    path = tmp_path / "m.pm"
    path.write_text(MODEL)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_truth_teller_exit_20(capsys, model_file):
    code, out, _ = run(capsys, "solve", "-m", model_file, "-f", "claim C0. C0")
    assert code == 20
    assert out.strip() == "indeterminate"


def test_solve_insert_verified_exit_10(capsys):
    code, out, _ = run(capsys, "solve", "-f", "insert x. x = x", "--budget", "8")
    assert code == 10
    assert out.strip() == "verified"


def test_solve_falsified_exit_11(capsys):
    code, out, _ = run(capsys, "solve", "-f", "exists x. not x = x")
    assert code == 11
    assert out.strip() == "falsified"


def test_solve_unknown_exit_21(capsys):
    code, out, _ = run(capsys, "solve", "-f", "claim C0. insert x. C0", "--budget", "5")
    assert code == 21
    assert out.strip() == "unknown"


def test_check_det_on_undefined_atom(capsys, model_file):
    code, out, _ = run(capsys, "check", "-m", model_file, "-f", "det R(c0)")
    assert code == 0
    assert out.strip() == "plus=false minus=true"


def test_check_json(capsys, model_file):
    code, out, _ = run(capsys, "check", "-m", model_file, "--json", "-f", "wnot R(c0)")
    assert code == 0
    assert json.loads(out) == {"plus": True, "minus": True}


def test_render_nl(capsys):
    code, out, _ = run(capsys, "render-nl", "-f", "claim C0. C0")
    assert code == 0
    assert out.strip() == "it is possible to verify the claim C0 which states that C0"


def test_encode(capsys, model_file):
    code, out, _ = run(capsys, "encode", "-m", model_file)
    assert code == 0
    assert out.strip() == "n=1;R:1:?;c0:0:0;"


def test_parse_error_exit_65(capsys):
    code, _, err = run(capsys, "solve", "-f", "exists . x = x")
    assert code == 65
    assert "semgame:" in err


def test_model_error_exit_65(capsys, tmp_path):
    bad = tmp_path / "bad.pm"
    bad.write_text("domain: a\nrelation R/1 partial\n + (zz)\n")
    code, _, err = run(capsys, "check", "-m", str(bad), "-f", "x = x")
    assert code == 65


def test_missing_file_exit_65(capsys):
    code, _, err = run(capsys, "check", "-m", "/nonexistent.pm", "-f", "x = x")
    assert code == 65


def test_usage_error_exit_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve"])  # missing -f
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_wnot_under_solve_is_input_error(capsys):
    code, _, err = run(capsys, "solve", "-f", "wnot x = x")
    assert code == 65
    assert "game" in err


def test_solve_json_trace_replays(capsys, model_file):
    code, out, _ = run(capsys, "solve", "-m", model_file, "--json",
                       "-f", "insertT R(x). R(x)")
    assert code == 10
    payload = json.loads(out)
    assert payload["outcome"] == "verified"
    assert payload["exitCode"] == 10
    assert payload["solver"] == "exact"
    vocab, s = parse_model(MODEL)
    f = parse_formula("insertT R(x). R(x)", vocab)
    table = index_subformulas(f)
    p = initial_position(s, {}, table)
    for step in payload["trace"]["steps"]:
        assert position_hash(p, table) == step["from"]
        p = apply_move(p, move_from_dict(step["move"]), table)
        assert position_hash(p, table) == step["to"]
    end = legal_moves(p, table)
    assert isinstance(end, Terminal)
    assert end.winner.value == payload["trace"]["terminal"]


def test_module_entrypoint_subprocess(model_file):
    proc = subprocess.run(
        [sys.executable, "-m", "semgame.cli", "solve", "-m", model_file, "-f", "claim C0. not C0"],
        capture_output=True, text=True)
    assert proc.returncode == 20
    assert proc.stdout.strip() == "indeterminate"


def test_play_scripted_win(model_file):
    proc = subprocess.run(
        [sys.executable, "-m", "semgame.cli", "play", "-m", model_file,
         "-f", "exists x. x = x", "--role", "eloise"],
        input="0\n", capture_output=True, text=True)
    assert proc.returncode == 10
    assert "eloise wins" in proc.stdout


def test_play_hint_then_quit(model_file):
    proc = subprocess.run(
        [sys.executable, "-m", "semgame.cli", "play", "-m", model_file,
         "-f", "exists x. R(x)", "--role", "eloise"],
        input=":hint\n:quit\n", capture_output=True, text=True)
    assert proc.returncode == 0
    assert "hint:" in proc.stdout


def test_play_never_reaching_human_is_reported(model_file):
    proc = subprocess.run(
        [sys.executable, "-m", "semgame.cli", "play", "-m", model_file,
         "-f", "claim C0. C0", "--role", "abelard"],
        input="", capture_output=True, text=True, timeout=60)
    assert proc.returncode == 20
    assert "cycling" in proc.stdout


def test_play_engine_side_moves(model_file):
    # human is abelard; engine (eloise) wins the existential by itself
    proc = subprocess.run(
        [sys.executable, "-m", "semgame.cli", "play", "-m", model_file,
         "-f", "exists x. x = x", "--role", "abelard"],
        input="", capture_output=True, text=True)
    assert proc.returncode == 10
    assert "engine" in proc.stdout
