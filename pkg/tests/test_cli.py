import random

import pytest

from jqlet.cli import DecodeError, decode_many, decode_value, main
from jqlet.values import eq_value, from_python, render_value


# --- decoding ------------------------------------------------------------------

@pytest.mark.parametrize(
    "text,obj",
    [
        ("null", None),
        ("true", True),
        ("false", False),
        ("0", 0),
        ("-7", -7),
        ("[]", []),
        ("[1, [2], true]", [1, [2], True]),
        ("  [ 1 ,\n 2 ]  ", [1, 2]),
        ("9223372036854775807", 2**63 - 1),
        ("-9223372036854775808", -(2**63)),
    ],
)
def test_decode_value(text, obj):
    assert eq_value(decode_value(text), from_python(obj))


@pytest.mark.parametrize(
    "bad",
    ["nul", "", "[1", "[1,]", "tru e", "1 2", "9223372036854775808",
     "-9223372036854775809", "[1 2]", "--1", "1.5"],
)
def test_decode_errors(bad):
    with pytest.raises(DecodeError):
        decode_value(bad)


def test_decode_error_position():
    with pytest.raises(DecodeError) as exc:
        decode_many("[1]\n nul")
    assert exc.value.line == 2 and exc.value.col == 2


def test_decode_many():
    got = decode_many("1 [2] \n null")
    assert [render_value(v) for v in got] == ["1", "[2]", "null"]
    assert decode_many("   ") == []


def test_decode_render_roundtrip_random():
    from astgen import gen_value

    rng = random.Random(2020)
    for _ in range(1000):
        v = from_python(gen_value(rng, 3))
        assert eq_value(decode_value(render_value(v)), v)


# --- the command ------------------------------------------------------------------

def run_cli(args, stdin="", capsys=None, monkeypatch=None):
    import io
    import sys

    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_update_on_stdin(capsys, monkeypatch):
    code, out, err = run_cli([".[] |= (. + 1)"], "[1,2,3]", capsys, monkeypatch)
    assert (code, out) == (0, "[2,3,4]\n")


def test_null_input_mode(capsys, monkeypatch):
    code, out, err = run_cli(["-n", "range(3)"], "", capsys, monkeypatch)
    assert (code, out) == (0, "0\n1\n2\n")


def test_multiple_inputs(capsys, monkeypatch):
    code, out, err = run_cli([". + 1"], "1 2 3", capsys, monkeypatch)
    assert (code, out) == (0, "2\n3\n4\n")


def test_runtime_error_sets_exit_5_and_continues(capsys, monkeypatch):
    code, out, err = run_cli(["1 |= ."], "0", capsys, monkeypatch)
    assert code == 5
    assert "not a path expression" in err
    # remaining inputs still processed after an error
    code, out, err = run_cli([".[]"], "1 [9]", capsys, monkeypatch)
    assert code == 5 and out == "9\n"


def test_parse_error_exit_2(capsys, monkeypatch):
    code, out, err = run_cli(["1 +"], "", capsys, monkeypatch)
    assert code == 2 and "jqlet:" in err


def test_resolve_error_exit_2(capsys, monkeypatch):
    code, out, err = run_cli(["nosuch"], "", capsys, monkeypatch)
    assert code == 2 and "nosuch" in err


def test_decode_error_exit_3(capsys, monkeypatch):
    code, out, err = run_cli(["."], "nul", capsys, monkeypatch)
    assert code == 3


def test_engine_flag_flips_documented_divergence(capsys, monkeypatch):
    prog = ".[] |= (if . == 2 then empty else . end)"
    code, out, _ = run_cli([prog], "[1,2,2,3]", capsys, monkeypatch)
    assert (code, out) == (0, "[1,3]\n")
    code, out, _ = run_cli(["--engine", "legacy", prog], "[1,2,2,3]", capsys, monkeypatch)
    assert (code, out) == (0, "[1,2,3]\n")


def test_length_flag(capsys, monkeypatch):
    code, out, _ = run_cli(["--length", "[range(.)]"], "5", capsys, monkeypatch)
    assert (code, out) == (0, "5\n")


def test_defs_file(tmp_path, capsys, monkeypatch):
    defs = tmp_path / "defs.jq"
    defs.write_text("def double: . + .;\n")
    code, out, _ = run_cli(["--defs", str(defs), "double"], "21", capsys, monkeypatch)
    assert (code, out) == (0, "42\n")


def test_filter_from_file_and_input_file(tmp_path, capsys, monkeypatch):
    prog = tmp_path / "prog.jq"
    prog.write_text(". + 1\n")
    data = tmp_path / "in.json"
    data.write_text("41")
    code, out, _ = run_cli(["-f", str(prog), str(data)], "", capsys, monkeypatch)
    assert (code, out) == (0, "42\n")


def test_program_source_required_exactly_once(tmp_path, capsys, monkeypatch):
    code, _, err = run_cli([], "", capsys, monkeypatch)
    assert code == 2
    prog = tmp_path / "p.jq"
    prog.write_text(".")
    code, _, err = run_cli(["-f", str(prog), "in.json", "extra"], "", capsys, monkeypatch)
    assert code == 2  # -f mode takes at most one positional (the input file)


def test_no_prelude_flag(capsys, monkeypatch):
    code, _, err = run_cli(["--no-prelude", "add"], "[1]", capsys, monkeypatch)
    assert code == 2


def test_static_path_warning_on_stderr(capsys, monkeypatch):
    code, out, err = run_cli(["1 |= ."], "0", capsys, monkeypatch)
    assert "warning" in err and "path" in err
