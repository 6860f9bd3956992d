import json

import pytest

from dgtwist.cli import EXIT_ERROR, EXIT_OK, EXIT_VERDICT, main
from dgtwist.dgcat import interval
from dgtwist.io import dump_category, dumps


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def broken_associativity(tmp_path):
    doc = json.loads(dumps(dump_category(interval(3))))
    for c in doc["composition"]:
        if (c["g"], c["f"]) == ("2->3", "0->2"):
            c["result"] = []
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def missing_identity(tmp_path):
    doc = json.loads(dumps(dump_category(interval(1))))
    del doc["identities"]["1"]
    path = tmp_path / "noid.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_operad_golden(capsys):
    code, out, err = run(capsys, "operad", "1,1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"] is True
    assert doc["report"]["dims"] == {"-1": 1, "0": 2}
    assert doc["report"]["H"] == {"0": 1}
    assert doc["config"]["ordinal"] == "1,1"


def test_rerun_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["operad", "1,1", "--out", str(a)]) == EXIT_OK
    assert main(["operad", "1,1", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_field_flag(capsys):
    code, out, _ = run(capsys, "operad", "1,2", "--field", "fp", "32003")
    assert code == EXIT_OK
    assert json.loads(out)["config"]["field"] == "F32003"


def test_theorem3_and_oracle(capsys):
    assert run(capsys, "theorem3", "0", "interval:2")[0] == EXIT_OK
    assert run(capsys, "theorem3", "2", "collapse")[0] == EXIT_OK
    code, out, _ = run(capsys, "bar-oracle", "1", "collapse", "--pair", "0", "1", "0", "1")
    assert code == EXIT_OK and len(json.loads(out)["report"]["pairs"]) == 1


def test_category_commands_produce_loadable_files(tmp_path, capsys):
    base = tmp_path / "i1.json"
    assert main(["interval", "1", "--out", str(base)]) == EXIT_OK
    tw = tmp_path / "tw.json"
    assert main(["twist", "1", str(base), "--omit-composition", "--check", "--out", str(tw)]) == EXIT_OK
    assert run(capsys, "validate", str(tw))[0] == EXIT_OK
    code, out, _ = run(capsys, "cohomology", str(tw), "--pair", "(0,0)", "(1,1)")
    assert code == EXIT_OK and json.loads(out)["report"]["H"] == {"0": 1}
    assert run(capsys, "tensor", "interval:1", "collapse")[0] == EXIT_OK


def test_verdict_failure_exits_1(broken_associativity, capsys):
    code, out, _ = run(capsys, "validate", broken_associativity)
    assert code == EXIT_VERDICT
    assert json.loads(out)["report"]["checks"]["associativity"]["passed"] is False


def test_malformed_file_exits_2(missing_identity, tmp_path, capsys):
    out = tmp_path / "err.json"
    code, _, err = run(capsys, "validate", missing_identity, "--out", str(out))
    assert code == EXIT_ERROR
    assert "identities" in err and "'1'" in err
    assert json.loads(out.read_text())["error"]["kind"] == "format"


@pytest.mark.parametrize("argv", [
    ["operad", "1,x"],
    ["operad", "1,1", "--field", "fp", "9"],
    ["operad", "1,1", "--field", "reals"],
    ["operad", "2,2", "--guard-basis", "3"],
    ["twist", "-1", "interval:1"],
    ["validate", "/nonexistent/file.json"],
    ["validate", "interval:x"],
    ["sweep", "--k", "0"],
])
def test_errors_exit_2(argv, capsys):
    assert run(capsys, *argv)[0] == EXIT_ERROR


def test_missing_command_exits_2(capsys):
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == EXIT_ERROR


def test_sweep_with_guard_reports_aborts(capsys):
    code, out, err = run(capsys, "sweep", "--k", "2", "--sum", "2", "--guard-basis", "3")
    doc = json.loads(out)
    assert doc["report"]["aborted"] > 0 and "aborted" in err
    assert code == EXIT_VERDICT


def test_small_sweep_passes(capsys):
    code, out, _ = run(capsys, "sweep", "--k", "2", "--sum", "2", "--jobs", "2")
    assert code == EXIT_OK
    assert json.loads(out)["report"]["passed"] == 6 + 3
