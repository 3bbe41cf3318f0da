import json
import subprocess
import sys

import pytest

from crembed.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_sphere(capsys):
    code, out, _ = run(capsys, "check", "--N", "2", "--phi", "z1*c1", "--samples", "3", "--order", "2")
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["conclusion"] == "OBSTRUCTION_SATISFIED"
    assert set(rep) == {"schema_version", "tool_version", "gamma_table_version", "command", "config", "result"}


def test_check_obstructed_exit_code(capsys):
    code, out, _ = run(capsys, "check", "--N", "1", "--phi", "z1*c1 + z1^2*c1^2", "--samples", "2", "--order", "2")
    assert code == 1 and json.loads(out)["result"]["conclusion"] == "OBSTRUCTED"


def test_reports_are_byte_identical(capsys):
    args = ["check", "--N", "2", "--phi", "z1*c1 + z1^2*c1^2", "--samples", "2", "--order", "2", "--seed", "3"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b


def test_timings_only_on_request(capsys):
    _, out, _ = run(capsys, "check", "--N", "1", "--phi", "z1*c1", "--samples", "1", "--order", "1", "--timings")
    assert "timings" in json.loads(out)


def test_syntax_error_exit_65(capsys):
    code, _, err = run(capsys, "check", "--N", "2", "--phi", "z1*c1 +")
    assert code == 65 and "^" in err


def test_levi_flat_exit_65(capsys):
    code, _, err = run(capsys, "assoc-pde", "--phi", "u^2")
    assert code == 65 and "Levi" in err


def test_usage_errors(capsys):
    assert run(capsys, "check", "--phi", "z1*c1")[0] == 64
    assert run(capsys, "bounds", "--n", "2", "--N", "1")[0] == 64
    assert run(capsys)[0] == 64
    with pytest.raises(SystemExit) as info:
        main(["check", "--bogus"])
    assert info.value.code == 64


def test_assoc_pde(capsys):
    code, out, _ = run(capsys, "assoc-pde", "--phi", "z1*c1 + z1^2*c1^2", "--order", "4")
    assert code == 0 and json.loads(out)["result"]["pde_at_z0"] == {"11": "-i*xi1^2"}


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "1", "--N", "2")
    res = json.loads(out)["result"]
    assert code == 0 and res["mu"] == 87 and res["rows"][-1]["sharp"]["mu"] == 18


def test_obstruction_command(capsys):
    code, out, _ = run(capsys, "obstruction", "--N", "2", "--phi", "z1*c1", "--alphas", "1;2;3", "--samples", "2", "--order", "2")
    assert code == 0
    assert json.loads(out)["command"] == "obstruction"


def test_wronskian_command(capsys):
    code, out, _ = run(capsys, "wronskian", "--phi", "1, z1, z1^2, z1^3", "--order", "5")
    res = json.loads(out)["result"]
    assert code == 0 and res["span_dims"] == [1, 2, 3, 3, 3]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "bounds", "--n", "1", "--N", "1", "--output", str(target))
    assert code == 0 and out == "" and json.loads(target.read_text())["command"] == "bounds"


def test_missing_gamma_table_exit_65(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "crembed", "check", "--N", "2", "--phi", "z1*c1", "--samples", "1",
         "--gamma-table", str(tmp_path / "none.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 65 and "derivative table" in proc.stderr


def test_selfcheck_quick(capsys):
    code, out, _ = run(capsys, "selfcheck", "--quick")
    rep = json.loads(out)["result"]
    assert code == 0 and rep["passed"]
    assert all("seconds" not in c for c in rep["checks"])
