import json

import pytest

from basilica import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_orders_table(capsys):
    code, out, _ = run(capsys, "orders", "--max-level", "10")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert {k: rows[6][k] for k in ("e", "b", "m", "aut")} == {"e": 43, "b": 88, "m": 91, "aut": 127}
    assert {k: rows[0][k] for k in ("e", "b", "m", "aut")} == {"e": 1, "b": 1, "m": 1, "aut": 1}


def test_orders_check(capsys):
    code, out, _ = run(capsys, "orders", "--max-level", "4", "--check", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("n,e,b,m")
    assert all(line.endswith("PASS") for line in lines[1:])


def test_sweep_and_closure(capsys):
    code, out, _ = run(capsys, "sweep", "--depth", "4", "--selector", "E", "--check")
    assert code == 0 and json.loads(out)["count"] == 64
    code, out, _ = run(capsys, "closure", "--depth", "3", "--generators", "alpha,beta", "--check")
    payload = json.loads(out)
    assert code == 0 and payload["count"] == 64 and payload["same_set"]


def test_byte_identical(capsys):
    argv = ("preimage", "--x0", "5", "--depth", "7", "--seed", "3", "--threads", "1")
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    assert "seconds" not in first


def test_float_format(capsys):
    _, out, _ = run(capsys, "preimage", "--x0", "5", "--depth", "5")
    payload = json.loads(out)
    assert payload["passed"] and payload["relabel_swaps"] == 0
    assert '"tol": 1.0000000000000001e-09' in out


def test_timings_flag(capsys):
    _, out, _ = run(capsys, "sweep", "--depth", "2", "--timings")
    assert "seconds" in json.loads(out)


def test_condition(capsys):
    code, out, _ = run(capsys, "condition", "--scan", "1..23")
    assert code == 0
    assert json.loads(out)["qualifying"] == [5, 6, 10, 11, 12, 13, 14, 19, 20, 21, 22, 23]
    code, out, _ = run(capsys, "condition", "--x0", "5")
    assert code == 0 and json.loads(out)["degree"] == 16
    code, out, _ = run(capsys, "condition", "--x0", "3", "--format", "text")
    assert code == 0 and "condition: false" in out


def test_text_format(capsys):
    _, out, _ = run(capsys, "orders", "--max-level", "3", "--format", "text")
    assert out.splitlines()[0].split() == ["n", "e", "b", "m", "aut", "pink"]


@pytest.mark.parametrize(
    "argv,code",
    [
        (("condition", "--x0", "-1"), 3),
        (("condition",), 3),
        (("sweep", "--depth", "6"), 4),
        (("sweep", "--depth", "4", "--selector", "nope"), 3),
        (("sweep", "--depth", "4", "--selector", "Frattini"), 5),
        (("closure", "--depth", "4", "--budget", "10"), 4),
        (("preimage", "--x0", "5", "--depth", "4", "--tol", "1"), 5),
        (("preimage", "--x0", "5", "--depth", "7", "--tol", "1e-30"), 2),
        (("frobnicate",), 3),
        (("sweep", "--depth", "x"), 3),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    if code in (3, 4, 5):
        assert json.loads(err)["error"]


def test_module_entry():
    import subprocess
    import sys

    done = subprocess.run([sys.executable, "-m", "basilica", "orders", "--max-level", "2"], capture_output=True, text=True)
    assert done.returncode == 0
    assert json.loads(done.stdout)["passed"]
