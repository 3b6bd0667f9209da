import io
import json
import subprocess
import sys

import pytest

from cubicmap import cli
from cubicmap.modular import EtaProductSpec
from cubicmap.rational_map import affine_map


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


def test_verify_map_ok():
    code, text = run(["verify-map"])
    assert code == 0
    rows = cli.parse_tsv(text)
    assert len(rows) == 5
    assert all(r["member"] is True and r["normal_form"] == 0 for r in rows)
    assert "# passed: true" in text


@pytest.mark.parametrize("var,bad", [("X0", "x1*y3"), ("X1", "-y1*y3 + 1"), ("X2", "x3^2"),
                                     ("X4", "-x2*y2"), ("X5", "-y2*x3")])
def test_verify_map_corrupted_assignment(var, bad, capsys):
    out = io.StringIO()
    code = cli.run_verify_map(out, affine=affine_map(**{var: bad}))
    assert code == 1
    assert "FAIL" in capsys.readouterr().err


def test_verify_map_json():
    code, text = run(["verify-map", "--format", "json"])
    data = json.loads(text)
    assert code == 0 and data["passed"] and len(data["rows"]) == 5


def test_count_v33_check():
    code, text = run(["count", "V33", "2", "--check"])
    rows = cli.parse_tsv(text)
    assert code == 0
    assert [(r["method"], r["projective"]) for r in rows] == [("table", 15), ("brute", 15)]


def test_count_E_range():
    code, text = run(["count", "E", "--primes", "2..100"])
    rows = cli.parse_tsv(text)
    assert code == 0
    assert 3 not in [r["p"] for r in rows]
    assert len(rows) == 24
    for r in rows:
        if r["p"] % 3 == 2:
            assert r["projective"] == r["p"] + 1


def test_count_budget_refusal_rows():
    code, text = run(["count", "V33", "11", "--check", "--budget", "1000"])
    rows = cli.parse_tsv(text)
    assert code == 2
    assert rows[1]["affine_cone"] == "refused"


def test_p3_refused():
    assert run(["count", "E", "3"])[0] == 2
    assert run(["fiber-stats", "3"])[0] == 2
    assert run(["ap", "3"])[0] == 2


def test_bad_prime_usage():
    assert run(["count", "E", "15"])[0] == 2
    assert run(["count", "E"])[0] == 2


def test_fiber_stats():
    code, text = run(["fiber-stats", "5,7"])
    rows = {r["p"]: r for r in cli.parse_tsv(text)}
    assert code == 0
    assert rows[5]["fiber1"] == rows[5]["targets_total"] - rows[5]["undefined"]
    assert rows[5]["fiber3"] == 0
    assert rows[7]["fiber3"] > 0 and rows[7]["fiber0"] > 0 and rows[7]["conserved"] is True


def test_fiber_stats_budget():
    assert run(["fiber-stats", "13", "--budget", "1000"])[0] == 2


@pytest.mark.parametrize("argv", [
    ["count", "E", "2..50", "--check"],
    ["fiber-stats", "5,7"],
    ["ap", "2..60"],
])
def test_tsv_json_same_data(argv):
    _, tsv = run(argv)
    _, js = run(argv + ["--format", "json"])
    assert cli.parse_tsv(tsv) == json.loads(js)


def test_ap_table():
    code, text = run(["ap", "--primes", "2..13"])
    rows = cli.parse_tsv(text)
    assert code == 0
    assert [(r["p"], r["ap_w2"], r["ap_w4"]) for r in rows] == [
        (2, 0, 0), (5, 0, 0), (7, -1, 20), (11, 0, 0), (13, 5, -70)]
    assert all(r["identity_ok"] for r in rows)


def test_ap_bound_usage():
    assert run(["ap", "1009", "--bound", "1000"])[0] == 2


def test_check_identities_100():
    code, text = run(["check-identities", "100"])
    assert code == 0 and "# passed: true" in text


# single exponents changed so that the leading q-power stays integral
@pytest.mark.parametrize("which,spec", [
    ("f2", EtaProductSpec(((3, 10), (9, 2)))),
    ("f2", EtaProductSpec(((3, 2), (9, 10)))),
    ("f2", EtaProductSpec(((3, -6), (9, 2)))),
    ("f4", EtaProductSpec(((3, 16),))),
    ("f4", EtaProductSpec(((3, 0),))),
])
def test_check_identities_corrupted_exponent(which, spec, capsys):
    code = cli.run_check_identities(100, io.StringIO(), **{which: spec})
    assert code == 1
    assert "VIOLATION" in capsys.readouterr().err


def test_non_integral_leading_power_is_a_usage_error():
    with pytest.raises(ValueError):
        cli.run_check_identities(100, io.StringIO(), f2=EtaProductSpec(((3, 3), (9, 2))))


def test_threads_preserve_order():
    _, one = run(["count", "E", "2..200"])
    _, four = run(["count", "E", "2..200", "--threads", "4"])
    assert one == four


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cubicmap", "count", "V33", "5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert cli.parse_tsv(proc.stdout)[0]["projective"] == 156
