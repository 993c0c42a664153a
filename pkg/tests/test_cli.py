import io
import json
import subprocess
import sys
from dataclasses import replace

import pytest

from phragthiele.cli import run
from phragthiele.core import approval_tally, parse_election, parse_election_json
from phragthiele.fixtures import FIXTURES, verify


def call(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err, stdin=io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def test_tally_trace_e1894():
    code, out, _ = call("tally", "--method", "phragmen", "--trace", "fixtures:E1894")
    assert code == 0
    assert "elected (in order): A Q B" in out
    assert "Q: 192044/327 ≈587.3 *" in out
    assert "107928728/195525" in out


def test_tally_without_trace_lists_elected_only():
    code, out, _ = call("tally", "--method", "thiele-opt", "fixtures:E1894")
    assert code == 0
    assert out == "method: thiele-opt\nelected (set): A B Q\n"


def test_json_uses_exact_pairs():
    code, out, _ = call("tally", "--method", "phragmen", "--format", "json", "fixtures:E1894")
    assert code == 0
    obj = json.loads(out)
    assert obj["elected"] == ["A", "Q", "B"]
    assert obj["rounds"][1]["scores"]["Q"] == {"num": 192044, "den": 327}


def test_compare_divergence_rows():
    code, out, _ = call("compare", "--methods", "phragmen,thiele-add", "fixtures:E1913.5")
    assert code == 0
    assert "2     B         D  <- differs" in out
    code, out, _ = call("compare", "--methods", "phragmen,stv:ig:order=surplus", "fixtures:EPhragmen-stv")
    assert "committees differ: phragmen +E, stv:ig:order=surplus +D" in out


def test_compare_json_and_method_lists_with_commas():
    code, out, _ = call("compare", "--methods", "opt-load:a2,b2,c2,phragmen", "--format", "json", "fixtures:E1894")
    assert code == 0
    obj = json.loads(out)
    assert obj["methods"] == ["opt-load:a2,b2,c2", "phragmen"]
    assert obj["same_committee"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["tally", "--method", "phragmen", "--rounding", "law2dec", "fixtures:E1894"],
        ["tally", "--method", "nosuch", "fixtures:E1894"],
        ["tally", "--method", "phragmen", "--bogus", "fixtures:E1894"],
        ["tally", "--method", "phragmen", "fixtures:nosuch"],
        ["tally", "--method", "phragmen", "/nonexistent/file"],
        ["tally", "--method", "phragmen", "--tie", "coin", "fixtures:E1894"],
        ["tally", "--method", "phragmen", "--max-names", "2", "fixtures:E1894"],
        ["compare", "--methods", "phragmen", "fixtures:E1894"],
        ["audit", "--method", "phragmen", "--check", "consistency", "fixtures:E1894"],
        ["audit", "--method", "phragmen", "--check", "wat", "fixtures:E1894"],
        ["fixtures", "export"],
        ["audit", "--method", "phragmen", "--check", "house"],
        ["audit", "--method", "phragmen", "--check", "party-lists", "fixtures:E1894"],
        [],
    ],
)
def test_usage_and_validation_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == "" and err.startswith(("error:", "phragthiele"))


def test_budget_and_enumeration_overflow_exit_3():
    assert call("tally", "--method", "thiele-opt", "--budget", "5", "fixtures:E1893b")[0] == 3
    assert call("tally", "--method", "thiele-add", "--tie", "all:1", "fixtures:ETh12")[0] == 3


def test_audit_exit_codes():
    code, out, _ = call("audit", "--method", "thiele-opt", "--check", "house:2", "fixtures:ETh")
    assert code == 1 and out.startswith("HouseMonotonicity[thiele-opt]: FAIL")
    code, out, _ = call("audit", "--method", "phragmen", "--check", "pjr", "fixtures:E1894")
    assert code == 0 and out.startswith("PJR: PASS")
    code, out, _ = call("audit", "--method", "phragmen", "--check", "consistency", "fixtures:Econs-u-1", "fixtures:Econs-u-2", "--format", "json")
    assert code == 1 and json.loads(out)["verdict"] == "fail"
    code, _, _ = call("audit", "--method", "thiele-add", "--check", "party-lists:50", "--seed", "3")
    assert code == 0


def test_tie_enumeration_lists_both_outcomes():
    code, out, _ = call("tally", "--method", "thiele-add", "--tie", "all:64", "fixtures:ETh12")
    assert code == 0
    assert "tied outcomes:\n  A B\n  A C\n" in out


def test_stdin_and_seats_override():
    text = "kind: unordered\nseats: 1\n3: A B\n2: C\n"
    code, out, _ = call("tally", "--method", "phragmen", "--seats", "2", "-", stdin=text)
    assert code == 0 and "elected (in order): A C" in out


def test_fixtures_list_and_verify():
    code, out, _ = call("fixtures", "list")
    assert code == 0 and len(out.splitlines()) == len(FIXTURES)
    code, out, _ = call("fixtures", "verify", "E1894", "ETh")
    assert code == 0 and out == "E1894: ok\nETh: ok\n"


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_every_fixture_round_trips_through_export(fmt):
    for name, fx in FIXTURES.items():
        code, out, _ = call("fixtures", "export", name, "--format", fmt)
        assert code == 0
        e = parse_election_json(out) if fmt == "json" else parse_election(out)
        assert e.kind == fx.election.kind and e.seats == fx.election.seats
        assert approval_tally(e) == approval_tally(fx.election), name
        assert verify(replace(fx, election=e)) == [], name


def test_repeated_invocations_are_byte_identical():
    argv = [sys.executable, "-m", "phragthiele", "tally", "--method", "thiele-add", "--tie", "seed:7", "--trace", "fixtures:E1893b"]
    runs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1] and runs[0]
