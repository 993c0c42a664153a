import itertools
import json
import random
from fractions import Fraction as F

import pytest

from phragthiele.audit import (
    CandidateMonotonicity,
    Consistency,
    FullBallotInvariance,
    HouseMonotonicity,
    PartyListReduction,
    RepresentationCriterion,
    RepresentationScan,
    check_representation,
    parse_criterion,
    planted_bloc_election,
    random_election,
    replay_witness,
    scan_property,
)
from phragthiele.core import BudgetExceeded, Kind, Lexicographic, ValidationError, election
from phragthiele.fixtures import get_fixture
from phragthiele.methods import parse_method


def brute_representation(e, committee, kind, ell):
    """Voter-level search: expand every ballot row into single voters and try every group."""
    voters = [b.as_set for b, m in e.ballots for _ in range(m)]
    n, s, E = len(voters), e.seats, frozenset(committee)
    for r in range(1, n + 1):
        if r * s < ell * n:
            continue
        for group in itertools.combinations(voters, r):
            if len(frozenset.intersection(*group)) < ell:
                continue
            if kind == "EJR":
                if all(len(E & g) < ell for g in group):
                    return False
            elif len(E & frozenset.union(*group)) < ell:
                return False
    return True


def small_election(rng):
    return random_election(rng, Kind.UNORDERED, candidates=(3, 5), types=(1, 4), seats=(1, 3), count=(1, 3))


# ---------------------------------------------------------------- representation


def test_phpc_witness_on_split_party():
    e = election("unordered", 2, [(41, "AB"), (20, "B"), (39, "CD")])
    rep = check_representation(e, "AB", RepresentationCriterion("PhPC", 1))
    assert not rep.passed
    (w,) = rep.witnesses
    assert w.detail["bloc"] == ["C", "D"]
    assert w.detail["weight"] == 39 and w.detail["threshold"] == F(100, 3)
    assert replay_witness("thiele-add", w)


@pytest.mark.parametrize("name,token", [("Etactic-split", "thiele-add"), ("Etactic-o-split", "thiele-ordered")])
def test_thiele_fails_phpc_on_tactic_fixtures(name, token):
    e = get_fixture(name).election
    out = parse_method(token).run(e)
    assert not check_representation(e, out.elected, RepresentationCriterion("PhPC")).passed
    assert check_representation(e, parse_method("phragmen").run(e).elected, RepresentationCriterion("PhPC")).passed


def test_pjr_examples_pass():
    e = get_fixture("E1894").election
    assert check_representation(e, "AQB", parse_criterion("pjr")).passed
    g = get_fixture("Ega3-5").election
    rep = check_representation(g, ["A1", "A2", "X1", "X2", "X3"], parse_criterion("pjr:3"))
    assert rep.passed
    # the A bloc holds 9 of 17 votes, short of 3/5 of them
    assert 9 * 5 < 3 * 17


def test_representation_errors():
    e = get_fixture("E1894").election
    with pytest.raises(ValidationError):
        parse_criterion("xjr")
    with pytest.raises(ValidationError):
        check_representation(e, "AZ", parse_criterion("jr"))
    with pytest.raises(ValidationError):
        check_representation(e, "AQB", parse_criterion("ejr:4"))
    many = election("unordered", 2, [(1, [f"C{i}", "X"]) for i in range(21)])
    with pytest.raises(BudgetExceeded):
        check_representation(many, ["X"], parse_criterion("jr"))


def test_type_level_checker_matches_voter_level_search():
    rng = random.Random(21)
    for _ in range(150):
        e = small_election(rng)
        committee = rng.sample(sorted(e.candidates), e.seats)
        for kind in ["PJR", "EJR"]:
            for ell in range(1, e.seats + 1):
                got = check_representation(e, committee, RepresentationCriterion(kind, ell)).passed
                assert got == brute_representation(e, committee, kind, ell), (e, committee, kind, ell)


def test_implication_chain():
    rng = random.Random(22)
    for _ in range(300):
        e = random_election(rng, Kind.UNORDERED, types=(1, 6), seats=(1, 4))
        committee = rng.sample(sorted(e.candidates), e.seats)
        jr, pjr, ejr = (check_representation(e, committee, parse_criterion(k)).passed for k in ["jr", "pjr", "ejr"])
        assert (not ejr or pjr) and (not pjr or jr)


@pytest.mark.parametrize("kind", [Kind.UNORDERED, Kind.ORDERED])
def test_phragmen_passes_phpc_on_planted_blocs(kind):
    rng = random.Random(23)
    m = parse_method("phragmen")
    for _ in range(200):
        e, ell, bloc = planted_bloc_election(rng, kind)
        rep = check_representation(e, m.run(e).elected, RepresentationCriterion("PhPC", ell))
        assert rep.passed, rep.summary()
        assert rep.stats["blocs_checked"] >= 1


def test_thiele_opt_passes_ejr_scan():
    rep = scan_property("thiele-opt", None, RepresentationScan(parse_criterion("ejr"), trials=60), seed=5, policy=Lexicographic())
    assert rep.passed


# ---------------------------------------------------------------- property scans


def test_thiele_opt_house_failure_on_eth():
    rep = scan_property("thiele-opt", get_fixture("ETh").election, HouseMonotonicity(2))
    assert not rep.passed
    (w,) = rep.witnesses
    assert w.detail["smaller"] == [["C"]] and w.detail["larger"] == [["A", "B"]]
    assert replay_witness("thiele-opt", w)


def test_sequential_methods_are_house_monotone_on_random_elections():
    for token in ["phragmen", "thiele-add", "limit"]:
        assert scan_property(token, None, HouseMonotonicity(4, trials=40), seed=2).passed, token


def test_consistency_failure():
    e1, e2 = get_fixture("Econs-u-1").election, get_fixture("Econs-u-2").election
    rep = scan_property("phragmen", None, Consistency(e1, e2))
    assert not rep.passed
    (w,) = rep.witnesses
    assert w.detail["first"] == w.detail["second"] == [["B", "C"]]
    assert w.detail["merged"] == [["A", "B"], ["A", "C"]]
    assert replay_witness("phragmen", w)


def test_consistency_passes_for_identical_parts():
    e = get_fixture("E1894").election
    assert scan_property("thiele-opt", None, Consistency(e, e)).passed


def test_full_ballot_failure():
    rep = scan_property("phragmen", get_fixture("EfullABC").election, FullBallotInvariance(10))
    assert not rep.passed
    (w,) = rep.witnesses
    assert (w.detail["base"], w.detail["after"]) == ([["A", "B"]], [["A", "C"]])
    assert replay_witness("phragmen", w)
    assert scan_property("thiele-opt", get_fixture("EfullABC").election, FullBallotInvariance(10)).passed


def test_party_list_reduction_scan():
    rep = scan_property("thiele-add", None, PartyListReduction(150), seed=3)
    assert rep.passed and rep.stats["trials"] == 150


@pytest.mark.parametrize("token", ["phragmen", "thiele-add", "thiele-elim"])
def test_monotone_methods_have_no_violations(token):
    rep = scan_property(token, None, CandidateMonotonicity(150), seed=4)
    assert rep.passed and rep.stats["trials"] == 150


def test_ordered_thiele_violation_is_found():
    rep = scan_property("thiele-ordered", get_fixture("E-monoTh-b").election, CandidateMonotonicity(300), seed=1)
    assert not rep.passed
    w = rep.witnesses[0]
    assert w.detail["target"] == "A" and "A" not in w.detail["after"]
    assert replay_witness("thiele-ordered", w)


def test_reports_are_canonical_json():
    a = scan_property("thiele-ordered", get_fixture("E-monoTh-b").election, CandidateMonotonicity(100), seed=7)
    b = scan_property("thiele-ordered", get_fixture("E-monoTh-b").election, CandidateMonotonicity(100), seed=7)
    assert a.to_json() == b.to_json()
    obj = json.loads(a.to_json())
    assert obj["verdict"] == "fail" and obj["witnesses"]
    assert a.summary().startswith("CandidateMonotonicity[thiele-ordered]: FAIL")
