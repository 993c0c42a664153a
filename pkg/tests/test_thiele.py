import itertools
import random
from fractions import Fraction

import pytest

from phragthiele.audit import random_election
from phragthiele.core import BudgetExceeded, EnumerateAll, EnumerationOverflow, Lexicographic, Seeded, ValidationError, approval_tally, election
from phragthiele.fixtures import FIXTURES, get_fixture, with_full_ballots
from phragthiele.numeric import DomainError
from phragthiele.reference import divisor_method, inverse_weight_divisors
from phragthiele.thiele import (
    PROPORTIONAL,
    STRONG,
    WEAK,
    SatisfactionFunction,
    count_vectors,
    parse_satisfaction,
    satisfaction,
    thiele_addition,
    thiele_elimination,
    thiele_opt,
    thiele_ordered,
)

F = Fraction
E1894 = get_fixture("E1894").election
ETH = get_fixture("ETh").election


def brute_force_optima(e, f, s=None):
    """Oracle: score every committee directly from the ballots."""
    s = e.seats if s is None else s
    best, sets = None, []
    for S in itertools.combinations(e.candidates, s):
        val = F(0)
        for b, m in e.ballots:
            n = len(set(S) & set(b.names))
            val += b.weight * m * sum((f.w(k) for k in range(1, n + 1)), F(0))
        if best is None or val > best:
            best, sets = val, [frozenset(S)]
        elif val == best:
            sets.append(frozenset(S))
    return best, set(sets)


def test_satisfaction_function_values():
    assert [PROPORTIONAL.w(n) for n in (1, 2, 3)] == [1, F(1, 2), F(1, 3)]
    assert STRONG.f(4) == 4 and WEAK.f(4) == 1 and PROPORTIONAL.f(0) == 0
    custom = parse_satisfaction("custom:1,1/2,1/4,repeat-last")
    assert custom.w(6) == F(1, 4)
    assert parse_satisfaction("custom:1,1/3").w(3) == 0
    assert str(custom) == "custom:1,1/2,1/4,repeat-last"
    for bad in ("custom:2,1", "custom:1,-1", "bogus", "custom:"):
        with pytest.raises(ValidationError):
            parse_satisfaction(bad)
    with pytest.raises(DomainError):
        PROPORTIONAL.w(0)


def test_satisfaction_examples():
    assert satisfaction({"A", "B", "Q"}, E1894) == F(4611, 2)
    assert satisfaction({"P", "Q", "R"}, E1894) == 1112
    assert satisfaction(set(), E1894) == 0


def test_e1894_all_three():
    assert thiele_opt(E1894).committee == frozenset("ABQ")
    add = thiele_addition(E1894)
    assert add.elected == ("A", "Q", "B")
    assert [r.scores[r.winner] for r in add.rounds] == [1171, F(1175, 2), 547]
    elim = thiele_elimination(E1894)
    assert elim.committee == frozenset("ABQ")
    assert elim.extra["eliminated"] == ("R", "P", "C")
    assert elim.rounds[0].scores["R"] == 173
    assert elim.rounds[1].scores["P"] == F(1651, 6)


def test_eth_divergence():
    assert thiele_opt(ETH).committee == frozenset("AB")
    assert thiele_opt(ETH.with_seats(1)).committee == frozenset("C")
    assert thiele_opt(ETH.with_seats(3)).committee == frozenset("BCD")
    assert thiele_addition(ETH).elected == ("C", "A")
    assert thiele_elimination(ETH).committee == frozenset("BD")


def test_eth12_elimination_removes_a_first():
    out = thiele_elimination(get_fixture("ETh12").election)
    assert out.extra["eliminated"][0] == "A"
    assert out.committee == frozenset("BC")


def test_e1913_5_addition():
    assert thiele_addition(get_fixture("E1913.5").election).elected == ("A", "D")


def test_ordered_examples():
    assert thiele_ordered(get_fixture("E1894-o").election).elected == ("A", "B", "P")
    split = thiele_ordered(get_fixture("Etactic-o-split").election)
    assert split.elected == ("A", "B") and split.rounds[1].scores["B"] == F(81, 2)
    assert thiele_ordered(get_fixture("E-monoTh").election).elected == ("B", "C")
    assert thiele_ordered(get_fixture("E-monoTh-b").election).elected == ("C", "A")


def test_opt_budget_refusal():
    e = election("unordered", 10, [(1, c) for c in "ABCDEFGHIJKLMNOPQRST"])
    need = count_vectors([1] * 20, 10)
    assert need == 184756
    with pytest.raises(BudgetExceeded) as info:
        thiele_opt(e, budget=1000)
    assert "184756" in str(info.value)


def test_opt_enumerates_all_maximizers():
    out = thiele_opt(get_fixture("E1893b").election, policy=EnumerateAll(10))
    assert out.outcome_sets() == {frozenset("HGEBQ"), frozenset("HGEBP")}
    assert out.ties


def test_opt_clone_classes_keep_search_small():
    # seven interchangeable B names and six C names: 14 count vectors, not C(14, 4)
    out = thiele_opt(get_fixture("EPhr1899").election)
    assert out.committee == frozenset({"A", "B1", "B2", "B3"})


@pytest.mark.parametrize("f", [PROPORTIONAL, STRONG, WEAK, parse_satisfaction("custom:1,2,1/2")])
def test_opt_matches_brute_force(f):
    rng = random.Random(7)
    for _ in range(120):
        e = random_election(rng, "unordered", candidates=(2, 7), types=(1, 6), seats=(1, 4))
        best, sets = brute_force_optima(e, f)
        out = thiele_opt(e, f, EnumerateAll(1000))
        assert out.extra["satisfaction"] == best
        assert out.outcome_sets() == sets
        assert thiele_opt(e, f).committee == min(sets, key=sorted)


def test_addition_is_greedy():
    for name in ("E1894", "ETh", "ETenow96", "Erank-u", "ECassel", "Enonmono1"):
        e = get_fixture(name).election
        out = thiele_addition(e)
        prefix: set[str] = set()
        for r in out.rounds:
            base = satisfaction(prefix, e)
            gains = {c: satisfaction(prefix | {c}, e) - base for c in e.candidates if c not in prefix}
            assert gains == dict(r.scores)
            assert gains[r.winner] == max(gains.values())
            prefix.add(r.winner)


def test_strong_function_collapses_to_approval():
    rng = random.Random(2)
    for _ in range(500):
        e = random_election(rng, "unordered", candidates=(2, 6), types=(1, 5), seats=(1, 3))
        tally = approval_tally(e)
        ranked = sorted(tally.values(), reverse=True)
        cut = ranked[e.seats - 1]
        must = {c for c, v in tally.items() if v > cut}
        allowed = {c for c, v in tally.items() if v >= cut}
        for out in (thiele_opt(e, STRONG), thiele_addition(e, STRONG), thiele_elimination(e, STRONG)):
            assert must <= out.committee <= allowed


def _thiele_fixture_elections():
    for fx in FIXTURES.values():
        if fx.election.kind.value == "unordered" and len(fx.election.candidates) <= 12:
            yield fx.name


def _outcome_view(run, e):
    """Committees over every tie branch, or the lexicographic one when there are too many."""
    try:
        return run(e, EnumerateAll(256)).outcome_sets()
    except EnumerationOverflow:
        return {run(e, Lexicographic()).committee}


@pytest.mark.parametrize("name", sorted(_thiele_fixture_elections()))
def test_full_ballots_never_matter(name):
    e = get_fixture(name).election
    runs = [
        lambda x, p: thiele_addition(x, policy=p),
        lambda x, p: thiele_elimination(x, policy=p),
        lambda x, p: thiele_opt(x, policy=p),
    ]
    for run in runs:
        base = _outcome_view(run, e)
        for n in (1, 10, 1000):
            bigger = with_full_ballots(e, n)
            assert _outcome_view(run, bigger) == base
            assert run(bigger, Lexicographic()).elected == run(e, Lexicographic()).elected


def test_sequential_methods_nest():
    for name in ("ETh", "ETh12", "E1894", "ETenow96", "Enonmono2"):
        e = get_fixture(name).election
        prev_add = prev_elim = None
        for s in range(1, min(5, len(e.candidates)) + 1):
            add = thiele_addition(e.with_seats(s)).committee
            elim = thiele_elimination(e.with_seats(s)).committee
            if prev_add is not None:
                assert prev_add <= add and prev_elim <= elim
            prev_add, prev_elim = add, elim


def test_opt_not_house_monotone_on_eth():
    one = thiele_opt(ETH.with_seats(1)).committee
    two = thiele_opt(ETH).committee
    assert not one <= two


@pytest.mark.parametrize("f", [PROPORTIONAL, parse_satisfaction("custom:1,1/3,1/5,repeat-last")])
def test_party_lists_follow_inverse_weight_divisors(f):
    from phragthiele.audit import party_list_election

    rng = random.Random(17)
    done = 0
    while done < 150:
        e = party_list_election(rng, "unordered", parties=(2, 4), seats=(1, 6))
        votes = {b.names[0][0]: F(m) for b, m in e.ballots}
        oracle = divisor_method(votes, e.seats, inverse_weight_divisors(f), EnumerateAll(100))
        if len(oracle.outcome_sets()) > 1:
            continue
        done += 1
        want = {p: n for p, n in oracle.seats.items() if n}
        for out in (thiele_addition(e, f), thiele_opt(e, f)):
            got: dict[str, int] = {}
            for c in out.elected:
                got[c[0]] = got.get(c[0], 0) + 1
            assert got == want
        ordered = election("ordered", e.seats, [(m, list(b.names)) for b, m in e.ballots])
        got = {}
        for c in thiele_ordered(ordered, f).elected:
            got[c[0]] = got.get(c[0], 0) + 1
        assert got == want


def test_seeded_opt_is_deterministic():
    e = get_fixture("E1893b").election
    picks = {thiele_opt(e, policy=Seeded(4)).committee for _ in range(3)}
    assert len(picks) == 1
