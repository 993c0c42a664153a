import random
from fractions import Fraction

import pytest

from phragthiele.audit import random_election
from phragthiele.core import Ballot, Election, EnumerateAll, Kind, Lexicographic, ValidationError, election
from phragthiele.fixtures import FIXTURES, get_fixture
from phragthiele.numeric import RoundingPolicy, truncate_2dec
from phragthiele.phragmen import (
    LabeledBallot,
    UnderSupportError,
    phragmen_elect,
    phragmen_elect_by_power,
    phragmen_party_elect,
    ranking_plus_thiele,
    ranking_rule,
    recursive_alliance_elect,
)
from phragthiele.reference import divisor_method

F = Fraction


def e1894(kind="unordered"):
    return get_fixture("E1894" if kind == "unordered" else "E1894-o").election


def test_e1894_unordered_figures():
    out = phragmen_elect(e1894())
    assert out.elected == ("A", "Q", "B")
    assert out.extra["W"] == (F(1171), F(192044, 327), F(107928728, 195525))


def test_e1894_power_formulation():
    out = phragmen_elect_by_power(e1894())
    assert out.elected == ("A", "Q", "B")
    t1, t2, t3 = out.extra["t"]
    assert (t1, t2, t3) == (F(1, 1171), F(327, 192044), F(195525, 107928728))
    assert out.extra["loads"] == (t3, t2, t3, t2)


def test_e1894_ordered():
    out = phragmen_elect(e1894("ordered"))
    assert out.elected == ("A", "B", "P")
    assert out.rounds[1].scores["B"] == F(1316204, 2295)
    power = phragmen_elect_by_power(e1894("ordered"))
    assert power.extra["t"][1] == F(2295, 1316204)


def test_single_type():
    out = phragmen_elect_by_power(election("unordered", 1, [(10, "A")]))
    assert out.extra["t"] == (F(1, 10),)


def _law_round_two_oracle():
    # After A wins with 1171, the A ballots get truncated place numbers 1034/1171 and 90/1171 (for B)
    # and 47/1171 (for P); every division is cut to two decimals.
    places_b = truncate_2dec(F(1034, 1171)) + truncate_2dec(F(90, 1171))
    places_p = truncate_2dec(F(47, 1171))
    return truncate_2dec(F(1124) / (1 + places_b)), truncate_2dec(F(566) / (1 + places_p))


def test_law_mode_truncates_every_division():
    out = phragmen_elect(e1894("ordered"), rounding=RoundingPolicy.TRUNCATE_2DEC)
    assert out.elected == ("A", "B", "P")
    wb, wp = _law_round_two_oracle()
    assert (wb, wp) == (F(57641, 100), F(54423, 100))
    assert out.rounds[1].scores == {"B": wb, "P": wp}
    assert all((w * 100).denominator == 1 for w in out.extra["W"])


def test_law_mode_needs_ordered_ballots():
    with pytest.raises(ValidationError):
        phragmen_elect(e1894(), rounding=RoundingPolicy.TRUNCATE_2DEC)


def test_exhausted_ballots_fill_by_policy():
    e = election("unordered", 3, [(5, "A"), (2, "B")], candidates=["A", "B", "C", "D"])
    out = phragmen_elect(e)
    assert out.elected == ("A", "B", "C")
    assert out.warnings and "exhausted" in out.warnings[0]
    with pytest.raises(UnderSupportError):
        phragmen_elect(e, strict=True)


def test_weak_engine_reduces_to_both_kinds():
    rows = [(1034, "A B C"), (519, "P Q R"), (90, "A B Q"), (47, "A P Q")]
    single = election("weak", 3, [(m, names) for m, names in rows])
    assert phragmen_elect(single).elected == phragmen_elect(e1894()).elected
    chains = election("weak", 3, [(m, names.replace(" ", " > ")) for m, names in rows])
    assert phragmen_elect(chains).elected == phragmen_elect(e1894("ordered")).elected


def _phragmen_fixtures():
    for fx in FIXTURES.values():
        if any(x.method == "phragmen" and x.rounding == "exact" for x in fx.expect):
            yield fx.name


@pytest.mark.parametrize("name", sorted(_phragmen_fixtures()))
def test_place_numbers_sum_to_seats_filled(name):
    e = get_fixture(name).election
    out = phragmen_elect(e)
    for n, r in enumerate(out.rounds, start=1):
        assert sum(r.loads) == n
    W = out.extra["W"]
    assert all(a >= b for a, b in zip(W, W[1:]))


def random_elections(n, seed, kinds=(Kind.UNORDERED, Kind.ORDERED, Kind.WEAK)):
    rng = random.Random(seed)
    for i in range(n):
        yield random_election(rng, kinds[i % len(kinds)], candidates=(2, 8), types=(1, 6), seats=(1, 4))


def test_power_formulation_equivalence():
    for e in random_elections(1000, 11):
        a, b = phragmen_elect(e), phragmen_elect_by_power(e)
        assert a.elected == b.elected
        for w, t, r in zip(a.extra["W"], b.extra["t"], a.rounds):
            if "degenerate fill" not in r.notes:
                assert w * t == 1
        # loads never decrease
        for r1, r2 in zip(b.rounds, b.rounds[1:]):
            assert all(x <= y for x, y in zip(r1.loads, r2.loads))


def clone_expansion_seats(e: Election, s: int) -> set[tuple]:
    """Oracle: replace every party by s clone candidates and run the plain method."""
    rows = [(m, [f"{p}_{k}" for p in b.names for k in range(1, s + 1)], b.weight) for b, m in e.ballots]
    out = phragmen_elect(election("unordered", s, rows), EnumerateAll(5000))
    found = set()
    for committee in out.outcome_sets():
        counts = {p: 0 for p in e.candidates}
        for c in committee:
            counts[c.rsplit("_", 1)[0]] += 1
        found.add(tuple(sorted(counts.items())))
    return found


def test_party_version_examples():
    a = phragmen_party_elect(election("unordered", 1, [(5, "A"), (3, "B")]), 4)
    assert a.seats == {"A": 3, "B": 1}
    assert phragmen_party_elect(election("unordered", 1, [(7, "P")]), 3).seats == {"P": 3}
    sym = phragmen_party_elect(election("unordered", 2, [(10, "PQ")]), policy=EnumerateAll(10))
    # every clone of P and Q ties in both rounds, so all three splits are outcomes
    frozen = {(("P", 2), ("Q", 0)), (("P", 1), ("Q", 1)), (("P", 0), ("Q", 2))}
    assert clone_expansion_seats(election("unordered", 2, [(10, "PQ")]), 2) == frozen
    assert {tuple(sorted(x.items())) for x in sym.outcome_sets()} == frozen


def test_party_version_matches_clone_expansion():
    rng = random.Random(5)
    for _ in range(60):
        e = random_election(rng, "unordered", candidates=(2, 3), types=(1, 3), seats=(1, 1), count=(1, 30))
        s = rng.randint(1, 3)
        alloc = phragmen_party_elect(e, s, EnumerateAll(5000))
        got = {tuple(sorted(x.items())) for x in alloc.outcome_sets()}
        assert got == clone_expansion_seats(e, s)


def test_ranking_rule():
    assert ranking_rule(get_fixture("Erank").election) == ["A"]
    assert ranking_rule(election("ordered", 3, [(4, "ABC")])) == ["A", "B", "C"]
    e = election("ordered", 2, [(3, "AB"), (1, "CD")])
    # 3/4 > 1/2 and 3/4 > 2/3, but 3/4 < 3/4 fails for a third name
    assert F(3, 4) > F(1, 2) and F(3, 4) > F(2, 3)
    assert ranking_rule(e) == ["A", "B"]


def test_ranking_plus_thiele():
    erank = get_fixture("Erank").election
    assert ranking_plus_thiele(erank, 2).elected == ("A", "C")
    assert ranking_plus_thiele(erank, 3).elected == ("A", "C", "B")
    assert ranking_plus_thiele(election("ordered", 2, [(5, "ABC")])).elected == ("A", "B")


def test_recursive_alliance():
    one = recursive_alliance_elect([LabeledBallot(("A", "B"), 2, "P", faction="f"), LabeledBallot(("B", "A"), 1, "P", faction="f")])
    direct = phragmen_elect(election("ordered", 2, [(2, "AB"), (1, "BA")]))
    assert one == {"P": list(direct.elected)} == {"P": ["A", "B"]}

    lists = [LabeledBallot(tuple(f"A{i}" for i in range(1, 5)), 5, "A", alliance="X"), LabeledBallot(tuple(f"B{i}" for i in range(1, 5)), 3, "B", alliance="X")]
    merged = recursive_alliance_elect(lists)["X"]
    parties = [c[0] for c in merged]
    dh = divisor_method({"A": 5, "B": 3}, 8)
    # both lists have four names, so the D'Hondt order holds until A runs out
    assert parties[:6] == list(dh.order[:6])
    assert parties[6:] == ["B", "B"]
    assert parties[:4] == ["A", "B", "A", "A"]

    plain = recursive_alliance_elect([LabeledBallot(("A", "B"), 2, "P"), LabeledBallot(("C", "D"), 1, "Q")])
    assert plain == {"P": ["A", "B"], "Q": ["C", "D"]}


def test_party_list_reduction_both_kinds():
    from phragthiele.audit import party_list_election

    rng = random.Random(3)
    checked = 0
    while checked < 200:
        kind = (Kind.UNORDERED, Kind.ORDERED)[checked % 2]
        e = party_list_election(rng, kind)
        votes = {b.names[0][0]: F(m) for b, m in e.ballots}
        oracle = divisor_method(votes, e.seats, policy=EnumerateAll(100))
        if len(oracle.outcome_sets()) > 1:
            continue
        checked += 1
        counts: dict[str, int] = {}
        for c in phragmen_elect(e).elected:
            counts[c[0]] = counts.get(c[0], 0) + 1
        assert counts == {p: n for p, n in oracle.seats.items() if n}
