import io
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phragthiele.core import (
    Ballot,
    EnumerateAll,
    EnumerationOverflow,
    Kind,
    Lexicographic,
    ParseError,
    Seeded,
    ValidationError,
    approval_tally,
    break_tie,
    election,
    first_name_tally,
    parse_election,
    parse_election_json,
    parse_tie_policy,
    render_election_json,
    render_election_text,
)
from phragthiele.thiele import thiele_addition

E1894_TEXT = "kind: unordered\nseats: 3\n1034: A B C\n519: P Q R\n90: A B Q\n47: A P Q\n"


def test_parse_e1894():
    e = parse_election(E1894_TEXT)
    assert e.kind is Kind.UNORDERED
    assert e.seats == 3
    assert len(e.ballots) == 4
    assert e.total_weight == 1690


def test_parse_weak_groups():
    e = parse_election("kind: weak\nseats: 2\n90: A B > C")
    (b, m), = e.ballots
    assert b.groups == (("A", "B"), ("C",))
    assert m == 90


def test_parse_weights_comments_blanks_and_roster():
    text = "# header\nkind: ordered\nseats: 2\ncandidates: A B C D\n3x1/2: A B  # half weight\n2:\n1: C\n"
    e = parse_election(text)
    assert e.candidates == ("A", "B", "C", "D")
    assert e.ballots[0][0].weight == Fraction(1, 2)
    assert e.total_weight == Fraction(5, 2)
    assert e.notes == ("dropped 2 blank ballot(s)",)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("kind: ordered\nseats: 2\n5: A A B", "duplicate"),
        ("kind: unordered\nseats: 0\n5: A B", "positive"),
        ("kind: unordered\nseats: 3\n5: A B", "exceed"),
        ("kind: unordered\nseats: 1\n-2: A", "unrecognized"),
        ("kind: unordered\nseats: 1\n2.5: A", "multiplicity"),
        ("kind: unordered\nseats: 1\nfoo: A", "unrecognized"),
        ("kind: sorted\nseats: 1\n1: A", "unknown kind"),
        ("seats: 1\n1: A", "kind"),
        ("kind: unordered\n1: A", "seats"),
        ("kind: weak\nseats: 1\n1: A > > B", "empty group"),
        ("kind: ordered\nseats: 1\n1: A > B", "only allowed"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_election(text)
    assert fragment in str(info.value)


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as info:
        parse_election("kind: ordered\nseats: 2\n1: A B\n5: A A B")
    assert "line 4" in str(info.value)


def test_stream_input():
    assert parse_election(io.StringIO(E1894_TEXT)) == parse_election(E1894_TEXT)


def test_approval_tally_e1894():
    t = approval_tally(parse_election(E1894_TEXT))
    assert t == {"A": 1171, "B": 1124, "C": 1034, "P": 566, "Q": 656, "R": 519}


def test_approval_tally_small_cases():
    assert approval_tally(parse_election("kind: unordered\nseats: 1\ncandidates: A B\n")) == {"A": 0, "B": 0}
    e = election("unordered", 1, [(1, "AB", Fraction(3, 2))])
    assert approval_tally(e) == {"A": Fraction(3, 2), "B": Fraction(3, 2)}


def test_first_name_tally_uses_first_group():
    e = parse_election("kind: weak\nseats: 1\n4: A B > C\n3: C > A\n")
    assert first_name_tally(e) == {"A": 4, "B": 4, "C": 3}


def test_ballot_invariants():
    with pytest.raises(ValidationError):
        Ballot((("A",), ("A",)))
    with pytest.raises(ValidationError):
        Ballot((("A",),), Fraction(0))
    with pytest.raises(ValidationError):
        from phragthiele.core import Election

        Election(("A", "B"), ((Ballot((("A", "B"),)), 1),), Kind.ORDERED, 1)


def test_break_tie_policies():
    assert break_tie(Lexicographic(), {"C", "B"}) == "B"
    first = break_tie(Seeded(7), {"B", "C"}, 2)
    assert all(break_tie(Seeded(7), ["C", "B"], 2) == first for _ in range(5))
    assert {break_tie(Seeded(s), {"B", "C"}, 1) for s in range(40)} == {"B", "C"}


def test_parse_tie_policy():
    assert parse_tie_policy("lex") == Lexicographic()
    assert parse_tie_policy("seed:3") == Seeded(3)
    assert parse_tie_policy("all:5") == EnumerateAll(5)
    for bad in ("coin", "seed:x", "all:0"):
        with pytest.raises(ValidationError):
            parse_tie_policy(bad)


def test_enumerate_all_eth12_addition():
    e = election("unordered", 2, [(12, "AB"), (12, "AC"), (10, "B"), (10, "C")])
    out = thiele_addition(e, policy=EnumerateAll(10))
    assert out.outcome_sets() == {frozenset("AB"), frozenset("AC")}


def test_enumeration_overflow_lists_partial_outcomes():
    e = election("unordered", 3, [(1, "A"), (1, "B"), (1, "C"), (1, "D"), (1, "E")])
    with pytest.raises(EnumerationOverflow) as info:
        thiele_addition(e, policy=EnumerateAll(2))
    assert info.value.partial


ids = st.sampled_from(["A", "B", "C", "D", "E", "X1", "X2"])


@st.composite
def elections(draw):
    kind = draw(st.sampled_from(list(Kind)))
    rows = []
    for _ in range(draw(st.integers(1, 5))):
        names = draw(st.lists(ids, min_size=1, max_size=5, unique=True))
        if kind is Kind.UNORDERED:
            groups = (tuple(names),)
        elif kind is Kind.ORDERED:
            groups = tuple((c,) for c in names)
        else:
            cut = draw(st.integers(1, len(names)))
            groups = tuple(g for g in (tuple(names[:cut]), tuple(names[cut:])) if g)
        w = draw(st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(7, 3)]))
        rows.append((Ballot(groups, w), draw(st.integers(0, 50))))
    names = sorted({c for b, _ in rows for c in b.names})
    from phragthiele.core import Election

    return Election(tuple(names), tuple(rows), kind, draw(st.integers(1, len(names))))


def _visible(e):
    return (e.kind, e.seats, e.candidates, tuple((b, m) for b, m in e.ballots if m > 0))


@given(elections())
def test_text_round_trip(e):
    again = parse_election(render_election_text(e))
    assert _visible(again) == _visible(e)
    assert parse_election(render_election_text(again)) == again


@given(elections())
def test_json_round_trip(e):
    again = parse_election_json(render_election_json(e))
    assert _visible(again) == _visible(e)
    assert render_election_json(again) == render_election_json(parse_election_json(render_election_json(again)))


@given(elections(), elections())
def test_tally_is_additive(e1, e2):
    if e1.kind is not e2.kind:
        e2 = e1
    merged = e1.merged(e2)
    t1, t2, t = approval_tally(e1), approval_tally(e2), approval_tally(merged)
    for c in merged.candidates:
        assert t[c] == t1.get(c, 0) + t2.get(c, 0)
