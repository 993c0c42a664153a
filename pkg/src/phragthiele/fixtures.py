"""Named example elections with their known outcomes.

Each :class:`Fixture` pairs an election with a list of :class:`Expect`
records: the method token (see :mod:`phragthiele.methods`), an optional
house size override, the elected sequence or set, and optionally the exact
winning figures of selected rounds.  :func:`verify` reruns an expectation and
returns the mismatches.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import EnumerateAll, Election, Lexicographic, election
from .methods import parse_method
from .numeric import RoundingPolicy
from .thiele import parse_satisfaction

__all__ = ["Expect", "Fixture", "FIXTURES", "get_fixture", "threshold_election", "verify", "with_full_ballots"]

F = Fraction


@dataclass(frozen=True)
class Expect:
    """Known result of one method on a fixture.

    ``elected`` is a sequence when ``ordered`` and a set otherwise.
    ``outcomes`` lists every committee under exhaustive tie enumeration.
    ``figures`` holds ``(round, candidate, value)`` triples checked against the
    round scores.
    """

    method: str
    elected: tuple[str, ...] | None = None
    ordered: bool = True
    seats: int | None = None
    outcomes: tuple[frozenset[str], ...] | None = None
    figures: tuple[tuple[int, str, Fraction], ...] = ()
    f: str = "prop"
    rounding: str = "exact"


@dataclass(frozen=True)
class Fixture:
    name: str
    election: Election
    summary: str
    expect: tuple[Expect, ...] = ()


def _seq(text: str) -> tuple[str, ...]:
    return tuple(text.split()) if " " in text else tuple(text)


def seq(method: str, text: str, seats: int | None = None, figures=(), **kw) -> Expect:
    return Expect(method, _seq(text), True, seats, None, tuple(figures), **kw)


def aset(method: str, text: str, seats: int | None = None, **kw) -> Expect:
    return Expect(method, tuple(sorted(_seq(text))), False, seats, **kw)


def alts(method: str, *texts: str, seats: int | None = None, **kw) -> Expect:
    return Expect(method, None, False, seats, tuple(frozenset(_seq(t)) for t in texts), **kw)


def _names(prefix: str, n: int) -> str:
    return " ".join(f"{prefix}{i}" for i in range(1, n + 1))


def with_full_ballots(e: Election, n: int) -> Election:
    """Add ``n`` ballots naming every candidate as one weighted line."""
    from .core import Ballot, Kind

    groups = (tuple(e.candidates),) if e.kind is not Kind.ORDERED else tuple((c,) for c in e.candidates)
    return e.with_ballots([(Ballot(groups), n)])


def threshold_election(c: Fraction | int | str) -> Election:
    """Ballots 1 AB, 1 A, 1 B and weight ``c`` on C; two seats."""
    return election("unordered", 2, [(1, "AB"), (1, "A"), (1, "B"), (1, "C", c)])


E1894_ROWS = [(1034, "ABC"), (519, "PQR"), (90, "ABQ"), (47, "APQ")]

_ALL: list[Fixture] = [
    Fixture(
        "E1894",
        election("unordered", 3, E1894_ROWS),
        "Four ballot types, three seats; the standard worked example for both families.",
        (
            seq("phragmen", "AQB", figures=[(1, "A", F(1171)), (2, "Q", F(192044, 327)), (3, "B", F(107928728, 195525))]),
            aset("thiele-opt", "ABQ"),
            seq("thiele-add", "AQB", figures=[(1, "A", F(1171)), (2, "Q", F(1175, 2)), (3, "B", F(547))]),
            aset("thiele-elim", "ABQ"),
            seq("enestrom", "AQB"),
            seq("opt-load:a2,b2,c2", "AQB"),
            aset("approval", "ABC"),
        ),
    ),
    Fixture(
        "E1894-o",
        election("ordered", 3, E1894_ROWS),
        "The same ballots read as ordered lists.",
        (
            seq("phragmen", "ABP", figures=[(2, "B", F(1316204, 2295)), (3, "P", F(331393, 609))]),
            seq("thiele-ordered", "ABP"),
            seq("sntv", "A", seats=1),
        ),
    ),
    Fixture(
        "E1893a",
        election(
            "unordered",
            5,
            [(1233, "T V F P E"), (585, "T L N B Q"), (124, "T V F L N"), (547, "L N B Q J"), (62, "V F P E W")],
        ),
        "Stockholm 1893, five ballot types with heavy overlap.",
        (alts("phragmen", "TLVNF"),),
    ),
    Fixture(
        "E1893b",
        election(
            "unordered",
            5,
            [
                (680, "H E O B G"),
                (341, "H E X B G"),
                (322, "H Y P Q G"),
                (49, "H P X Q G"),
                (47, "Z Y P Q L"),
                (14, "H E O B X"),
                (10, "H P O Q G"),
            ],
        ),
        "Stockholm 1893, second constituency; the last seat is a tie.",
        (
            alts("phragmen", "HGEBQ", "HGEBP"),
            alts("thiele-add", "HGEBQ", "HGEBP"),
            alts("thiele-elim", "HGEBQ", "HGEBP"),
            alts("thiele-opt", "HGEBQ", "HGEBP"),
        ),
    ),
    Fixture(
        "ETh",
        election(
            "unordered",
            2,
            [
                (960, "ACD"),
                (3000, "BCD"),
                (520, "BC"),
                (1620, "AB"),
                (1081, "AD"),
                (1240, "AC"),
                (360, "BD"),
                (360, "D"),
                (120, "C"),
                (60, "B"),
            ],
        ),
        "Opt, addition and elimination all disagree; opt is not house monotone here.",
        (
            aset("thiele-opt", "AB"),
            aset("thiele-opt", "C", seats=1),
            aset("thiele-opt", "BCD", seats=3),
            seq("thiele-add", "CA"),
            seq("thiele-add", "C", seats=1),
            seq("thiele-add", "CAD", seats=3),
            aset("thiele-elim", "BD"),
            aset("thiele-elim", "D", seats=1),
            aset("thiele-elim", "BCD", seats=3),
            seq("phragmen", "CA"),
            seq("phragmen", "CAD", seats=3),
        ),
    ),
    Fixture(
        "ETh12",
        election("unordered", 2, [(12, "AB"), (12, "AC"), (10, "B"), (10, "C")]),
        "Smallest example separating the three unordered Thiele methods.",
        (
            aset("thiele-opt", "A", seats=1),
            aset("thiele-opt", "BC"),
            seq("thiele-add", "A", seats=1),
            alts("thiele-add", "AB", "AC"),
            aset("thiele-elim", "BC"),
            alts("thiele-elim", "B", "C", seats=1),
            alts("phragmen", "AB", "AC"),
        ),
    ),
    Fixture(
        "EPhr1899",
        election("unordered", 4, [(2001, "A " + _names("B", 6)), (1000, "A " + _names("C", 6))]),
        "Two lists sharing their leader; Thiele favours the larger list.",
        (aset("phragmen", "A B1 B2 C1"), aset("thiele-add", "A B1 B2 B3")),
    ),
    Fixture(
        "EPhr1899-o",
        election("ordered", 4, [(2001, "A " + _names("B", 6)), (1000, "A " + _names("C", 6))]),
        "Ordered reading of the shared-leader lists.",
        (seq("phragmen", "A B1 B2 C1"), seq("thiele-ordered", "A B1 B2 B3")),
    ),
    Fixture(
        "EPhr1899C",
        election("ordered", 11, [(2000, "A " + _names("B", 7)), (1000, "A " + _names("C", 7)), (550, _names("C", 7))]),
        "Shared leader plus a C-only list; the methods order B and C differently.",
        (
            seq("phragmen", "A B1 C1 B2 C2 B3 C3 B4 C4 B5 B6"),
            seq("thiele-ordered", "A C1 B1 B2 C2 B3 C3 B4 C4 B5 B6"),
        ),
    ),
    Fixture(
        "ECassel",
        election("unordered", 9, [(4200, "ABCDEFGHI"), (1710, "ABCUVWXYZ")]),
        "Three shared names, then the remaining seats split between two factions.",
        (aset("phragmen", "ABCDEFGUV"), aset("thiele-add", "ABCDEFGHI")),
    ),
    Fixture(
        "E1913.5",
        election("unordered", 2, [(21, "AB"), (20, "AC"), (12, "D")]),
        "A split party sharing its leader loses its second seat under Thiele.",
        (
            seq("phragmen", "AB", figures=[(2, "B", F(861, 62)), (2, "C", F(820, 61)), (2, "D", F(12))]),
            seq("thiele-add", "AD", figures=[(2, "D", F(12)), (2, "B", F(21, 2)), (2, "C", F(10))]),
        ),
    ),
    Fixture(
        "E1913.5-o",
        election("ordered", 2, [(21, "AB"), (20, "AC"), (12, "D")]),
        "Ordered reading of E1913.5.",
        (seq("phragmen", "AB"), seq("thiele-ordered", "AD")),
    ),
    Fixture(
        "ECassel.p53",
        election("ordered", 5, [(90, _names("A", 4)), (90, _names("B", 4)), (90, "B1 " + _names("C", 4))]),
        "A third party supports the second party's leader.",
        (
            alts("phragmen", "A1 A2 B1 B2 C1"),
            alts("thiele-ordered", "A1 A2 B1 B2 C1"),
            alts("phragmen", "A1 A2 B1 B2 B3 C1", "A1 A2 B1 B2 C1 C2", seats=6),
            alts("thiele-ordered", "A1 A2 A3 B1 B2 C1", "A1 A2 B1 B2 B3 C1", "A1 A2 B1 B2 C1 C2", seats=6),
        ),
    ),
    Fixture(
        "ETenow96",
        election("unordered", 8, [(21, "ABCDH"), (21, "ABCEI"), (21, "ABCFJ"), (21, "ABCGK"), (12, "OPQRS")]),
        "One party split over four lists; Thiele gives the small party a second seat.",
        (aset("phragmen", "ABCDEFGO"), aset("thiele-add", "ABCDEFOP"), aset("thiele-elim", "ABCDEFOP")),
    ),
    Fixture(
        "E1913.16",
        election("ordered", 3, [(34, "AC"), (34, "BC"), (32, "D")]),
        "A shared second name; Thiele's ordered count does not reduce it enough.",
        (aset("phragmen", "ABD"), aset("thiele-ordered", "ABC")),
    ),
    Fixture(
        "E1913.17",
        election("ordered", 4, [(33, "AB"), (32, "AC"), (18, "DF"), (17, "EF")]),
        "The 65% party gets one seat under Thiele's ordered count.",
        (
            seq("phragmen", "ABCD", figures=[(2, "B", F(2145, 98)), (2, "C", F(2080, 97)), (2, "D", F(18))]),
            seq("thiele-ordered", "ADEF", figures=[(2, "D", F(18)), (3, "E", F(17)), (4, "F", F(35, 2))]),
        ),
    ),
    Fixture(
        "Etactic",
        election("unordered", 3, [(37, "ABC"), (13, "KLM")]),
        "Two plain party lists; both families act as D'Hondt.",
        (seq("phragmen", "ABK"), seq("thiele-add", "ABK")),
    ),
    Fixture(
        "Etactic-split",
        election("unordered", 3, [(1, "A"), (9, "AB"), (9, "AC"), (9, "B"), (9, "C"), (13, "KLM")]),
        "The large party splits its vote and takes every seat under Thiele.",
        (seq("thiele-add", "ABC", figures=[(1, "A", F(19)), (2, "B", F(27, 2))]), aset("phragmen", "ABK")),
    ),
    Fixture(
        "Etactic-thwart",
        election("unordered", 3, [(1, "A"), (9, "AB"), (9, "AC"), (9, "B"), (9, "C"), (2, "BKLM"), (11, "KLM")]),
        "Two small-party voters add B and win their party a seat under Thiele.",
        (seq("thiele-add", "BCK", figures=[(1, "B", F(20)), (2, "C", F(18)), (3, "K", F(12))]),),
    ),
    Fixture(
        "Etactic-o",
        election("ordered", 2, [(61, "AB"), (39, "CD")]),
        "Two ordered party lists; both methods elect AC.",
        (seq("phragmen", "AC"), seq("thiele-ordered", "AC"), aset("stv", "AC")),
    ),
    Fixture(
        "Etactic-o-split",
        election("ordered", 2, [(41, "AB"), (20, "B"), (39, "CD")]),
        "The large party splits its ordered vote; Thiele shuts out C.",
        (
            seq("thiele-ordered", "AB", figures=[(2, "B", F(81, 2))]),
            seq("phragmen", "AC", figures=[(2, "B", F(61, 2))]),
        ),
    ),
    Fixture(
        "Etactic-o2",
        election("ordered", 3, [(30, "AB"), (15, "B"), (55, "CD")]),
        "A majority party gets one seat of three under Thiele's ordered count.",
        (seq("thiele-ordered", "CAB"), seq("phragmen", "CAD")),
    ),
    Fixture(
        "ELanke",
        election("ordered", 2, [(15, "AB"), (12, "BX"), (14, "CY"), (3, "ZW")]),
        "Base election of the Lanke flip.",
        (seq("phragmen", "AC", figures=[(2, "C", F(14)), (2, "B", F(27, 2))]),),
    ),
    Fixture(
        "ELanke-AC",
        election("ordered", 2, [(15, "AB"), (12, "BX"), (14, "CY"), (3, "AC")]),
        "Three voters switch to AC and C loses the seat.",
        (seq("phragmen", "AB", figures=[(2, "B", F(162, 11)), (2, "C", F(102, 7))]),),
    ),
    Fixture(
        "Erank",
        election("ordered", 2, [(570, "ABC"), (290, "BC"), (20, "C")]),
        "Ranking Rule followed by unordered Thiele.",
        (
            seq("ranking-thiele", "AC"),
            seq("ranking-thiele", "ACB", seats=3),
            seq("phragmen", "ABC", seats=3),
            seq("thiele-ordered", "ABC", seats=3),
        ),
    ),
    Fixture(
        "Erank-u",
        election("unordered", 3, [(570, "ABC"), (290, "BC"), (20, "C")]),
        "Unordered reading of Erank.",
        (seq("thiele-add", "CBA"), seq("phragmen", "CBA")),
    ),
    Fixture(
        "E-monoTh",
        election("ordered", 2, [(5, "ABC"), (2, "ACB"), (9, "BCA"), (8, "CAB")]),
        "Thiele's ordered count: ranking A lower gets A elected.",
        (seq("thiele-ordered", "BC", figures=[(1, "B", F(9)), (2, "C", F(25, 2)), (2, "A", F(7))]),),
    ),
    Fixture(
        "E-monoTh-b",
        election("ordered", 2, [(5, "ABC"), (9, "BCA"), (10, "CAB")]),
        "E-monoTh after the two ACB voters demote A.",
        (seq("thiele-ordered", "CA", figures=[(1, "C", F(10)), (2, "A", F(10)), (2, "B", F(9))]),),
    ),
    Fixture(
        "Enonmono1",
        election("unordered", 3, [(10, "A1 A2"), (3, "B"), (12, "C"), (21, "A1 A2 B"), (6, "B C")]),
        "Unordered Phragmén non-monotonicity, base.",
        (seq("phragmen", "A1 C A2", figures=[(2, "C", F(18)), (2, "B", F(465, 26)), (3, "A2", F(31, 2)), (3, "B", F(2790, 187))]),),
    ),
    Fixture(
        "Enonmono1-b",
        election("unordered", 3, [(11, "A1 A2"), (3, "B"), (12, "C"), (21, "A1 A2 B"), (6, "B C")]),
        "One more A1 A2 ballot and A2 loses its seat.",
        (seq("phragmen", "A1 B C", figures=[(2, "B", F(960, 53)), (3, "A2", F(10240, 801)), (3, "C", F(960, 71))]),),
    ),
    Fixture(
        "Enonmono2",
        election("unordered", 3, [(4, "A1 A2"), (7, "B"), (1, "A1 A2 B"), (16, "A1 A2 C"), (4, "B C")]),
        "Second non-monotonicity example, base.",
        (seq("phragmen", "A1 B A2"),),
    ),
    Fixture(
        "Enonmono2-b",
        election("unordered", 3, [(4, "A1 A2"), (6, "B"), (2, "A1 A2 B"), (16, "A1 A2 C"), (4, "B C")]),
        "A B voter adds A1 and A2; A2 loses its seat.",
        (seq("phragmen", "A1 C B"),),
    ),
    Fixture(
        "Econs-u-1",
        election("unordered", 2, [(12, "AB"), (1, "B"), (9, "C")]),
        "First electorate of the unordered consistency example.",
        (aset("phragmen", "BC"), aset("thiele-add", "BC")),
    ),
    Fixture(
        "Econs-u-2",
        election("unordered", 2, [(12, "AC"), (9, "B"), (1, "C")]),
        "Second electorate; merged with the first it gives ETh12.",
        (aset("phragmen", "BC"), aset("thiele-add", "BC")),
    ),
    Fixture(
        "EconsTh-o-1",
        election("ordered", 2, [(12, "A"), (10, "BC"), (9, "C")]),
        "First electorate of the ordered Thiele consistency example.",
        (seq("thiele-ordered", "AB"),),
    ),
    Fixture(
        "EconsTh-o-2",
        election("ordered", 2, [(11, "B"), (10, "AC"), (9, "C")]),
        "Second electorate.",
        (seq("thiele-ordered", "BA"),),
    ),
    Fixture(
        "EconsTh-o",
        election("ordered", 2, [(12, "A"), (10, "AC"), (11, "B"), (10, "BC"), (18, "C")]),
        "Both electorates together elect AC.",
        (seq("thiele-ordered", "AC", figures=[(1, "A", F(22)), (2, "C", F(23)), (2, "B", F(21))]),),
    ),
    Fixture(
        "EconsPh-o-1",
        election("ordered", 2, [(15, "AB"), (12, "BX"), (14, "CY")]),
        "First electorate of the ordered Phragmén consistency example.",
        (seq("phragmen", "AC"),),
    ),
    Fixture(
        "EconsPh-o-2",
        election("ordered", 2, [(3, "AC")]),
        "Second electorate: three AC ballots.",
        (seq("phragmen", "AC"),),
    ),
    Fixture(
        "EfullAB",
        election("unordered", 4, [(5, _names("A", 4)), (3, _names("B", 4))]),
        "Two party lists; D'Hondt order.",
        (seq("phragmen", "A1 B1 A2 A3"), seq("limit", "A1 B1 A2 B2"), seq("dhondt", "A1 B1 A2 A3")),
    ),
    Fixture(
        "EfullAB-10",
        election("unordered", 4, [(5, _names("A", 4)), (3, _names("B", 4)), (10, _names("A", 4) + " " + _names("B", 4))]),
        "EfullAB plus ten full ballots; B takes the fourth seat.",
        (seq("phragmen", "A1 B1 A2 B2", figures=[(4, "B2", F(507, 122)), (4, "A3", F(195, 47))]),),
    ),
    Fixture(
        "EfullABC",
        election("unordered", 2, [(10, "A"), (3, "AB"), (2, "C")]),
        "Full ballots change the second seat.",
        (seq("phragmen", "AB", figures=[(2, "B", F(39, 16)), (2, "C", F(2))]), seq("limit", "AC")),
    ),
    Fixture(
        "EfullABC-10",
        election("unordered", 2, [(10, "A"), (3, "AB"), (2, "C"), (10, "ABC")]),
        "EfullABC plus ten full ballots.",
        (seq("phragmen", "AC", figures=[(2, "B", F(299, 36)), (2, "C", F(92, 11))]),),
    ),
    Fixture(
        "Elimit",
        election("unordered", 5, [(7, _names("A", 5)), (3, _names("B", 5))]),
        "Limit method on two lists with a=7, b=3.",
        (seq("limit", "A1 A2 B1 A3 A4"),),
    ),
    Fixture(
        "Ega3-5",
        election("unordered", 5, [(9, "A1 A2 A3"), (2, "X1 X2"), (2, "X1 X3"), (2, "X2"), (2, "X3")]),
        "A majority party may end with two of five seats after ties.",
        (),
    ),
    Fixture(
        "Esplit",
        election(
            "ordered",
            3,
            [(9, "ABC"), (9, "ACB"), (9, "BAC"), (9, "BCA"), (9, "CAB"), (9, "CBA"), (46, "XYZ")],
        ),
        "A majority that splits its orderings loses the majority of seats.",
        (alts("phragmen", "AXY", "BXY", "CXY"),),
    ),
    Fixture(
        "EPhragmen-stv",
        election("ordered", 4, [(22, "ABCD"), (11, "ABE"), (11, "CE")]),
        "Phragmén and STV with the quota taken from the last Phragmén figure.",
        (
            seq("phragmen", "ABCE", figures=[(1, "A", F(33)), (4, "E", F(9))]),
            seq("stv:ig:order=elect:q=9", "ABCE"),
            aset("stv:ig:order=surplus:q=9", "ABCD"),
        ),
    ),
    Fixture(
        "EABAC",
        election("unordered", 2, [(100, "AB"), (100, "AC")]),
        "Everyone votes for A, yet equal-split optimisation elects BC.",
        (aset("opt-load:a1,b1,c1", "BC"), aset("opt-load:a1,b2,c1", "BC")),
    ),
    Fixture(
        "EABAC+",
        election("unordered", 2, [(100, "AB"), (100, "AC"), (1, "B"), (1, "C")]),
        "Every global load optimisation elects BC.",
        tuple(aset(f"opt-load:{a},{b},c1", "BC") for a in ("a1", "a2") for b in ("b1", "b2"))
        + (alts("opt-load:a2,b2,c2", "AB", "AC"),),
    ),
    Fixture(
        "EPhr1896b",
        election("unordered", 2, [(1145, "A"), (885, "B"), (900, "C"), (55, "AB"), (100, "AC")]),
        "Sequential equal-split least squares: B and C tie for the second seat.",
        (alts("opt-load:a1,b1,c2", "AB", "AC"),),
    ),
    Fixture(
        "Mora-var",
        election("unordered", 3, [(9, "AB"), (1, "ABC"), (3, "CD")]),
        "Sequential free-split least squares with frozen loads.",
        (seq("opt-load:a2,b1,c2", "ACB"),),
    ),
    Fixture(
        "Echu",
        election("unordered", 2, [(5, "AB"), (2, "CD")]),
        "Least squares acts as Sainte-Laguë, max load as D'Hondt.",
        tuple(aset(f"opt-load:{a},b1,{c}", "AC") for a in ("a1", "a2") for c in ("c1", "c2"))
        + tuple(aset(f"opt-load:{a},b2,{c}", "AB") for a in ("a1", "a2") for c in ("c1", "c2")),
    ),
]

FIXTURES: dict[str, Fixture] = {fx.name: fx for fx in _ALL}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        from .core import ValidationError

        raise ValidationError(f"unknown fixture {name!r}; try one of: {', '.join(FIXTURES)}") from None


def run_expectation(e: Election, x: Expect, policy=None):
    spec = parse_method(x.method, f=parse_satisfaction(x.f), rounding=RoundingPolicy(x.rounding))
    target = e if x.seats is None else e.with_seats(x.seats)
    if policy is None:
        policy = EnumerateAll(256) if x.outcomes is not None else Lexicographic()
    return spec.run(target, policy)


def verify(fx: Fixture, expectations: Iterable[Expect] | None = None) -> list[str]:
    """Rerun each expectation; return a description of every mismatch."""
    problems = []
    for x in fx.expect if expectations is None else expectations:
        out = run_expectation(fx.election, x)
        label = f"{fx.name} {x.method}" + (f" s={x.seats}" if x.seats else "")
        if x.outcomes is not None:
            got = out.outcome_sets()
            if got != set(x.outcomes):
                problems.append(f"{label}: outcomes {sorted(map(sorted, got))} != {sorted(map(sorted, x.outcomes))}")
            continue
        if x.ordered and out.elected != x.elected:
            problems.append(f"{label}: elected {list(out.elected)} != {list(x.elected)}")
        if not x.ordered and out.committee != frozenset(x.elected):
            problems.append(f"{label}: elected {sorted(out.elected)} != {sorted(x.elected)}")
        for rnd, cand, value in x.figures:
            scores = out.rounds[rnd - 1].scores if len(out.rounds) >= rnd else {}
            if scores.get(cand) != value:
                problems.append(f"{label}: round {rnd} figure for {cand} is {scores.get(cand)} not {value}")
    return problems
