"""Phragmén's sequential method.

One engine covers unordered, ordered and weakly ordered ballots: each ballot
supports the unelected members of its first group that still has any.  In
each round every supported candidate gets the comparison figure

    W_i = (votes supporting i) / (1 + place numbers of those ballots)

and the largest figure wins.  The winner's supporters get place numbers
``v / W_winner``, so the place numbers always sum to the seats filled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import (
    Allocation,
    Ballot,
    Chooser,
    Election,
    Kind,
    Lexicographic,
    Outcome,
    RoundRecord,
    TiePolicy,
    ValidationError,
    election,
    run_with_policy,
)
from .numeric import RoundingPolicy, divide, truncate_2dec

__all__ = [
    "LabeledBallot",
    "UnderSupportError",
    "phragmen_elect",
    "phragmen_elect_by_power",
    "phragmen_elect_grouped",
    "phragmen_party_elect",
    "ranking_plus_thiele",
    "ranking_rule",
    "recursive_alliance_elect",
]


class UnderSupportError(ValidationError):
    """Ballots ran out before every seat found a supported candidate."""

    def __init__(self, round_index: int, missing: int):
        self.round = round_index
        self.missing = missing
        super().__init__(f"no supported candidate left in round {round_index}; {missing} seat(s) unfilled")


def _argmax(scores: Mapping[str, Fraction], chooser: Chooser, rnd: int, *, minimize: bool = False) -> str:
    best = min(scores.values()) if minimize else max(scores.values())
    tied = sorted(c for c, x in scores.items() if x == best)
    return chooser.pick(tied, rnd)


def _degenerate_pick(e: Election, elected: list[str], chooser: Chooser, rnd: int, strict: bool) -> str:
    if strict:
        raise UnderSupportError(rnd, e.seats - len(elected))
    rest = sorted(c for c in e.candidates if c not in elected)
    return chooser.pick(rest, rnd)


def phragmen_elect(
    e: Election,
    policy: TiePolicy = Lexicographic(),
    rounding: RoundingPolicy = RoundingPolicy.EXACT,
    *,
    strict: bool = False,
) -> Outcome:
    """Elect ``e.seats`` candidates by comparison figures.

    With ``rounding=TRUNCATE_2DEC`` the count follows the statutory grouped
    procedure for ordered ballots and truncates every division to two
    decimals.  If all ballots are exhausted before the seats are filled, the
    remaining seats go to unelected candidates by the tie policy and a
    warning is recorded, unless ``strict`` is set, in which case
    :class:`UnderSupportError` is raised.
    """
    if rounding is RoundingPolicy.TRUNCATE_2DEC:
        if e.kind is not Kind.ORDERED:
            raise ValidationError("two-decimal law mode requires ordered ballots")
        return phragmen_elect_grouped(e, policy, rounding, strict=strict)
    return run_with_policy(lambda ch: _phragmen_run(e, ch, strict), policy)


def _phragmen_run(e: Election, chooser: Chooser, strict: bool) -> Outcome:
    rows = [(b, b.weight * m) for b, m in e.ballots]
    q = [Fraction(0)] * len(rows)
    elected: list[str] = []
    rounds: list[RoundRecord] = []
    warnings: list[str] = []
    figures: list[Fraction] = []
    for rnd in range(1, e.seats + 1):
        votes: dict[str, Fraction] = {}
        places: dict[str, Fraction] = {}
        backers: dict[str, list[int]] = {}
        for j, (b, v) in enumerate(rows):
            if v == 0:
                continue
            for c in b.active_group(elected):
                votes[c] = votes.get(c, 0) + v
                places[c] = places.get(c, 0) + q[j]
                backers.setdefault(c, []).append(j)
        if not votes:
            winner = _degenerate_pick(e, elected, chooser, rnd, strict)
            warnings.append(f"round {rnd}: all ballots exhausted, {winner} seated by tie policy")
            elected.append(winner)
            figures.append(Fraction(0))
            rounds.append(RoundRecord(rnd, {}, winner, tuple(q), ("degenerate fill",)))
            continue
        W = {c: votes[c] / (1 + places[c]) for c in votes}
        winner = _argmax(W, chooser, rnd)
        best = W[winner]
        for j in backers[winner]:
            q[j] = rows[j][1] / best
        elected.append(winner)
        figures.append(best)
        rounds.append(RoundRecord(rnd, W, winner, tuple(q)))
    return Outcome(
        "phragmen",
        tuple(elected),
        True,
        tuple(rounds),
        tuple(chooser.events),
        tuple(warnings),
        extra={"W": tuple(figures), "place_numbers": tuple(q)},
    )


def phragmen_elect_by_power(e: Election, policy: TiePolicy = Lexicographic(), *, strict: bool = False) -> Outcome:
    """The same method in the voting-power formulation.

    Each ballot row carries a load ``r`` (voting power spent per ballot).  The
    candidate needing the least per-ballot power

        t_i = (1 + sum of v*r over supporters) / (sum of v over supporters)

    is elected and its supporters' loads are raised to ``t_i``.
    """
    return run_with_policy(lambda ch: _power_run(e, ch, strict), policy)


def _power_run(e: Election, chooser: Chooser, strict: bool) -> Outcome:
    rows = [(b, b.weight * m) for b, m in e.ballots]
    r = [Fraction(0)] * len(rows)
    elected: list[str] = []
    rounds: list[RoundRecord] = []
    warnings: list[str] = []
    times: list[Fraction] = []
    for rnd in range(1, e.seats + 1):
        votes: dict[str, Fraction] = {}
        spent: dict[str, Fraction] = {}
        backers: dict[str, list[int]] = {}
        for j, (b, v) in enumerate(rows):
            if v == 0:
                continue
            for c in b.active_group(elected):
                votes[c] = votes.get(c, 0) + v
                spent[c] = spent.get(c, 0) + v * r[j]
                backers.setdefault(c, []).append(j)
        if not votes:
            winner = _degenerate_pick(e, elected, chooser, rnd, strict)
            warnings.append(f"round {rnd}: all ballots exhausted, {winner} seated by tie policy")
            elected.append(winner)
            rounds.append(RoundRecord(rnd, {}, winner, tuple(r), ("degenerate fill",)))
            continue
        t = {c: (1 + spent[c]) / votes[c] for c in votes}
        winner = _argmax(t, chooser, rnd, minimize=True)
        for j in backers[winner]:
            r[j] = t[winner]
        elected.append(winner)
        times.append(t[winner])
        rounds.append(RoundRecord(rnd, t, winner, tuple(r)))
    return Outcome(
        "phragmen-power",
        tuple(elected),
        True,
        tuple(rounds),
        tuple(chooser.events),
        tuple(warnings),
        extra={"t": tuple(times), "loads": tuple(r)},
    )


@dataclass
class _Group:
    candidate: str
    rows: list[int]
    votes: Fraction
    place: Fraction


def phragmen_elect_grouped(
    e: Election,
    policy: TiePolicy = Lexicographic(),
    rounding: RoundingPolicy = RoundingPolicy.EXACT,
    *,
    strict: bool = False,
) -> Outcome:
    """Ordered count that keeps ballots in groups by their current top name.

    When a candidate is elected only the groups valid for that candidate are
    dissolved; their ballots form new groups whose place number is the group
    vote divided by the winning figure.  Groups valid for other candidates keep
    their place numbers.  Exact arithmetic gives the same result as
    :func:`phragmen_elect`; ``TRUNCATE_2DEC`` truncates every division.
    """
    e.require(Kind.ORDERED)
    return run_with_policy(lambda ch: _grouped_run(e, ch, rounding, strict), policy)


def _grouped_run(e: Election, chooser: Chooser, rounding: RoundingPolicy, strict: bool) -> Outcome:
    rows = [(b, b.weight * m) for b, m in e.ballots]
    elected: list[str] = []

    def regroup(indices: Iterable[int], figure: Fraction | None) -> list[_Group]:
        fresh: dict[str, list[int]] = {}
        for j in indices:
            top = rows[j][0].active_group(elected)
            if top and rows[j][1] > 0:
                fresh.setdefault(top[0], []).append(j)
        out = []
        for c in sorted(fresh):
            v = sum((rows[j][1] for j in fresh[c]), Fraction(0))
            place = Fraction(0) if figure is None else divide(v, figure, rounding)
            out.append(_Group(c, fresh[c], v, place))
        return out

    groups = regroup(range(len(rows)), None)
    rounds: list[RoundRecord] = []
    warnings: list[str] = []
    figures: list[Fraction] = []
    spent = Fraction(0)
    for rnd in range(1, e.seats + 1):
        votes: dict[str, Fraction] = {}
        places: dict[str, Fraction] = {}
        for g in groups:
            votes[g.candidate] = votes.get(g.candidate, 0) + g.votes
            places[g.candidate] = places.get(g.candidate, 0) + g.place
        if not votes:
            winner = _degenerate_pick(e, elected, chooser, rnd, strict)
            warnings.append(f"round {rnd}: all ballots exhausted, {winner} seated by tie policy")
            elected.append(winner)
            figures.append(Fraction(0))
            rounds.append(RoundRecord(rnd, {}, winner, (), ("degenerate fill",)))
            continue
        W = {c: divide(votes[c], 1 + places[c], rounding) for c in votes}
        winner = _argmax(W, chooser, rnd)
        best = W[winner]
        elected.append(winner)
        figures.append(best)
        dissolved = [g for g in groups if g.candidate == winner]
        kept = [g for g in groups if g.candidate != winner]
        moved = [j for g in dissolved for j in g.rows]
        new = regroup(moved, best)
        exhausted = sum((rows[j][1] for j in moved if not rows[j][0].active_group(elected)), Fraction(0))
        if exhausted:
            spent += divide(exhausted, best, rounding)
        groups = kept + new
        notes = tuple(
            f"group {g.candidate} rows {','.join(map(str, g.rows))}: votes {g.votes} place {g.place}" for g in groups
        )
        rounds.append(RoundRecord(rnd, W, winner, (), notes))
    return Outcome(
        "phragmen-grouped" if rounding is RoundingPolicy.EXACT else "phragmen-law2dec",
        tuple(elected),
        True,
        tuple(rounds),
        tuple(chooser.events),
        tuple(warnings),
        extra={"W": tuple(figures), "exhausted_place": spent},
    )


# --------------------------------------------------------------------------
# party version


def phragmen_party_elect(e: Election, seats: int | None = None, policy: TiePolicy = Lexicographic()) -> Allocation:
    """Party version: ballots name parties, and a party stays eligible after winning.

    Equivalent to running :func:`phragmen_elect` after replacing every party by
    ``seats`` interchangeable clone candidates.
    """
    e.require(Kind.UNORDERED)
    s = e.seats if seats is None else seats
    if s < 1:
        raise ValidationError("seats must be positive")

    def run(chooser: Chooser) -> Outcome:
        rows = e.types()
        q = [Fraction(0)] * len(rows)
        order: list[str] = []
        rounds = []
        for rnd in range(1, s + 1):
            votes: dict[str, Fraction] = {}
            places: dict[str, Fraction] = {}
            for j, (b, v) in enumerate(rows):
                for p in b.names:
                    votes[p] = votes.get(p, 0) + v
                    places[p] = places.get(p, 0) + q[j]
            if not votes:
                raise ValidationError("no party has any votes")
            W = {p: votes[p] / (1 + places[p]) for p in votes}
            winner = _argmax(W, chooser, rnd)
            for j, (b, v) in enumerate(rows):
                if winner in b.as_set:
                    q[j] = v / W[winner]
            order.append(winner)
            rounds.append(RoundRecord(rnd, W, winner, tuple(q)))
        return Outcome("phragmen-party", tuple(order), True, tuple(rounds), tuple(chooser.events))

    out = run_with_policy(run, policy)

    def to_alloc(o: Outcome) -> Allocation:
        seats_by = {p: 0 for p in e.candidates}
        seats_by.update(o.seat_counts())
        return Allocation(seats_by, o.elected)

    if not out.alternatives:
        return to_alloc(out)
    uniq: dict[tuple, Allocation] = {}
    for o in out.alternatives:
        a = to_alloc(o)
        uniq.setdefault(tuple(sorted(a.seats.items())), a)
    return Allocation(to_alloc(out).seats, out.elected, tuple(uniq.values()))


# --------------------------------------------------------------------------
# ranking rule and alliances


def ranking_rule(e: Election) -> list[str]:
    """Longest prefix that more than k/(k+1) of the weight puts first, in order."""
    e.require(Kind.ORDERED)
    total = e.total_weight
    prefix: list[str] = []
    k = 1
    while True:
        by_prefix: dict[tuple[str, ...], Fraction] = {}
        for b, v in e.types():
            names = b.names
            if len(names) >= k:
                by_prefix[names[:k]] = by_prefix.get(names[:k], 0) + v
        hit = [p for p, w in by_prefix.items() if w > Fraction(k, k + 1) * total]
        if not hit:
            return prefix
        prefix = list(hit[0])
        k += 1


def ranking_plus_thiele(e: Election, seats: int | None = None, f=None, policy: TiePolicy = Lexicographic()) -> Outcome:
    """Seats from :func:`ranking_rule` first, the rest by Thiele's addition method.

    The ballots are read as unordered sets for the second stage and the ranked
    winners count as already elected, so they reduce the weight of the
    ballots naming them.
    """
    from .thiele import PROPORTIONAL, thiele_addition

    e.require(Kind.ORDERED)
    s = e.seats if seats is None else seats
    ranked = ranking_rule(e)[:s]
    base = e.as_unordered().with_seats(s)
    out = thiele_addition(base, f or PROPORTIONAL, policy, pre_elected=ranked)
    return Outcome(
        "ranking+thiele",
        out.elected,
        True,
        out.rounds,
        out.ties,
        out.warnings,
        out.alternatives,
        {"ranked": tuple(ranked)},
    )


@dataclass(frozen=True)
class LabeledBallot:
    """An ordered ballot cast for a party, optionally inside a faction and an alliance."""

    names: tuple[str, ...]
    count: int
    party: str
    faction: str | None = None
    alliance: str | None = None
    weight: Fraction = Fraction(1)


def _full_list(rows: Sequence[tuple[Sequence[str], int, Fraction]], policy: TiePolicy) -> list[str]:
    e = election(Kind.ORDERED, 1, [(m, list(names), w) for names, m, w in rows if names])
    supported = {c for names, m, _ in rows if m > 0 for c in names}
    if not supported:
        return []
    out = phragmen_elect(e.with_seats(len(supported)), policy)
    return list(out.elected)


def recursive_alliance_elect(ballots: Sequence[LabeledBallot], policy: TiePolicy = Lexicographic()) -> dict[str, list[str]]:
    """Order candidates in three stages: factions, then parties, then alliances.

    Each stage runs :func:`phragmen_elect` to order every name that appears,
    then rewrites its ballots to the stage's resulting list.  Parties without an
    alliance label are reported under the party's own label.
    """
    rows = [(tuple(b.names), b.count, Fraction(b.weight), b) for b in ballots]
    faction_lists: dict[tuple[str, str], list[str]] = {}
    for key in sorted({(b.party, b.faction) for b in ballots if b.faction is not None}):
        part = [(n, m, w) for n, m, w, b in rows if (b.party, b.faction) == key]
        faction_lists[key] = _full_list(part, policy)
    stage1 = [
        (tuple(faction_lists[(b.party, b.faction)]) if b.faction is not None else n, m, w, b) for n, m, w, b in rows
    ]
    party_lists: dict[str, list[str]] = {}
    for party in sorted({b.party for b in ballots}):
        part = [(n, m, w) for n, m, w, b in stage1 if b.party == party]
        party_lists[party] = _full_list(part, policy)
    result: dict[str, list[str]] = {}
    for key in sorted({b.alliance or b.party for b in ballots}):
        part = [(tuple(party_lists[b.party]), m, w) for _, m, w, b in stage1 if (b.alliance or b.party) == key]
        result[key] = _full_list(part, policy)
    return result
