"""Reference methods used as comparators and oracles.

Divisor and largest-remainder apportionment for party votes, STV with
inclusive and weighted inclusive Gregory transfers, and the simple ballot
methods (approval, block, limited, SNTV, cumulative, scoring, bottoms-up).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .core import (
    Allocation,
    Chooser,
    Election,
    Kind,
    Lexicographic,
    Outcome,
    RoundRecord,
    TiePolicy,
    ValidationError,
    approval_tally,
    run_with_policy,
)
from .numeric import as_rational

__all__ = [
    "DHONDT",
    "SAINTE_LAGUE",
    "DivisorSequence",
    "QuotaSpec",
    "SimpleMethod",
    "TransferPolicy",
    "divisor_method",
    "modified_sainte_lague",
    "quota_method",
    "simple_elect",
    "stv_elect",
    "stv_quota_from_phragmen",
]


# --------------------------------------------------------------------------
# apportionment


@dataclass(frozen=True)
class DivisorSequence:
    """Divisors ``d_1, d_2, ...``; the n-th seat of a party is bid at ``votes / d_n``.

    ``first`` replaces ``d_1`` (modified Sainte-Laguë), ``start`` and ``step``
    define the arithmetic sequence ``start, start + step, ...``.
    """

    name: str
    start: Fraction = Fraction(1)
    step: Fraction = Fraction(1)
    first: Fraction | None = None

    def d(self, n: int) -> Fraction:
        if n == 1 and self.first is not None:
            return self.first
        return self.start + (n - 1) * self.step


DHONDT = DivisorSequence("dhondt", Fraction(1), Fraction(1))
SAINTE_LAGUE = DivisorSequence("sainte-lague", Fraction(1), Fraction(2))


def modified_sainte_lague(x: Fraction | str | int) -> DivisorSequence:
    x = as_rational(x)
    if x <= 0:
        raise ValidationError("first divisor must be positive")
    return DivisorSequence(f"msl:{x}", Fraction(1), Fraction(2), x)


def inverse_weight_divisors(weights) -> "CallableDivisors":
    """Divisors ``1/w_n`` for a satisfaction function with positive weights."""
    return CallableDivisors("1/w", lambda n: 1 / weights.w(n))


@dataclass(frozen=True)
class CallableDivisors:
    name: str
    fn: object = field(compare=False)

    def d(self, n: int) -> Fraction:
        return self.fn(n)  # type: ignore[operator]


def divisor_method(
    votes: Mapping[str, Fraction | int],
    seats: int,
    d: DivisorSequence | CallableDivisors = DHONDT,
    policy: TiePolicy = Lexicographic(),
) -> Allocation:
    """Award seats one at a time to the largest quotient ``v_p / d_(n_p + 1)``."""
    votes = {p: as_rational(v) for p, v in votes.items()}
    if not any(v > 0 for v in votes.values()):
        raise ValidationError("some party needs positive votes")

    def run(ch: Chooser) -> Outcome:
        won = {p: 0 for p in votes}
        order = []
        for rnd in range(1, seats + 1):
            quot = {p: v / d.d(won[p] + 1) for p, v in votes.items() if v > 0}
            best = max(quot.values())
            p = ch.pick(sorted(k for k, x in quot.items() if x == best), rnd)
            won[p] += 1
            order.append(p)
        return Outcome(d.name, tuple(order), True, (), tuple(ch.events))

    out = run_with_policy(run, policy)
    return _to_allocation(out, votes)


def _to_allocation(out: Outcome, parties) -> Allocation:
    def one(o: Outcome) -> Allocation:
        seats = {p: 0 for p in parties}
        seats.update(o.seat_counts())
        return Allocation(seats, o.elected, notes=tuple(f"tie in round {t.round}: {','.join(t.options)}" for t in o.ties))

    main = one(out)
    if not out.alternatives:
        return main
    uniq: dict[tuple, Allocation] = {}
    for o in out.alternatives:
        a = one(o)
        uniq.setdefault(tuple(sorted(a.seats.items())), a)
    return Allocation(main.seats, main.order, tuple(uniq.values()), main.notes)


@dataclass(frozen=True)
class QuotaSpec:
    """``base`` is ``hare`` (V/s) or ``droop`` (V/(s+1)); ``rounding`` is
    ``none``, ``floor``, ``ceil`` or ``nearest``."""

    base: str = "hare"
    rounding: str = "none"

    def __post_init__(self) -> None:
        if self.base not in {"hare", "droop"}:
            raise ValidationError(f"unknown quota base {self.base!r}")
        if self.rounding not in {"none", "floor", "ceil", "nearest"}:
            raise ValidationError(f"unknown quota rounding {self.rounding!r}")

    def value(self, total: Fraction, seats: int) -> Fraction:
        q = total / seats if self.base == "hare" else total / (seats + 1)
        if self.rounding == "floor":
            q = Fraction(math.floor(q))
        elif self.rounding == "ceil":
            q = Fraction(math.ceil(q))
        elif self.rounding == "nearest":
            q = Fraction(math.floor(q + Fraction(1, 2)))
        if q <= 0:
            raise ValidationError("quota must be positive")
        return q


def quota_method(
    votes: Mapping[str, Fraction | int],
    seats: int,
    q: QuotaSpec | Fraction = QuotaSpec(),
    policy: TiePolicy = Lexicographic(),
) -> Allocation:
    """Largest-remainder apportionment.

    Each party first gets ``floor(v / Q)`` seats.  Leftover seats go to the
    largest remainders.  If the floors already exceed the house size (possible
    with small quotas) seats are withdrawn one at a time from the party with
    the smallest remainder, whose remainder then grows by one, and a note is
    recorded.
    """
    votes = {p: as_rational(v) for p, v in votes.items()}
    total = sum(votes.values(), Fraction(0))
    if total <= 0:
        raise ValidationError("some party needs positive votes")
    Q = q.value(total, seats) if isinstance(q, QuotaSpec) else as_rational(q)

    def run(ch: Chooser) -> Outcome:
        won = {p: math.floor(v / Q) for p, v in votes.items()}
        rem = {p: v / Q - won[p] for p, v in votes.items()}
        order = [p for p in sorted(won) for _ in range(won[p])]
        extra = sum(won.values()) - seats
        rnd = 0
        notes = []
        while extra > 0:
            rnd += 1
            pool = {p: r for p, r in rem.items() if won[p] > 0}
            low = min(pool.values())
            p = ch.pick(sorted((k for k, r in pool.items() if r == low), reverse=True), rnd)
            won[p] -= 1
            order.remove(p)
            rem[p] += 1  # its claim on the withdrawn seat was a full quota more
            extra -= 1
            notes.append(f"over-award withdrawn from {p}")
        left = dict(rem)
        while sum(won.values()) < seats:
            rnd += 1
            best = max(left.values())
            p = ch.pick(sorted(k for k, r in left.items() if r == best), rnd)
            won[p] += 1
            order.append(p)
            del left[p]
            if not left:
                left = {k: v / Q - won[k] for k, v in votes.items()}
        return Outcome("quota", tuple(order), True, (), tuple(ch.events), tuple(notes))

    out = run_with_policy(run, policy)
    alloc = _to_allocation(out, votes)
    if out.warnings:
        return Allocation(alloc.seats, alloc.order, alloc.alternatives, alloc.notes + out.warnings)
    return alloc


# --------------------------------------------------------------------------
# STV


@dataclass(frozen=True)
class TransferPolicy:
    """``transfer`` is ``ig`` (inclusive Gregory) or ``wig`` (weighted
    inclusive Gregory); ``order`` is ``surplus`` (earliest count, then largest) or
    ``elect`` (one winner at a time, surplus moved at once)."""

    transfer: str = "ig"
    order: str = "surplus"

    def __post_init__(self) -> None:
        if self.transfer not in {"ig", "wig"} or self.order not in {"surplus", "elect"}:
            raise ValidationError(f"bad transfer policy {self}")


@dataclass
class _Parcel:
    row: int
    count: Fraction  # number of ballots (weighted)
    value: Fraction  # current value per ballot
    pos: int = 0


def stv_elect(
    e: Election,
    quota: QuotaSpec | Fraction | int | str = QuotaSpec("droop"),
    transfer: TransferPolicy = TransferPolicy(),
    policy: TiePolicy = Lexicographic(),
    *,
    priority: Sequence[str] = (),
) -> Outcome:
    """Single transferable vote with exact fractional transfers.

    Candidates reaching the quota are elected and their surpluses passed on.
    Inclusive Gregory gives every ballot held by the winner the value
    ``(v - Q) / N`` (``N`` ballots, total ``v``); weighted inclusive Gregory
    multiplies each ballot's value by ``(v - Q) / v``.  When nobody reaches
    the quota the lowest candidate is eliminated and its ballots move on at
    their current value.  When the hopefuls are no more than the open seats
    they are all elected.  Exhausted ballots leave the count.

    In ``elect`` order the single candidate elected next is the one earliest
    in ``priority`` among those at or above quota, else the highest tally;
    the final fill follows ``priority`` too.  In ``surplus`` order surpluses
    move in order of election, largest first within one count.
    """
    e.require(Kind.ORDERED)
    if isinstance(quota, QuotaSpec):
        Q = quota.value(e.total_weight, e.seats)
    else:
        Q = as_rational(quota)
    if Q <= 0:
        raise ValidationError("quota must be positive")
    rank = {c: i for i, c in enumerate(priority)}

    def run(ch: Chooser) -> Outcome:
        lists = [b.names for b, _ in e.ballots]
        piles: dict[str, list[_Parcel]] = {c: [] for c in e.candidates}
        hopeful = set(e.candidates)
        elected: list[str] = []
        pending: list[str] = []  # elected, surplus not yet transferred
        wave: dict[str, int] = {}  # count in which each candidate was elected
        eliminated: list[str] = []
        rounds: list[RoundRecord] = []
        surpluses: dict[str, Fraction] = {}
        exhausted = Fraction(0)

        def place(p: _Parcel) -> None:
            nonlocal exhausted
            names = lists[p.row]
            while p.pos < len(names) and names[p.pos] not in hopeful:
                p.pos += 1
            if p.pos < len(names):
                piles[names[p.pos]].append(p)
            else:
                exhausted += p.count * p.value

        for j, (b, m) in enumerate(e.ballots):
            if m > 0:
                place(_Parcel(j, b.weight * m, Fraction(1)))

        def tally(c: str) -> Fraction:
            return sum((p.count * p.value for p in piles[c]), Fraction(0))

        def elect(c: str, rnd: int, scores: dict) -> None:
            hopeful.discard(c)
            elected.append(c)
            pending.append(c)
            wave[c] = rnd
            rounds.append(RoundRecord(rnd, scores, c))

        def transfer_surplus(c: str) -> None:
            parcels = piles[c]
            piles[c] = []
            v = sum((p.count * p.value for p in parcels), Fraction(0))
            n = sum((p.count for p in parcels), Fraction(0))
            surplus = v - Q
            surpluses[c] = surplus
            if surplus <= 0 or not parcels:
                return
            for p in parcels:
                if transfer.transfer == "ig":
                    p.value = surplus / n
                else:
                    p.value = p.value * surplus / v
                p.pos += 1
                place(p)

        rnd = 0
        while len(elected) < e.seats:
            rnd += 1
            open_seats = e.seats - len(elected)
            scores = {c: tally(c) for c in sorted(hopeful)}
            if len(hopeful) <= open_seats:
                first = rank if transfer.order == "elect" else {}
                for c in sorted(hopeful, key=lambda c: (first.get(c, len(first)), -scores[c], c)):
                    elect(c, rnd, scores)
                break
            reached = [c for c in scores if scores[c] >= Q]
            if reached:
                if transfer.order == "elect":
                    if rank:
                        top = min(rank.get(c, len(rank)) for c in reached)
                        cands = [c for c in reached if rank.get(c, len(rank)) == top]
                        if top == len(rank):
                            hi = max(scores[c] for c in cands)
                            cands = [c for c in cands if scores[c] == hi]
                    else:
                        hi = max(scores[c] for c in reached)
                        cands = [c for c in reached if scores[c] == hi]
                    c = ch.pick(sorted(cands), rnd)
                    elect(c, rnd, scores)
                    pending.remove(c)
                    if len(elected) < e.seats:
                        transfer_surplus(c)
                    else:
                        surpluses[c] = scores[c] - Q
                else:
                    for c in sorted(reached, key=lambda c: (-scores[c], c))[:open_seats]:
                        elect(c, rnd, scores)
                    if len(elected) < e.seats:
                        _flush_largest(pending, wave, tally, transfer_surplus, ch, rnd)
                    else:
                        for c in pending:
                            surpluses[c] = tally(c) - Q
                continue
            if pending:
                _flush_largest(pending, wave, tally, transfer_surplus, ch, rnd)
                continue
            low = min(scores.values())
            loser = ch.pick(sorted(c for c in scores if scores[c] == low), rnd)
            hopeful.discard(loser)
            eliminated.append(loser)
            rounds.append(RoundRecord(rnd, scores, loser, action="eliminate"))
            for p in piles.pop(loser):
                p.pos += 1
                place(p)
            piles[loser] = []
        final_surplus = surpluses.get(elected[-1]) if elected else None
        return Outcome(
            f"stv[{transfer.transfer},{transfer.order}]",
            tuple(elected),
            True,
            tuple(rounds),
            tuple(ch.events),
            extra={
                "quota": Q,
                "eliminated": tuple(eliminated),
                "surpluses": dict(surpluses),
                "final_surplus": final_surplus,
                "exhausted": exhausted,
            },
        )

    return run_with_policy(run, policy)


def _flush_largest(pending: list[str], wave: dict[str, int], tally, transfer_surplus, ch: Chooser, rnd: int) -> None:
    """Transfer one pending surplus: earliest election count first, largest within it."""
    first = min(wave[c] for c in pending)
    sizes = {c: tally(c) for c in pending if wave[c] == first}
    hi = max(sizes.values())
    c = ch.pick(sorted(k for k in sizes if sizes[k] == hi), rnd)
    pending.remove(c)
    transfer_surplus(c)


def stv_quota_from_phragmen(e: Election) -> tuple[Fraction, tuple[str, ...]]:
    """Quota equal to Phragmén's last winning comparison figure, and the Phragmén order."""
    from .phragmen import phragmen_elect

    e.require(Kind.ORDERED)
    out = phragmen_elect(e, strict=True)
    return out.extra["W"][-1], out.elected


# --------------------------------------------------------------------------
# simple methods


@dataclass(frozen=True)
class SimpleMethod:
    """``name`` in approval, block, limited, sntv, cumulative, scoring, bottomsup.

    ``limit`` is the name cap for block (default: seats) and limited;
    ``points`` are the scoring points for positions 1, 2, ...
    """

    name: str
    limit: int | None = None
    points: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        names = {"approval", "block", "limited", "sntv", "cumulative", "scoring", "bottomsup"}
        if self.name not in names:
            raise ValidationError(f"unknown simple method {self.name!r}")
        if self.name == "limited" and (self.limit is None or self.limit < 1):
            raise ValidationError("limited vote needs a positive name limit")
        if self.name == "scoring":
            if not self.points:
                raise ValidationError("scoring needs points")
            object.__setattr__(self, "points", tuple(as_rational(p) for p in self.points))


def simple_elect(e: Election, method: SimpleMethod, policy: TiePolicy = Lexicographic()) -> Outcome:
    """Tally by the chosen rule and elect the top ``e.seats`` (bottoms-up eliminates instead)."""
    s = e.seats
    name = method.name
    if name in {"approval", "block", "limited", "cumulative"}:
        e.require(Kind.UNORDERED)
    elif name in {"sntv", "scoring", "bottomsup"}:
        if e.kind is not Kind.ORDERED and any(len(b.names) > 1 for b, _ in e.ballots):
            raise ValidationError(f"{name} needs ordered or single-name ballots")
    if name in {"block", "limited", "sntv"}:
        cap = {"block": method.limit or s, "limited": method.limit, "sntv": 1}[name]
        bad = [b.label() for b, m in e.ballots if m > 0 and len(b.names) > cap]
        if bad and name != "sntv":
            raise ValidationError(f"{name} ballots may name at most {cap} candidates: {'; '.join(bad)}")

    if name == "bottomsup":
        return _bottoms_up(e, policy)

    tally = {c: Fraction(0) for c in e.candidates}
    for b, v in e.types():
        names = b.names
        if name in {"approval", "block", "limited"}:
            for c in names:
                tally[c] += v
        elif name == "cumulative":
            for c in names:
                tally[c] += v / len(names)
        elif name == "sntv":
            tally[names[0]] += v
        else:
            for k, c in enumerate(names):
                if k < len(method.points):
                    tally[c] += v * method.points[k]

    def run(ch: Chooser) -> Outcome:
        left = dict(tally)
        elected = []
        for rnd in range(1, s + 1):
            best = max(left.values())
            c = ch.pick(sorted(k for k, x in left.items() if x == best), rnd)
            elected.append(c)
            del left[c]
        return Outcome(name, tuple(elected), True, (RoundRecord(1, tally, None),), tuple(ch.events))

    return run_with_policy(run, policy)


def _bottoms_up(e: Election, policy: TiePolicy) -> Outcome:
    def run(ch: Chooser) -> Outcome:
        alive = set(e.candidates)
        rounds = []
        rnd = 0
        while len(alive) > e.seats:
            rnd += 1
            tally = {c: Fraction(0) for c in alive}
            for b, v in e.types():
                for c in b.names:
                    if c in alive:
                        tally[c] += v
                        break
            low = min(tally.values())
            loser = ch.pick(sorted((c for c in tally if tally[c] == low), reverse=True), rnd)
            alive.discard(loser)
            rounds.append(RoundRecord(rnd, tally, loser, action="eliminate"))
        return Outcome("bottomsup", tuple(sorted(alive)), False, tuple(rounds), tuple(ch.events))

    return run_with_policy(run, policy)
