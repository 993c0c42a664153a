"""Quota and load-balancing relatives of Phragmén's method.

* :func:`enestrom_elect` uses a fixed quota and scales down the ballots of
  each winner (weighted inclusive Gregory transfers on unordered ballots).
* :func:`opt_load_elect` covers the eight ways of combining equal or free
  splitting of each winner's unit load, least-squares or max-load
  inequality, and global or sequential optimization.
* :func:`limit_method_elect` is the count that Phragmén's method approaches
  when very many full ballots are added.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .core import (
    BudgetExceeded,
    Chooser,
    Election,
    Kind,
    Lexicographic,
    Outcome,
    RoundRecord,
    TiePolicy,
    ValidationError,
    run_with_policy,
)
from .numeric import RoundingPolicy, as_rational, divide, truncate_2dec
from .thiele import DEFAULT_BUDGET, clone_classes, count_vectors, select_committee

__all__ = [
    "OptCombo",
    "enestrom_elect",
    "equal_split_loads",
    "free_split_loads",
    "limit_method_elect",
    "max_load_ratio",
    "opt_load_elect",
    "parse_combo",
    "water_fill",
]

QuotaArg = Union[str, Fraction, int]


def _quota(total: Fraction, seats: int, quota: QuotaArg) -> Fraction:
    if quota == "hare":
        return total / seats
    if quota == "droop":
        return total / (seats + 1)
    if isinstance(quota, str):
        raise ValidationError(f"unknown quota {quota!r}")
    q = as_rational(quota)
    if q <= 0:
        raise ValidationError("quota must be positive")
    return q


def enestrom_elect(
    e: Election,
    quota: QuotaArg = "hare",
    rounding: RoundingPolicy = RoundingPolicy.EXACT,
    policy: TiePolicy = Lexicographic(),
) -> Outcome:
    """Fixed-quota count on unordered ballots.

    Every ballot starts with voting power 1 and counts its current power for
    each unelected name on it.  The candidate with the largest total ``v`` is
    elected; if ``v`` exceeds the quota its ballots are scaled by
    ``(v - Q) / v``, otherwise they drop to zero.  ``quota`` is ``"hare"``,
    ``"droop"`` or an explicit rational.
    """
    e.require(Kind.UNORDERED)

    def run(ch: Chooser) -> Outcome:
        rows = [(b, b.weight * m) for b, m in e.ballots]
        Q = _quota(e.total_weight, e.seats, quota)
        if rounding is RoundingPolicy.TRUNCATE_2DEC:
            Q = truncate_2dec(Q)
        power = [Fraction(1)] * len(rows)
        elected: list[str] = []
        rounds = []
        factors = []
        totals = [sum((v * p for (_, v), p in zip(rows, power)), Fraction(0))]
        warnings = []
        for rnd in range(1, e.seats + 1):
            done = set(elected)
            scores = {c: Fraction(0) for c in e.candidates if c not in done}
            for (b, v), p in zip(rows, power):
                for c in b.names:
                    if c not in done:
                        scores[c] += v * p
            best = max(scores.values())
            if best == 0:
                warnings.append(f"round {rnd}: no voting power left; seat filled by tie policy")
            winner = ch.pick(sorted(c for c, x in scores.items() if x == best), rnd)
            if best > Q:
                factor = divide(best - Q, best, rounding)
            else:
                factor = Fraction(0)
            for j, (b, _) in enumerate(rows):
                if winner in b.as_set:
                    power[j] = power[j] * factor
                    if rounding is RoundingPolicy.TRUNCATE_2DEC:
                        power[j] = truncate_2dec(power[j])
            elected.append(winner)
            factors.append(factor)
            totals.append(sum((v * p for (_, v), p in zip(rows, power)), Fraction(0)))
            rounds.append(RoundRecord(rnd, scores, winner, tuple(power)))
        return Outcome(
            "enestrom",
            tuple(elected),
            True,
            tuple(rounds),
            tuple(ch.events),
            tuple(warnings),
            extra={"quota": Q, "factors": tuple(factors), "total_power": tuple(totals)},
        )

    return run_with_policy(run, policy)


# --------------------------------------------------------------------------
# load optimization


@dataclass(frozen=True)
class OptCombo:
    """``split`` is a1 (equal) or a2 (free); ``criterion`` b1 (least squares) or
    b2 (max load); ``mode`` c1 (global) or c2 (sequential)."""

    split: str
    criterion: str
    mode: str

    def __post_init__(self) -> None:
        if self.split not in {"a1", "a2"} or self.criterion not in {"b1", "b2"} or self.mode not in {"c1", "c2"}:
            raise ValidationError(f"bad combo {self}")

    def __str__(self) -> str:
        return f"{self.split},{self.criterion},{self.mode}"

    @classmethod
    def all(cls) -> list["OptCombo"]:
        return [cls(a, b, c) for a in ("a1", "a2") for b in ("b1", "b2") for c in ("c1", "c2")]


def parse_combo(text: str) -> OptCombo:
    parts = [p.strip() for p in text.replace("/", ",").split(",") if p.strip()]
    if len(parts) == 1 and len(parts[0]) == 6:
        parts = [parts[0][0:2], parts[0][2:4], parts[0][4:6]]
    if len(parts) != 3:
        raise ValidationError(f"bad combo {text!r}; expected e.g. a2,b2,c2")
    return OptCombo(*parts)


Rows = Sequence[tuple[frozenset, Fraction]]


def equal_split_loads(rows: Rows, S: Sequence[str]) -> list[Fraction] | None:
    """Per-voter loads when each winner's unit is shared equally by its voters.

    Returns ``None`` if some member of ``S`` has no voters.
    """
    x = [Fraction(0)] * len(rows)
    for c in S:
        vc = sum((v for names, v in rows if c in names), Fraction(0))
        if vc == 0:
            return None
        for j, (names, _) in enumerate(rows):
            if c in names:
                x[j] += 1 / vc
    return x


def _neighbourhood(rows: Rows, T: Sequence[str], alive: Sequence[bool]) -> tuple[list[int], Fraction]:
    idx = [j for j, (names, v) in enumerate(rows) if alive[j] and v > 0 and not names.isdisjoint(T)]
    return idx, sum((rows[j][1] for j in idx), Fraction(0))


def max_load_ratio(rows: Rows, S: Sequence[str]) -> tuple[Fraction | None, tuple[str, ...]]:
    """Smallest achievable maximum load for committee ``S`` with free splitting.

    Equals the largest ``|T| / V(N(T))`` over nonempty ``T`` within ``S``, where
    ``N(T)`` is the set of voters naming someone in ``T``.  Returns
    ``(None, T)`` when some ``T`` has no voters at all.
    """
    alive = [True] * len(rows)
    return _densest(rows, list(S), alive)


def _densest(rows: Rows, S: list[str], alive: list[bool]) -> tuple[Fraction | None, tuple[str, ...]]:
    best: Fraction | None = Fraction(-1)
    best_sets: list[tuple[str, ...]] = []
    for r in range(1, len(S) + 1):
        for T in itertools.combinations(S, r):
            _, vol = _neighbourhood(rows, T, alive)
            if vol == 0:
                return None, T
            ratio = Fraction(len(T)) / vol
            if best is None or ratio > best:
                best, best_sets = ratio, [T]
            elif ratio == best:
                best_sets.append(T)
    union = tuple(sorted(set().union(*best_sets)))
    return best, union


def free_split_loads(rows: Rows, S: Sequence[str]) -> list[Fraction] | None:
    """Per-voter loads of the balanced free split for committee ``S``.

    Peels off the densest group of winners: the voters who can support them
    all carry the same load ``|T*| / V(N(T*))``, and the rest is solved
    recursively without those voters.  The result minimizes every symmetric
    convex measure of the loads at once, in particular both the sum of squares
    and the maximum.
    """
    x = [Fraction(0)] * len(rows)
    alive = [True] * len(rows)
    left = sorted(S)
    while left:
        ratio, T = _densest(rows, left, alive)
        if ratio is None:
            return None
        idx, _ = _neighbourhood(rows, T, alive)
        for j in idx:
            x[j] = ratio
            alive[j] = False
        left = [c for c in left if c not in T]
    return x


def water_fill(rows: Rows, loads: Sequence[Fraction], c: str) -> tuple[Fraction, list[Fraction], bool]:
    """Spread one unit over the voters of ``c`` by raising the lowest loads first.

    Returns the water level ``L``, the new loads and whether some voter of
    ``c`` already sat above ``L`` (and therefore receives nothing).
    """
    members = sorted((loads[j], j) for j, (names, v) in enumerate(rows) if c in names and v > 0)
    if not members:
        raise ValidationError(f"{c} has no voters")
    vol = Fraction(0)
    mass = Fraction(0)
    level = Fraction(0)
    used = 0
    for k, (x, j) in enumerate(members):
        vol += rows[j][1]
        mass += rows[j][1] * x
        level = (1 + mass) / vol
        used = k + 1
        if k + 1 == len(members) or level <= members[k + 1][0]:
            break
    new = list(loads)
    for x, j in members[:used]:
        new[j] = level
    return level, new, used < len(members)


def _inequality(rows: Rows, x: Sequence[Fraction], criterion: str) -> Fraction:
    if criterion == "b1":
        return sum((v * xi * xi for (_, v), xi in zip(rows, x)), Fraction(0))
    return max((xi for (_, v), xi in zip(rows, x) if v > 0), default=Fraction(0))


def opt_load_elect(
    e: Election,
    combo: OptCombo,
    policy: TiePolicy = Lexicographic(),
    *,
    budget: int = DEFAULT_BUDGET,
    allow_decrease: bool = False,
) -> Outcome:
    """Elect by minimizing the inequality of voter loads.

    Each winner carries one unit of load shared by its voters.  Global mode
    (c1) picks the committee whose best load vector is most equal; ties go
    to the lexicographically smallest committee, or all of them under
    EnumerateAll.  Sequential mode (c2) adds one winner per round while the
    earlier loads stay fixed.  With ``allow_decrease`` the sequential free
    split re-balances all loads of the tentative committee instead.
    """
    e.require(Kind.UNORDERED)
    rows: list[tuple[frozenset, Fraction]] = [(b.as_set, b.weight * m) for b, m in e.ballots]
    loads_of = equal_split_loads if combo.split == "a1" else free_split_loads
    name = f"opt-load[{combo}]"
    if combo.mode == "c1":
        classes = clone_classes(e)
        need = count_vectors([len(cl) for cl in classes], e.seats)
        if need > budget:
            raise BudgetExceeded(need, budget, "class-count vectors")
        best: Fraction | None = None
        optima: list[tuple[int, ...]] = []
        for cv in _vectors([len(cl) for cl in classes], e.seats):
            S = [c for cl, k in zip(classes, cv) for c in cl[:k]]
            x = loads_of(rows, S)
            if x is None:
                continue
            score = _inequality(rows, x, combo.criterion)
            if best is None or score < best:
                best, optima = score, [cv]
            elif score == best:
                optima.append(cv)
        if best is None:
            raise ValidationError("no committee has voters for every member")
        out = select_committee(classes, optima, policy, name, "inequality", best, {"combo": str(combo)})
        final = loads_of(rows, out.elected)
        return Outcome(out.method, out.elected, False, (), out.ties, (), out.alternatives, {**out.extra, "loads": tuple(final or ())})

    def run(ch: Chooser) -> Outcome:
        x = [Fraction(0)] * len(rows)
        elected: list[str] = []
        rounds = []
        warnings = []
        for rnd in range(1, e.seats + 1):
            scores: dict[str, Fraction] = {}
            trial: dict[str, list[Fraction]] = {}
            notes = []
            for c in e.candidates:
                if c in elected or not any(c in names and v > 0 for names, v in rows):
                    continue
                if combo.split == "a1":
                    vc = sum((v for names, v in rows if c in names), Fraction(0))
                    new = [xi + (1 / vc if c in names else 0) for (names, _), xi in zip(rows, x)]
                elif allow_decrease:
                    new = free_split_loads(rows, elected + [c])
                    assert new is not None
                    if any(n < o for n, o in zip(new, x)):
                        notes.append(f"{c}: re-balancing lowers an earlier load")
                else:
                    level, new, above = water_fill(rows, x, c)
                    if above and combo.criterion == "b1":
                        notes.append(f"{c}: a voter already above level {level} gets no share")
                trial[c] = new
                scores[c] = _inequality(rows, new, combo.criterion)
            if not scores:
                winner = ch.pick(sorted(c for c in e.candidates if c not in elected), rnd)
                warnings.append(f"round {rnd}: no supported candidate left; {winner} seated by tie policy")
                elected.append(winner)
                rounds.append(RoundRecord(rnd, {}, winner, tuple(x), ("degenerate fill",)))
                continue
            low = min(scores.values())
            winner = ch.pick(sorted(c for c, s in scores.items() if s == low), rnd)
            x = trial[winner]
            elected.append(winner)
            rounds.append(RoundRecord(rnd, scores, winner, tuple(x), tuple(n for n in notes if n.startswith(winner + ":"))))
        return Outcome(name, tuple(elected), True, tuple(rounds), tuple(ch.events), tuple(warnings), extra={"loads": tuple(x)})

    return run_with_policy(run, policy)


def _vectors(sizes: Sequence[int], total: int):
    if not sizes:
        if total == 0:
            yield ()
        return
    rest = sum(sizes[1:])
    for k in range(min(sizes[0], total), max(0, total - rest) - 1, -1):
        for tail in _vectors(sizes[1:], total - k):
            yield (k,) + tail


def limit_method_elect(e: Election, policy: TiePolicy = Lexicographic()) -> Outcome:
    """Sequential count where a ballot's weight grows by one copy per round.

    In round ``k`` a ballot counts ``v * (k - l)`` for each unelected name on
    it, where ``l`` is the last round in which one of its names was elected
    (0 if none).
    """
    e.require(Kind.UNORDERED)

    def run(ch: Chooser) -> Outcome:
        rows = e.types()
        last = [0] * len(rows)
        elected: list[str] = []
        rounds = []
        warnings = []
        for k in range(1, e.seats + 1):
            done = set(elected)
            scores = {c: Fraction(0) for c in e.candidates if c not in done}
            for j, (b, v) in enumerate(rows):
                for c in b.names:
                    if c not in done:
                        scores[c] += v * (k - last[j])
            best = max(scores.values())
            if best == 0:
                warnings.append(f"round {k}: all counts are zero; seat filled by tie policy")
            winner = ch.pick(sorted(c for c, x in scores.items() if x == best), k)
            for j, (b, _) in enumerate(rows):
                if winner in b.as_set:
                    last[j] = k
            elected.append(winner)
            rounds.append(RoundRecord(k, scores, winner))
        return Outcome("limit", tuple(elected), True, tuple(rounds), tuple(ch.events), tuple(warnings))

    return run_with_policy(run, policy)
