"""Thiele's methods: optimization, addition, elimination and the ordered method.

A voter with ``n`` elected names on the ballot has satisfaction
``f(n) = w_1 + ... + w_n``.  The optimization method maximizes total
satisfaction, addition is its greedy version and elimination its reverse
greedy version.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .core import (
    BudgetExceeded,
    Chooser,
    Election,
    EnumerateAll,
    EnumerationOverflow,
    Kind,
    Lexicographic,
    Outcome,
    RoundRecord,
    Seeded,
    TieEvent,
    TiePolicy,
    ValidationError,
    approval_tally,
    break_tie,
    run_with_policy,
)
from .numeric import DomainError, as_rational

__all__ = [
    "PROPORTIONAL",
    "STRONG",
    "WEAK",
    "DEFAULT_BUDGET",
    "SatisfactionFunction",
    "clone_classes",
    "parse_satisfaction",
    "satisfaction",
    "thiele_addition",
    "thiele_elimination",
    "thiele_opt",
    "thiele_ordered",
]

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class SatisfactionFunction:
    """Increment weights ``w_n`` with ``w_1 = 1``.

    ``name`` is one of ``prop``, ``strong``, ``weak`` or ``custom``.  Custom
    functions list ``w_1..w_k``; beyond ``k`` the weight is 0, or the last
    listed weight when ``repeat_last`` is set.
    """

    name: str
    custom: tuple[Fraction, ...] = ()
    repeat_last: bool = False

    def __post_init__(self) -> None:
        if self.name not in {"prop", "strong", "weak", "custom"}:
            raise ValidationError(f"unknown satisfaction function {self.name!r}")
        if self.name == "custom":
            ws = tuple(as_rational(w) for w in self.custom)
            object.__setattr__(self, "custom", ws)
            if not ws or ws[0] != 1:
                raise ValidationError("custom satisfaction weights must start with w1 = 1")
            if any(w < 0 for w in ws):
                raise ValidationError("satisfaction weights must be nonnegative")

    def w(self, n: int) -> Fraction:
        if n < 1:
            raise DomainError("weights are indexed from 1")
        if self.name == "prop":
            return Fraction(1, n)
        if self.name == "strong":
            return Fraction(1)
        if self.name == "weak":
            return Fraction(1 if n == 1 else 0)
        if n <= len(self.custom):
            return self.custom[n - 1]
        return self.custom[-1] if self.repeat_last else Fraction(0)

    def f(self, n: int) -> Fraction:
        return sum((self.w(k) for k in range(1, n + 1)), Fraction(0))

    def nonincreasing_upto(self, n: int) -> bool:
        return all(self.w(k + 1) <= self.w(k) for k in range(1, n))

    def __str__(self) -> str:
        if self.name != "custom":
            return self.name
        body = ",".join(str(w) for w in self.custom)
        return f"custom:{body}" + (",repeat-last" if self.repeat_last else "")


PROPORTIONAL = SatisfactionFunction("prop")
STRONG = SatisfactionFunction("strong")
WEAK = SatisfactionFunction("weak")


def parse_satisfaction(text: str) -> SatisfactionFunction:
    """Parse ``prop``, ``strong``, ``weak`` or ``custom:w1,w2,...[,repeat-last]``."""
    if text in {"prop", "strong", "weak"}:
        return SatisfactionFunction(text)
    kind, _, body = text.partition(":")
    if kind != "custom" or not body:
        raise ValidationError(f"bad satisfaction function {text!r}")
    parts = [p.strip() for p in body.split(",") if p.strip()]
    repeat = bool(parts) and parts[-1] == "repeat-last"
    if repeat:
        parts = parts[:-1]
    try:
        return SatisfactionFunction("custom", tuple(as_rational(p) for p in parts), repeat)
    except DomainError as exc:
        raise ValidationError(str(exc)) from None


def satisfaction(S: Iterable[str], e: Election, f: SatisfactionFunction = PROPORTIONAL) -> Fraction:
    S = set(S)
    return sum((v * f.f(len(b.as_set & S)) for b, v in e.types()), Fraction(0))


# --------------------------------------------------------------------------
# optimization


def clone_classes(e: Election) -> list[tuple[str, ...]]:
    """Candidates grouped by the exact set of ballot types naming them."""
    sig: dict[frozenset[int], list[str]] = {}
    types = e.types()
    for c in e.candidates:
        key = frozenset(j for j, (b, _) in enumerate(types) if c in b.as_set)
        sig.setdefault(key, []).append(c)
    return sorted((tuple(sorted(v)) for v in sig.values()), key=lambda t: t[0])


def count_vectors(sizes: Sequence[int], total: int) -> int:
    """Number of ways to pick ``total`` items as per-class counts."""
    ways = [1] + [0] * total
    for n in sizes:
        nxt = [0] * (total + 1)
        for t, w in enumerate(ways):
            if w:
                for c in range(0, min(n, total - t) + 1):
                    nxt[t + c] += w
        ways = nxt
    return ways[total]


def _expand(classes: Sequence[tuple[str, ...]], counts: Sequence[int]) -> Iterator[tuple[str, ...]]:
    pools = [itertools.combinations(cls, k) for cls, k in zip(classes, counts)]
    for parts in itertools.product(*pools):
        yield tuple(sorted(c for p in parts for c in p))


def _representative(classes: Sequence[tuple[str, ...]], counts: Sequence[int]) -> tuple[str, ...]:
    return tuple(sorted(c for cls, k in zip(classes, counts) for c in cls[:k]))


def select_committee(
    classes: Sequence[tuple[str, ...]],
    optima: Sequence[tuple[int, ...]],
    policy: TiePolicy,
    method: str,
    score_name: str,
    best: Fraction,
    extra: dict,
) -> Outcome:
    """Turn the optimal class-count vectors of a set-valued search into an Outcome."""
    reps = sorted(_representative(classes, cv) for cv in optima)
    if isinstance(policy, Lexicographic):
        chosen = reps[0]
        alts: tuple[Outcome, ...] = ()
        n_opt = sum(math.prod(math.comb(len(cl), k) for cl, k in zip(classes, cv)) for cv in optima)
    else:
        every: list[tuple[str, ...]] = []
        for cv in optima:
            for S in _expand(classes, cv):
                every.append(S)
                if isinstance(policy, EnumerateAll) and len(every) > policy.limit:
                    partial = [Outcome(method, s_, False) for s_ in sorted(every)]
                    raise EnumerationOverflow(policy.limit, partial)
        every.sort()
        n_opt = len(every)
        if isinstance(policy, Seeded):
            keys = [",".join(S) for S in every]
            chosen = every[keys.index(break_tie(policy, keys, 0))]
            alts = ()
        else:
            chosen = every[0]
            alts = tuple(Outcome(method, S, False) for S in every) if len(every) > 1 else ()
    ties: tuple[TieEvent, ...] = ()
    if n_opt > 1:
        ties = (TieEvent(0, tuple(",".join(S) for S in reps), ",".join(chosen)),)
    extra = dict(extra)
    extra.update({score_name: best, "optimal_sets": n_opt})
    return Outcome(method, chosen, False, (), ties, (), alts, extra)


def thiele_opt(
    e: Election,
    f: SatisfactionFunction = PROPORTIONAL,
    policy: TiePolicy = Lexicographic(),
    *,
    budget: int = DEFAULT_BUDGET,
) -> Outcome:
    """Committee of ``e.seats`` candidates with the largest total satisfaction.

    Interchangeable candidates (named on exactly the same ballots) are merged
    into classes and the search runs over how many members of each class to
    take, with a branch-and-bound prune.  ``budget`` caps the number of class
    count vectors.  Among co-optimal committees the lexicographically smallest
    sorted id tuple is returned; EnumerateAll lists them all.
    """
    e.require(Kind.UNORDERED)
    s = e.seats
    types = e.types()
    tally = approval_tally(e)
    classes = clone_classes(e)
    classes.sort(key=lambda cl: (-tally[cl[0]], cl[0]))
    need = count_vectors([len(cl) for cl in classes], s)
    if need > budget:
        raise BudgetExceeded(need, budget, "class-count vectors")
    members = [[j for j, (b, _) in enumerate(types) if cl[0] in b.as_set] for cl in classes]
    weights = [v for _, v in types]
    wmax = max((f.w(n) for n in range(1, s + 1)), default=Fraction(0))
    submodular = f.nonincreasing_upto(s)
    cap = [len(cl) for cl in classes]
    suffix_cap = [sum(cap[i:]) for i in range(len(cap) + 1)]

    best_val: Fraction | None = None
    optima: list[tuple[int, ...]] = []
    counts = [0] * len(classes)
    hits = [0] * len(types)

    def bound(i: int, left: int, value: Fraction) -> Fraction:
        gains: list[Fraction] = []
        for k in range(i, len(classes)):
            if submodular:
                g = sum((weights[j] * f.w(hits[j] + 1) for j in members[k]), Fraction(0))
            else:
                g = sum((weights[j] for j in members[k]), Fraction(0)) * wmax
            gains.extend([g] * min(cap[k], left))
        gains.sort(reverse=True)
        return value + sum(gains[:left], Fraction(0))

    def visit(i: int, left: int, value: Fraction) -> None:
        nonlocal best_val, optima
        if left == 0:
            if best_val is None or value > best_val:
                best_val, optima = value, [tuple(counts)]
            elif value == best_val:
                optima.append(tuple(counts))
            return
        if i == len(classes) or suffix_cap[i] < left:
            return
        if best_val is not None and bound(i, left, value) < best_val:
            return
        for k in range(min(cap[i], left), -1, -1):
            gain = Fraction(0)
            for j in members[i]:
                gain += weights[j] * (f.f(hits[j] + k) - f.f(hits[j]))
            for j in members[i]:
                hits[j] += k
            counts[i] = k
            visit(i + 1, left - k, value + gain)
            for j in members[i]:
                hits[j] -= k
            counts[i] = 0

    visit(0, s, Fraction(0))
    assert best_val is not None
    return select_committee(classes, optima, policy, "thiele-opt", "satisfaction", best_val, {"f": str(f)})


# --------------------------------------------------------------------------
# sequential methods


def thiele_addition(
    e: Election,
    f: SatisfactionFunction = PROPORTIONAL,
    policy: TiePolicy = Lexicographic(),
    *,
    pre_elected: Sequence[str] = (),
) -> Outcome:
    """Elect one candidate per round by the largest marginal satisfaction.

    A ballot with ``k`` elected names adds ``v * w_(k+1)`` to each unelected
    name on it.  ``pre_elected`` seeds the count with candidates that already
    hold seats; they are part of the returned sequence.
    """
    e.require(Kind.UNORDERED)

    def run(ch: Chooser) -> Outcome:
        types = e.types()
        elected = list(pre_elected)
        rounds = []
        warnings = []
        for rnd in range(len(elected) + 1, e.seats + 1):
            done = set(elected)
            scores = {c: Fraction(0) for c in e.candidates if c not in done}
            for b, v in types:
                k = len(b.as_set & done)
                inc = v * f.w(k + 1)
                for c in b.names:
                    if c not in done:
                        scores[c] += inc
            best = max(scores.values())
            if best == 0:
                warnings.append(f"round {rnd}: all remaining counts are zero; seat filled by tie policy")
            winner = ch.pick(sorted(c for c, x in scores.items() if x == best), rnd)
            elected.append(winner)
            rounds.append(RoundRecord(rnd, scores, winner))
        return Outcome("thiele-add", tuple(elected), True, tuple(rounds), tuple(ch.events), tuple(warnings))

    return run_with_policy(run, policy)


def thiele_elimination(
    e: Election, f: SatisfactionFunction = PROPORTIONAL, policy: TiePolicy = Lexicographic()
) -> Outcome:
    """Eliminate the weakest candidate until ``e.seats`` remain.

    A ballot with ``k`` remaining names gives ``v * w_k`` to each of them.  On
    ties the lexicographic policy eliminates the largest id, so that the
    survivors match the other methods' smallest-id preference.
    """
    e.require(Kind.UNORDERED)

    def run(ch: Chooser) -> Outcome:
        types = e.types()
        remaining = set(e.candidates)
        rounds = []
        order = []
        rnd = 0
        while len(remaining) > e.seats:
            rnd += 1
            scores = {c: Fraction(0) for c in remaining}
            for b, v in types:
                left = b.as_set & remaining
                if not left:
                    continue
                inc = v * f.w(len(left))
                for c in left:
                    scores[c] += inc
            low = min(scores.values())
            loser = ch.pick(sorted((c for c, x in scores.items() if x == low), reverse=True), rnd)
            remaining.discard(loser)
            order.append(loser)
            rounds.append(RoundRecord(rnd, scores, loser, action="eliminate"))
        return Outcome(
            "thiele-elim",
            tuple(sorted(remaining)),
            False,
            tuple(rounds),
            tuple(ch.events),
            extra={"eliminated": tuple(order)},
        )

    return run_with_policy(run, policy)


def thiele_ordered(e: Election, f: SatisfactionFunction = PROPORTIONAL, policy: TiePolicy = Lexicographic()) -> Outcome:
    """Ordered method: each ballot counts only for its current top unelected name.

    If that name is the ``k``-th on the ballot (so the first ``k-1`` are
    elected) the ballot counts ``v * w_k``.  Exhausted ballots are ignored.
    """
    e.require(Kind.ORDERED)

    def run(ch: Chooser) -> Outcome:
        types = e.types()
        elected: list[str] = []
        rounds = []
        warnings = []
        for rnd in range(1, e.seats + 1):
            done = set(elected)
            scores: dict[str, Fraction] = {}
            for b, v in types:
                for k, c in enumerate(b.names, start=1):
                    if c not in done:
                        scores[c] = scores.get(c, 0) + v * f.w(k)
                        break
            best = max(scores.values()) if scores else Fraction(0)
            if best == 0:
                warnings.append(f"round {rnd}: no ballot counts for anyone; seat filled by tie policy")
                pool = [c for c in e.candidates if c not in done]
            else:
                pool = [c for c, x in scores.items() if x == best]
            winner = ch.pick(sorted(pool), rnd)
            elected.append(winner)
            rounds.append(RoundRecord(rnd, scores, winner))
        return Outcome("thiele-ordered", tuple(elected), True, tuple(rounds), tuple(ch.events), tuple(warnings))

    return run_with_policy(run, policy)
