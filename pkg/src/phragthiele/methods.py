"""Method descriptors: one name per runnable count.

``parse_method("stv:wig:order=elect")`` returns a :class:`MethodSpec` whose
``run(election, policy)`` gives an :class:`~phragthiele.core.Outcome`.  The CLI
and the audit scanner both go through this table.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

from .core import Election, Kind, Lexicographic, Outcome, TiePolicy, ValidationError
from .numeric import DomainError, RoundingPolicy, as_rational
from .phragmen import phragmen_elect, ranking_plus_thiele
from .reference import (
    DHONDT,
    SAINTE_LAGUE,
    QuotaSpec,
    SimpleMethod,
    TransferPolicy,
    divisor_method,
    modified_sainte_lague,
    quota_method,
    simple_elect,
    stv_elect,
)
from .thiele import DEFAULT_BUDGET, PROPORTIONAL, SatisfactionFunction, thiele_addition, thiele_elimination, thiele_opt, thiele_ordered
from .variants import OptCombo, enestrom_elect, limit_method_elect, opt_load_elect, parse_combo

__all__ = ["HEADS", "MethodSpec", "parse_method", "split_method_list"]

HEADS = (
    "phragmen",
    "thiele-opt",
    "thiele-add",
    "thiele-elim",
    "thiele-ordered",
    "ranking-thiele",
    "enestrom",
    "opt-load",
    "limit",
    "dhondt",
    "sainte-lague",
    "msl",
    "quota",
    "stv",
    "approval",
    "block",
    "limited",
    "sntv",
    "cumulative",
    "scoring",
    "bottomsup",
)

Runner = Callable[[Election, TiePolicy], Outcome]


@dataclass(frozen=True)
class MethodSpec:
    token: str
    kinds: tuple[Kind, ...]
    set_valued: bool
    runner: Runner = field(compare=False, repr=False)

    def run(self, e: Election, policy: TiePolicy = Lexicographic()) -> Outcome:
        if e.kind not in self.kinds:
            allowed = "/".join(k.value for k in self.kinds)
            raise ValidationError(f"{self.token} needs {allowed} ballots, got {self.kind_name(e)}")
        return self.runner(e, policy)

    @staticmethod
    def kind_name(e: Election) -> str:
        return e.kind.value

    def accepts(self, e: Election) -> bool:
        return e.kind in self.kinds

    def accepts_kind(self, kind: Kind) -> bool:
        return kind in self.kinds


ALL_KINDS = (Kind.UNORDERED, Kind.ORDERED, Kind.WEAK)
UNORDERED = (Kind.UNORDERED,)
ORDERED = (Kind.ORDERED,)


def split_method_list(text: str) -> list[str]:
    """Split a comma-separated method list, keeping commas inside arguments
    (``scoring:3,2,1`` or ``opt-load:a2,b2,c2``) attached to their method."""
    out: list[str] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        head = chunk.split(":", 1)[0]
        if head in HEADS or not out:
            out.append(chunk)
        else:
            out[-1] += "," + chunk
    return out


def _party_lists(e: Election) -> dict[str, tuple[str, ...]]:
    """Read the ballots as disjoint party lists, keyed by each list's head.

    Unordered lists are read in id order; ordered lists keep ballot order.
    """
    lists: dict[frozenset, tuple[str, ...]] = {}
    for b, m in e.ballots:
        if m == 0:
            continue
        names = b.names if e.kind is Kind.ORDERED else tuple(sorted(b.names))
        key = b.as_set
        if key in lists:
            if lists[key] != names:
                raise ValidationError("party lists must not be reordered between ballots")
            continue
        if any(not other.isdisjoint(key) for other in lists):
            raise ValidationError("apportionment methods need disjoint party lists")
        lists[key] = names
    return {names[0]: names for names in lists.values()}


def _apportion(e: Election, policy: TiePolicy, token: str, allocate) -> Outcome:
    lists = _party_lists(e)
    head = {c: names[0] for names in lists.values() for c in names}
    votes = {p: Fraction(0) for p in lists}
    for b, v in e.types():
        votes[head[b.names[0]]] += v
    alloc = allocate(votes, e.seats, policy)

    def seat(a) -> Outcome:
        taken = {p: 0 for p in lists}
        elected = []
        for p in a.order:
            if taken[p] < len(lists[p]):
                elected.append(lists[p][taken[p]])
            taken[p] += 1
        warnings = tuple(a.notes)
        if len(elected) < e.seats:
            warnings += ("a party won more seats than it has names",)
        return Outcome(token, tuple(elected), True, (), (), warnings, extra={"party_seats": dict(a.seats)})

    main = seat(alloc)
    if len(alloc.alternatives) > 1:
        main = replace(main, alternatives=tuple(seat(a) for a in alloc.alternatives))
    return main


def parse_method(
    token: str,
    *,
    f: SatisfactionFunction = PROPORTIONAL,
    combo: OptCombo | None = None,
    rounding: RoundingPolicy = RoundingPolicy.EXACT,
    budget: int = DEFAULT_BUDGET,
) -> MethodSpec:
    head, _, arg = token.partition(":")
    try:
        return _build(token, head, arg, f, combo, rounding, budget)
    except DomainError as exc:
        raise ValidationError(f"bad method {token!r}: {exc}") from None


def _build(token, head, arg, f, combo, rounding, budget) -> MethodSpec:
    if rounding is not RoundingPolicy.EXACT and head not in {"phragmen", "enestrom"}:
        raise ValidationError(f"{head} has no two-decimal mode")
    if head == "phragmen":
        kinds = ORDERED if rounding is RoundingPolicy.TRUNCATE_2DEC else ALL_KINDS
        return MethodSpec(token, kinds, False, lambda e, p: phragmen_elect(e, p, rounding))
    if head == "thiele-opt":
        return MethodSpec(token, UNORDERED, True, lambda e, p: thiele_opt(e, f, p, budget=budget))
    if head == "thiele-add":
        return MethodSpec(token, UNORDERED, False, lambda e, p: thiele_addition(e, f, p))
    if head == "thiele-elim":
        return MethodSpec(token, UNORDERED, True, lambda e, p: thiele_elimination(e, f, p))
    if head == "thiele-ordered":
        return MethodSpec(token, ORDERED, False, lambda e, p: thiele_ordered(e, f, p))
    if head == "ranking-thiele":
        return MethodSpec(token, ORDERED, False, lambda e, p: ranking_plus_thiele(e, None, f, p))
    if head == "enestrom":
        quota: object = "hare"
        if arg:
            quota = arg if arg in {"hare", "droop"} else as_rational(arg)
        return MethodSpec(token, UNORDERED, False, lambda e, p: enestrom_elect(e, quota, rounding, p))
    if head == "opt-load":
        c = parse_combo(arg) if arg else (combo or OptCombo("a2", "b2", "c2"))
        return MethodSpec(token, UNORDERED, c.mode == "c1", lambda e, p: opt_load_elect(e, c, p, budget=budget))
    if head == "limit":
        return MethodSpec(token, UNORDERED, False, lambda e, p: limit_method_elect(e, p))
    if head in {"dhondt", "sainte-lague", "msl"}:
        if head == "msl":
            if not arg:
                raise ValidationError("msl needs a first divisor, e.g. msl:1.4")
            d = modified_sainte_lague(arg)
        else:
            d = DHONDT if head == "dhondt" else SAINTE_LAGUE
        return MethodSpec(
            token, (Kind.UNORDERED, Kind.ORDERED), False, lambda e, p: _apportion(e, p, token, lambda v, s, pol: divisor_method(v, s, d, pol))
        )
    if head == "quota":
        parts = arg.split(":") if arg else ["hare"]
        spec = QuotaSpec(parts[0], parts[1] if len(parts) > 1 else "none")
        return MethodSpec(
            token, (Kind.UNORDERED, Kind.ORDERED), False, lambda e, p: _apportion(e, p, token, lambda v, s, pol: quota_method(v, s, spec, pol))
        )
    if head == "stv":
        transfer, order, q = "ig", "surplus", None
        for part in (arg.split(":") if arg else []):
            if part in {"ig", "wig"}:
                transfer = part
            elif part.startswith("order="):
                order = {"elect": "elect", "surplus": "surplus"}.get(part[6:], "")
                if not order:
                    raise ValidationError(f"bad stv order {part!r}")
            elif part.startswith("q="):
                q = as_rational(part[2:])
            elif part in {"hare", "droop"}:
                q = QuotaSpec(part)
            else:
                raise ValidationError(f"bad stv option {part!r}")
        tp = TransferPolicy(transfer, order)
        quota_arg = q if q is not None else QuotaSpec("droop")
        return MethodSpec(token, ORDERED, False, lambda e, p: stv_elect(e, quota_arg, tp, p))
    if head in {"approval", "sntv", "cumulative", "bottomsup"}:
        sm = SimpleMethod(head)
        kinds = UNORDERED if head in {"approval", "cumulative"} else (Kind.ORDERED, Kind.UNORDERED)
        return MethodSpec(token, kinds, head == "bottomsup", lambda e, p: simple_elect(e, sm, p))
    if head in {"block", "limited"}:
        try:
            limit = int(arg) if arg else None
        except ValueError:
            raise ValidationError(f"bad limit in {token!r}") from None
        sm = SimpleMethod(head, limit)
        return MethodSpec(token, UNORDERED, False, lambda e, p: simple_elect(e, sm, p))
    if head == "scoring":
        points = tuple(as_rational(x) for x in arg.split(",") if x.strip())
        sm = SimpleMethod("scoring", points=points)
        return MethodSpec(token, (Kind.ORDERED, Kind.UNORDERED), False, lambda e, p: simple_elect(e, sm, p))
    raise ValidationError(f"unknown method {token!r}")
