"""Instance-level checks of proportionality criteria and method properties.

Two entry points:

* :func:`check_representation` tests one committee against JR, PJR, EJR or
  the bloc guarantee ``PhPC(l)``.
* :func:`scan_property` runs a property experiment (house monotonicity,
  candidate monotonicity, consistency, full-ballot invariance, party-list
  reduction) for any method in :mod:`phragthiele.methods`.

Reports carry witnesses with the offending elections embedded as JSON, so a
failure can be replayed with :func:`replay_witness`.

Representation checks work at the granularity of ballot types.  A group of
voters that takes only part of a ballot type can always be enlarged to the
whole type: the intersection and union of the ballots stay the same while the
group only gets heavier.  So a violating group exists iff a violating union of
whole types exists, and enumerating type subsets is exact.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .core import (
    Ballot,
    BudgetExceeded,
    Election,
    EnumerateAll,
    Kind,
    Lexicographic,
    Outcome,
    Seeded,
    TiePolicy,
    ValidationError,
    parse_election_json,
    parse_tie_policy,
    render_election_json,
)
from .methods import MethodSpec, parse_method
from .report import to_plain
from .reference import DHONDT, CallableDivisors, DivisorSequence, divisor_method

__all__ = [
    "AuditReport",
    "CandidateMonotonicity",
    "Consistency",
    "FullBallotInvariance",
    "HouseMonotonicity",
    "PartyListReduction",
    "RepresentationCriterion",
    "RepresentationScan",
    "Witness",
    "check_representation",
    "party_list_election",
    "planted_bloc_election",
    "random_election",
    "replay_witness",
    "scan_property",
]

MAX_TYPES = 20


@dataclass(frozen=True)
class Witness:
    """One violation.  ``detail`` holds exact values; ``elections`` the JSON
    texts needed to replay it, keyed by role (``base``, ``after``, ...)."""

    check: str
    detail: Mapping[str, object]
    elections: Mapping[str, str] = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "check": self.check,
            "detail": to_plain(self.detail),
            "elections": {k: json.loads(v) for k, v in self.elections.items()},
        }

    def sort_key(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)


@dataclass(frozen=True)
class AuditReport:
    check: str
    verdict: str
    witnesses: tuple[Witness, ...] = ()
    stats: Mapping[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_obj(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "stats": to_plain(dict(self.stats)),
            "witnesses": [w.to_obj() for w in self.witnesses],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), indent=2) + "\n"

    def summary(self) -> str:
        lines = [f"{self.check}: {self.verdict.upper()}"]
        for k, v in self.stats.items():
            lines.append(f"  {k}: {to_plain(v)}")
        for w in self.witnesses[:10]:
            lines.append("  witness: " + json.dumps(to_plain(w.detail), sort_keys=True))
        if len(self.witnesses) > 10:
            lines.append(f"  ... {len(self.witnesses) - 10} more witnesses")
        return "\n".join(lines) + "\n"


def _report(check: str, witnesses: Iterable[Witness], stats: Mapping[str, object]) -> AuditReport:
    ws = tuple(sorted(witnesses, key=Witness.sort_key))
    return AuditReport(check, "fail" if ws else "pass", ws, dict(stats))


# --------------------------------------------------------------------------
# representation criteria


@dataclass(frozen=True)
class RepresentationCriterion:
    """``kind`` is JR, PJR, EJR or PhPC.  ``ell`` restricts the check to one
    level; ``None`` means every level from 1 to the house size (JR is level 1)."""

    kind: str
    ell: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in {"JR", "PJR", "EJR", "PhPC"}:
            raise ValidationError(f"unknown criterion {self.kind!r}")
        if self.ell is not None and self.ell < 1:
            raise ValidationError("criterion level must be positive")

    def __str__(self) -> str:
        return self.kind if self.ell is None else f"{self.kind}({self.ell})"


def parse_criterion(text: str) -> RepresentationCriterion:
    kind, _, arg = text.partition(":")
    kind = {"jr": "JR", "pjr": "PJR", "ejr": "EJR", "phpc": "PhPC"}.get(kind.lower(), kind)
    try:
        return RepresentationCriterion(kind, int(arg) if arg else None)
    except ValueError:
        raise ValidationError(f"bad criterion {text!r}") from None


def _levels(c: RepresentationCriterion, s: int) -> list[int]:
    if c.ell is not None:
        if c.ell > s:
            raise ValidationError(f"criterion level {c.ell} exceeds the {s} seats")
        return [c.ell]
    return [1] if c.kind == "JR" else list(range(1, s + 1))


def check_representation(e: Election, committee: Iterable[str], c: RepresentationCriterion) -> AuditReport:
    E = frozenset(committee)
    unknown = E - set(e.candidates)
    if unknown:
        raise ValidationError(f"committee names unknown candidates: {sorted(unknown)}")
    if c.kind == "PhPC":
        return _check_phpc(e, E, c)
    e.require(Kind.UNORDERED)
    s, V = e.seats, e.total_weight
    levels = _levels(c, s)
    merged: dict[frozenset, Fraction] = {}
    for b, v in e.types():
        merged[b.as_set] = merged.get(b.as_set, Fraction(0)) + v
    types = sorted(merged.items(), key=lambda t: (sorted(t[0]), t[1]))
    if len(types) > MAX_TYPES:
        raise BudgetExceeded(len(types), MAX_TYPES, "ballot types")

    witnesses: list[Witness] = []
    checked = 0

    def visit(start: int, chosen: list[int], inter: frozenset, union: frozenset, weight: Fraction) -> None:
        nonlocal checked
        if chosen:
            checked += 1
            for ell in levels:
                if len(inter) < ell or weight * s < ell * V:
                    continue
                if c.kind == "EJR":
                    ok = any(len(E & types[i][0]) >= ell for i in chosen)
                else:
                    ok = len(E & union) >= ell
                if not ok:
                    witnesses.append(
                        Witness(
                            str(c),
                            {
                                "ell": ell,
                                "group": [sorted(types[i][0]) for i in chosen],
                                "weight": weight,
                                "threshold": Fraction(ell) * V / s,
                                "common": sorted(inter),
                                "represented": len(E & union) if c.kind != "EJR" else max(len(E & types[i][0]) for i in chosen),
                                "committee": sorted(E),
                            },
                            {"base": render_election_json(e)},
                        )
                    )
        for i in range(start, len(types)):
            nxt = types[i][0] if not chosen else inter & types[i][0]
            if not nxt:
                continue
            chosen.append(i)
            visit(i + 1, chosen, nxt, union | types[i][0], weight + types[i][1])
            chosen.pop()

    visit(0, [], frozenset(), frozenset(), Fraction(0))
    return _report(str(c), witnesses, {"types": len(types), "groups_checked": checked, "committee": sorted(E)})


def _check_phpc(e: Election, E: frozenset, c: RepresentationCriterion) -> AuditReport:
    e.require(Kind.UNORDERED, Kind.ORDERED)
    s, V = e.seats, e.total_weight
    witnesses = []
    blocs = 0
    for ell in _levels(c, s):
        groups: dict[frozenset, Fraction] = {}
        for b, v in e.types():
            if len(b.names) < ell:
                continue
            key = b.as_set if e.kind is Kind.UNORDERED else frozenset(b.names[:ell])
            groups[key] = groups.get(key, Fraction(0)) + v
        bound = Fraction(ell) * V / (s + 1)
        for key, weight in sorted(groups.items(), key=lambda t: sorted(t[0])):
            if weight <= bound:
                continue
            blocs += 1
            got = len(E & key)
            if got < ell:
                witnesses.append(
                    Witness(
                        str(c),
                        {"ell": ell, "bloc": sorted(key), "weight": weight, "threshold": bound, "elected_from_bloc": got, "committee": sorted(E)},
                        {"base": render_election_json(e)},
                    )
                )
    return _report(str(c), witnesses, {"blocs_checked": blocs, "committee": sorted(E)})


# --------------------------------------------------------------------------
# random elections


def random_election(
    rng: random.Random,
    kind: Kind | str = Kind.UNORDERED,
    *,
    candidates: int | tuple[int, int] = (3, 6),
    types: int | tuple[int, int] = (2, 6),
    seats: int | tuple[int, int] = (1, 3),
    count: tuple[int, int] = (1, 60),
) -> Election:
    """Random small election.  Integer ranges are inclusive."""

    def pick(r):
        return r if isinstance(r, int) else rng.randint(*r)

    kind = Kind(kind)
    n = pick(candidates)
    names = [chr(ord("A") + i) for i in range(n)]
    s = min(pick(seats), n)
    rows: dict = {}
    for _ in range(pick(types)):
        size = rng.randint(1, n)
        chosen = rng.sample(names, size)
        if kind is Kind.UNORDERED:
            groups: tuple = (tuple(sorted(chosen)),)
        elif kind is Kind.ORDERED:
            groups = tuple((x,) for x in chosen)
        else:
            cuts = sorted(rng.sample(range(1, size), rng.randint(0, size - 1))) if size > 1 else []
            bounds = [0, *cuts, size]
            groups = tuple(tuple(sorted(chosen[a:b])) for a, b in zip(bounds, bounds[1:]))
        b = Ballot(groups)
        rows[b] = rows.get(b, 0) + rng.randint(*count)
    return Election(tuple(names), tuple(rows.items()), kind, s)


def party_list_election(
    rng: random.Random,
    kind: Kind | str = Kind.UNORDERED,
    *,
    parties: tuple[int, int] = (2, 5),
    seats: tuple[int, int] = (1, 8),
    votes: tuple[int, int] = (1, 1000),
) -> Election:
    """Disjoint party lists, each as long as the house, one ballot line per party."""
    kind = Kind(kind)
    k = rng.randint(*parties)
    s = rng.randint(*seats)
    rows = []
    for p in range(k):
        names = [f"{chr(ord('A') + p)}{i + 1}" for i in range(s)]
        groups = (tuple(names),) if kind is Kind.UNORDERED else tuple((x,) for x in names)
        rows.append((Ballot(groups), rng.randint(*votes)))
    cands = tuple(c for b, _ in rows for c in b.names)
    return Election(cands, tuple(rows), kind, s)


def planted_bloc_election(rng: random.Random, kind: Kind | str = Kind.UNORDERED) -> tuple[Election, int, tuple[str, ...]]:
    """Random election plus one identical-list bloc holding just over
    ``ell/(s+1)`` of the votes.  Returns the election, ``ell`` and the bloc list."""
    kind = Kind(kind)
    base = random_election(rng, kind, candidates=(4, 7), types=(1, 5), seats=(1, 4))
    s = base.seats
    ell = rng.randint(1, s)
    size = rng.randint(ell, len(base.candidates))
    bloc = tuple(rng.sample(list(base.candidates), size))
    rest = base.total_weight
    need = Fraction(ell) * rest / (s + 1 - ell)
    w = int(need) + 1 + rng.randint(0, 3)
    groups = (tuple(sorted(bloc)),) if kind is Kind.UNORDERED else tuple((x,) for x in bloc)
    return base.with_ballots([(Ballot(groups), w)]), ell, bloc


# --------------------------------------------------------------------------
# property scans


@dataclass(frozen=True)
class HouseMonotonicity:
    s_max: int = 5
    trials: int = 1


@dataclass(frozen=True)
class CandidateMonotonicity:
    trials: int = 100


@dataclass(frozen=True)
class Consistency:
    e1: Election
    e2: Election


@dataclass(frozen=True)
class FullBallotInvariance:
    n: int = 10
    trials: int = 1


@dataclass(frozen=True)
class PartyListReduction:
    trials: int = 100
    divisors: DivisorSequence | CallableDivisors = DHONDT
    kind: Kind | None = None


@dataclass(frozen=True)
class RepresentationScan:
    """Elect on random (or given) elections and check a criterion on each committee."""

    criterion: RepresentationCriterion
    trials: int = 100


Property = Union[HouseMonotonicity, CandidateMonotonicity, Consistency, FullBallotInvariance, PartyListReduction, RepresentationScan]
Subject = Union[Election, Callable[[random.Random], Election], None]

ENUM_LIMIT = 256


def _method(method: MethodSpec | str) -> MethodSpec:
    return parse_method(method) if isinstance(method, str) else method


def _outcomes(m: MethodSpec, e: Election, policy: TiePolicy | None = None) -> set[frozenset[str]]:
    """Every committee under tie enumeration, or the one ``policy`` picks."""
    if policy is None or isinstance(policy, EnumerateAll):
        return m.run(e, policy or EnumerateAll(ENUM_LIMIT)).outcome_sets()
    return {m.run(e, policy).committee}


def _draw(subject: Subject, rng: random.Random, m: MethodSpec) -> Election:
    if subject is None:
        kind = Kind.UNORDERED if m.accepts_kind(Kind.UNORDERED) else Kind.ORDERED
        return random_election(rng, kind)
    if isinstance(subject, Election):
        return subject
    return subject(rng)


def _sets(outcomes: Iterable[frozenset[str]]) -> list[list[str]]:
    return sorted(sorted(S) for S in outcomes)


def scan_property(
    method: MethodSpec | str,
    subject: Subject,
    prop: Property,
    *,
    seed: int = 0,
    policy: TiePolicy | None = None,
) -> AuditReport:
    """Run the experiment for ``prop``.

    ``subject`` is a fixed election, a generator ``rng -> Election`` or
    ``None`` for the default random generator.  House monotonicity compares
    the committees ``policy`` picks (default lexicographic; pass
    ``EnumerateAll`` to compare every tie branch).  Candidate monotonicity and
    party-list runs use ``policy`` (default ``Seeded(seed)``) and redraw trials
    that meet a tie.  Consistency and full-ballot checks enumerate every tie
    branch.
    """
    m = _method(method)
    rng = random.Random(seed)
    name = f"{type(prop).__name__}[{m.token}]"
    if isinstance(prop, HouseMonotonicity):
        return _house(m, subject, prop, rng, policy or Lexicographic(), name)
    policy = policy or Seeded(seed)
    if isinstance(prop, CandidateMonotonicity):
        return _candidate_mono(m, subject, prop, rng, policy, name)
    if isinstance(prop, Consistency):
        return _consistency(m, prop, name)
    if isinstance(prop, FullBallotInvariance):
        return _full_ballots(m, subject, prop, rng, name)
    if isinstance(prop, PartyListReduction):
        return _party_lists(m, subject, prop, rng, policy, name)
    if isinstance(prop, RepresentationScan):
        return _representation_scan(m, subject, prop, rng, policy, name)
    raise ValidationError(f"unknown property {prop!r}")


def _house(m: MethodSpec, subject: Subject, prop: HouseMonotonicity, rng, policy, name) -> AuditReport:
    witnesses = []
    pairs = 0
    for _ in range(prop.trials if not isinstance(subject, Election) else 1):
        e = _draw(subject, rng, m)
        top = min(prop.s_max, len(e.candidates))
        prev = None
        for s in range(1, top + 1):
            cur = _outcomes(m, e.with_seats(s), policy)
            if prev is not None:
                pairs += 1
                lost = [S for S in prev if not any(S <= T for T in cur)]
                if lost:
                    witnesses.append(
                        Witness(
                            "house-monotonicity",
                            {"seats": [s - 1, s], "smaller": _sets(prev), "larger": _sets(cur), "not_nested": _sets(lost), "policy": str(policy)},
                            {"base": render_election_json(e)},
                        )
                    )
            prev = cur
    return _report(name, witnesses, {"size_pairs": pairs})


def _perturb(e: Election, rng: random.Random, target: str) -> tuple[Election, dict]:
    """Apply one A-favouring change to part of one ballot line (or add A-only ballots)."""
    rows = [(b, m) for b, m in e.ballots if m > 0]
    moves = ["new"]
    if any(target not in b.as_set for b, _ in rows):
        moves.append("insert")
    if e.kind is Kind.ORDERED and any(target in b.as_set and b.names[0] != target for b, _ in rows):
        moves.append("promote")
    move = rng.choice(moves)
    if move == "new":
        k = rng.randint(1, 5)
        added = Ballot(((target,),))
        return e.with_ballots([(added, k)]), {"move": "new", "count": k, "ballot": added.label()}
    if move == "insert":
        idx = [i for i, (b, _) in enumerate(rows) if target not in b.as_set]
    else:
        idx = [i for i, (b, _) in enumerate(rows) if target in b.as_set and b.names[0] != target]
    i = rng.choice(idx)
    b, m = rows[i]
    k = rng.randint(1, m)
    if e.kind is Kind.UNORDERED:
        nb = Ballot((tuple(sorted(b.names + (target,))),), b.weight)
    else:
        names = list(b.names)
        if move == "insert":
            names.insert(rng.randint(0, len(names)), target)
        else:
            pos = names.index(target)
            names.pop(pos)
            names.insert(rng.randint(0, pos - 1), target)
        nb = Ballot(tuple((x,) for x in names), b.weight)
    new_rows = rows[:i] + ([(b, m - k)] if m > k else []) + rows[i + 1 :] + [(nb, k)]
    return Election(e.candidates, tuple(new_rows), e.kind, e.seats), {"move": move, "count": k, "from": b.label(), "to": nb.label()}


def _candidate_mono(m: MethodSpec, subject: Subject, prop, rng, policy, name) -> AuditReport:
    if m.kinds == (Kind.WEAK,):
        raise ValidationError("candidate monotonicity scans need unordered or ordered ballots")
    witnesses = []
    done = skipped = 0
    # Trials with a tie in either run are redrawn, up to ten times the quota.
    for _ in range(10 * prop.trials):
        if done == prop.trials:
            break
        e = _draw(subject, rng, m)
        if e.kind is Kind.WEAK:
            raise ValidationError("candidate monotonicity scans need unordered or ordered ballots")
        before = m.run(e, policy)
        if before.ties:
            skipped += 1
            continue
        target = rng.choice(sorted(before.elected))
        after_e, change = _perturb(e, rng, target)
        after = m.run(after_e, policy)
        if after.ties:
            skipped += 1
            continue
        done += 1
        if target not in after.committee:
            witnesses.append(
                Witness(
                    "candidate-monotonicity",
                    {"target": target, "change": change, "before": sorted(before.elected), "after": sorted(after.elected), "policy": str(policy)},
                    {"base": render_election_json(e), "after": render_election_json(after_e)},
                )
            )
    return _report(name, witnesses, {"trials": done, "skipped_for_ties": skipped, "violations": len(witnesses)})


def _consistency(m: MethodSpec, prop: Consistency, name) -> AuditReport:
    e1, e2 = prop.e1, prop.e2
    o1, o2 = _outcomes(m, e1), _outcomes(m, e2)
    merged = e1.merged(e2)
    o12 = _outcomes(m, merged)
    common = o1 & o2
    witnesses = []
    if common and o12 != common:
        witnesses.append(
            Witness(
                "consistency",
                {"first": _sets(o1), "second": _sets(o2), "merged": _sets(o12)},
                {"first": render_election_json(e1), "second": render_election_json(e2), "merged": render_election_json(merged)},
            )
        )
    return _report(name, witnesses, {"common_outcomes": _sets(common)})


def _full_ballots(m: MethodSpec, subject: Subject, prop: FullBallotInvariance, rng, name) -> AuditReport:
    witnesses = []
    runs = 0
    for _ in range(prop.trials if not isinstance(subject, Election) else 1):
        e = _draw(subject, rng, m)
        if e.kind is Kind.UNORDERED:
            full = Ballot((tuple(e.candidates),))
        elif e.kind is Kind.WEAK:
            full = Ballot((tuple(e.candidates),))
        else:
            full = Ballot(tuple((c,) for c in e.candidates))
        bigger = e.with_ballots([(full, prop.n)])
        base, after = _outcomes(m, e), _outcomes(m, bigger)
        runs += 1
        if base != after:
            witnesses.append(
                Witness(
                    "full-ballot-invariance",
                    {"added": prop.n, "base": _sets(base), "after": _sets(after)},
                    {"base": render_election_json(e), "after": render_election_json(bigger)},
                )
            )
    return _report(name, witnesses, {"elections": runs, "full_ballots_added": prop.n})


def _party_of(e: Election) -> dict[str, str]:
    return {c: b.names[0] if e.kind is Kind.ORDERED else min(b.names) for b, _ in e.ballots for c in b.names}


def _party_lists(m: MethodSpec, subject: Subject, prop: PartyListReduction, rng, policy, name) -> AuditReport:
    kind = prop.kind or (Kind.UNORDERED if m.accepts_kind(Kind.UNORDERED) else Kind.ORDERED)
    witnesses = []
    done = redrawn = 0
    while done < prop.trials:
        e = party_list_election(rng, kind) if subject is None else _draw(subject, rng, m)
        party = _party_of(e)
        votes: dict[str, Fraction] = {}
        for b, v in e.types():
            votes[party[b.names[0]]] = votes.get(party[b.names[0]], Fraction(0)) + v
        oracle = divisor_method(votes, e.seats, prop.divisors, EnumerateAll(ENUM_LIMIT))
        if len(oracle.outcome_sets()) > 1:
            if isinstance(subject, Election):
                raise ValidationError("the party-list election has a tie under the divisor method")
            redrawn += 1
            continue
        done += 1
        out = m.run(e, policy)
        got: dict[str, int] = {}
        for c in out.elected:
            got[party[c]] = got.get(party[c], 0) + 1
        want = {p: n for p, n in oracle.seats.items() if n}
        if got != want:
            witnesses.append(
                Witness(
                    "party-list-reduction",
                    {"method_seats": got, "divisor_seats": want, "elected": list(out.elected)},
                    {"base": render_election_json(e)},
                )
            )
    return _report(name, witnesses, {"trials": done, "redrawn_for_ties": redrawn})


def _representation_scan(m: MethodSpec, subject: Subject, prop: RepresentationScan, rng, policy, name) -> AuditReport:
    witnesses = []
    for _ in range(prop.trials if not isinstance(subject, Election) else 1):
        e = _draw(subject, rng, m)
        out = m.run(e, policy)
        rep = check_representation(e, out.elected, prop.criterion)
        for w in rep.witnesses:
            witnesses.append(Witness(w.check, {**w.detail, "method": m.token}, w.elections))
    return _report(name, witnesses, {"trials": prop.trials if not isinstance(subject, Election) else 1})


# --------------------------------------------------------------------------
# replay


def replay_witness(method: MethodSpec | str, w: Witness) -> bool:
    """Re-run the experiment behind ``w``; True when the violation reappears."""
    m = _method(method)
    els = {k: parse_election_json(v) for k, v in w.elections.items()}
    d = w.detail
    if w.check == "house-monotonicity":
        small, large = d["seats"]
        pol = parse_tie_policy(d["policy"])
        prev = _outcomes(m, els["base"].with_seats(small), pol)
        cur = _outcomes(m, els["base"].with_seats(large), pol)
        return any(not any(S <= T for T in cur) for S in prev)
    if w.check == "candidate-monotonicity":
        pol = parse_tie_policy(d["policy"])
        return d["target"] in m.run(els["base"], pol).committee and d["target"] not in m.run(els["after"], pol).committee
    if w.check == "consistency":
        o1, o2 = _outcomes(m, els["first"]), _outcomes(m, els["second"])
        common = o1 & o2
        return bool(common) and _outcomes(m, els["merged"]) != common
    if w.check == "full-ballot-invariance":
        return _outcomes(m, els["base"]) != _outcomes(m, els["after"])
    if w.check == "party-list-reduction":
        e = els["base"]
        party = _party_of(e)
        got: dict[str, int] = {}
        for c in m.run(e).elected:
            got[party[c]] = got.get(party[c], 0) + 1
        return got != d["divisor_seats"]
    crit = parse_criterion(w.check.replace("(", ":").rstrip(")"))
    rep = check_representation(els["base"], d["committee"], crit)
    return not rep.passed

