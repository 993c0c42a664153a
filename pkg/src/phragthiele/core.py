"""Ballots, elections, the election file formats and tie handling.

A ballot is a sequence of candidate groups.  Unordered ballots have one group,
ordered ballots have only singleton groups, and weakly ordered ballots may mix
both.  Every engine in the package reads elections through this model.
"""

from __future__ import annotations

import enum
import io
import json
import random
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TextIO, Union

from .numeric import DomainError, as_rational

__all__ = [
    "Allocation",
    "Ballot",
    "BudgetExceeded",
    "Chooser",
    "Election",
    "EnumerateAll",
    "EnumerationOverflow",
    "Kind",
    "Lexicographic",
    "Outcome",
    "ParseError",
    "RoundRecord",
    "Seeded",
    "TieEvent",
    "TiePolicy",
    "ValidationError",
    "approval_tally",
    "break_tie",
    "election",
    "first_name_tally",
    "parse_election",
    "parse_election_json",
    "parse_tie_policy",
    "render_election_json",
    "render_election_text",
    "run_with_policy",
]


class ValidationError(ValueError):
    """Input that violates a precondition of the model or of a method."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EnumerationOverflow(RuntimeError):
    """Tie enumeration produced more branches than the configured limit."""

    def __init__(self, limit: int, partial: Sequence["Outcome"]):
        self.limit = limit
        self.partial = tuple(partial)
        shown = ", ".join(" ".join(o.elected) for o in self.partial[:10])
        more = f" and {len(self.partial) - 10} more" if len(self.partial) > 10 else ""
        super().__init__(f"tie enumeration exceeded {limit} branches; {len(self.partial)} outcomes so far: {shown}{more}")


class BudgetExceeded(RuntimeError):
    """An exhaustive search would visit more configurations than allowed."""

    def __init__(self, needed: int, budget: int, what: str = "subsets"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"search needs {needed} {what}, budget is {budget}")


class Kind(enum.Enum):
    UNORDERED = "unordered"
    ORDERED = "ordered"
    WEAK = "weak"


_ID_BAD = re.compile(r"[\s:>#]")


def _check_id(token: str, line: int | None = None) -> str:
    if not token or _ID_BAD.search(token):
        raise ParseError(f"invalid candidate id {token!r}", line)
    return token


@dataclass(frozen=True)
class Ballot:
    """One ballot shape with a per-ballot weight.

    ``groups`` holds the candidate groups in preference order; each group is a
    sorted tuple so that equal ballots compare and hash equal.
    """

    groups: tuple[tuple[str, ...], ...]
    weight: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        groups = tuple(tuple(sorted(g)) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "weight", as_rational(self.weight))
        if not groups or any(not g for g in groups):
            raise ValidationError("ballot groups must be nonempty")
        names = [c for g in groups for c in g]
        if len(set(names)) != len(names):
            raise ValidationError(f"candidate repeated on ballot {self.label()}")
        if self.weight <= 0:
            raise ValidationError("ballot weight must be positive")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c for g in self.groups for c in g)

    @property
    def as_set(self) -> frozenset[str]:
        return frozenset(self.names)

    def label(self) -> str:
        return " > ".join(" ".join(g) for g in self.groups)

    def active_group(self, elected: Iterable[str]) -> tuple[str, ...]:
        """Unelected members of the first group that still has any, or ``()``."""
        done = set(elected)
        for g in self.groups:
            rest = tuple(c for c in g if c not in done)
            if rest:
                return rest
        return ()


@dataclass(frozen=True)
class Election:
    candidates: tuple[str, ...]
    ballots: tuple[tuple[Ballot, int], ...]
    kind: Kind
    seats: int
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(sorted(set(self.candidates))))
        object.__setattr__(self, "ballots", tuple((b, int(m)) for b, m in self.ballots))
        roster = set(self.candidates)
        for c in self.candidates:
            _check_id(c)
        for b, m in self.ballots:
            if m < 0:
                raise ValidationError("multiplicity must be nonnegative")
            missing = b.as_set - roster
            if missing:
                raise ValidationError(f"ballot names not in roster: {sorted(missing)}")
            if self.kind is Kind.UNORDERED and len(b.groups) != 1:
                raise ValidationError("unordered ballots have exactly one group")
            if self.kind is Kind.ORDERED and any(len(g) != 1 for g in b.groups):
                raise ValidationError("ordered ballots have singleton groups")
        if not isinstance(self.seats, int) or self.seats < 1:
            raise ValidationError("seats must be a positive integer")
        if self.seats > len(self.candidates):
            raise ValidationError(f"seats ({self.seats}) exceed candidates ({len(self.candidates)})")

    def types(self) -> list[tuple[Ballot, Fraction]]:
        """Ballot types with their total weight ``v``, zero-multiplicity rows dropped."""
        return [(b, b.weight * m) for b, m in self.ballots if m > 0]

    @property
    def total_weight(self) -> Fraction:
        return sum((v for _, v in self.types()), Fraction(0))

    def with_seats(self, seats: int) -> "Election":
        return replace(self, seats=seats)

    def with_ballots(self, extra: Iterable[tuple[Ballot, int]]) -> "Election":
        extra = tuple(extra)
        names = set(self.candidates).union(*(b.as_set for b, _ in extra))
        return replace(self, candidates=tuple(names), ballots=self.ballots + extra)

    def merged(self, other: "Election") -> "Election":
        if other.kind is not self.kind:
            raise ValidationError("cannot merge elections of different kinds")
        return replace(
            self,
            candidates=tuple(set(self.candidates) | set(other.candidates)),
            ballots=self.ballots + other.ballots,
        )

    def as_unordered(self) -> "Election":
        """The same votes read as unordered sets."""
        rows = tuple((Ballot((b.names,), b.weight), m) for b, m in self.ballots)
        return replace(self, ballots=rows, kind=Kind.UNORDERED)

    def require(self, *kinds: Kind) -> None:
        if self.kind not in kinds:
            allowed = "/".join(k.value for k in kinds)
            raise ValidationError(f"method requires {allowed} ballots, got {self.kind.value}")


def election(kind: Kind | str, seats: int, rows: Iterable, candidates: Iterable[str] = ()) -> Election:
    """Convenience constructor.

    Each row is ``(count, spec)`` or ``(count, spec, weight)`` where ``spec`` is
    either a string in the ballot-line syntax (``"A B > C"``) or a sequence of
    candidate ids.  A string without spaces such as ``"ABC"`` is split into
    one-letter ids.
    """
    kind = Kind(kind) if isinstance(kind, str) else kind
    ballots = []
    for row in rows:
        count, spec, *rest = row
        weight = as_rational(rest[0]) if rest else Fraction(1)
        if isinstance(spec, str):
            groups = _split_tokens(spec, kind, None)
        else:
            groups = [list(spec)] if kind is Kind.UNORDERED else [[c] for c in spec]
        if not groups:
            continue
        ballots.append((Ballot(tuple(tuple(g) for g in groups), weight), int(count)))
    names = set(candidates).union(*(b.as_set for b, _ in ballots)) if ballots else set(candidates)
    return Election(tuple(names), tuple(ballots), kind, seats)


def _split_tokens(text: str, kind: Kind, line: int | None) -> list[list[str]]:
    text = text.strip()
    if not text:
        return []
    if ">" in text and kind is not Kind.WEAK:
        raise ParseError("'>' group separators are only allowed for weak ballots", line)
    parts = text.split(">") if kind is Kind.WEAK else [text]
    groups: list[list[str]] = []
    for part in parts:
        tokens = part.split()
        if line is None and len(tokens) == 1 and len(tokens[0]) > 1 and tokens[0].isalpha() and tokens[0].isupper():
            # programmatic shorthand: "ABC" means A, B, C
            tokens = list(tokens[0])
        if not tokens:
            raise ParseError("empty group", line)
        for t in tokens:
            _check_id(t, line)
        groups.append(tokens)
    seen: set[str] = set()
    for g in groups:
        for c in g:
            if c in seen:
                raise ParseError(f"duplicate candidate {c}", line)
            seen.add(c)
    if kind is Kind.UNORDERED:
        return groups
    if kind is Kind.ORDERED:
        return [[c] for c in groups[0]]
    return groups


_BALLOT_LINE = re.compile(r"^(?P<count>[^:x]+?)(?:x(?P<wnum>[^/:]+)(?:/(?P<wden>[^:]+))?)?\s*:(?P<rest>.*)$")
_HEADER = re.compile(r"^(?P<key>[A-Za-z_]+)\s*:\s*(?P<value>.*)$")


def parse_election(source: Union[str, TextIO]) -> Election:
    """Parse the line-based election format.

    ``kind:`` and ``seats:`` headers are required before the first ballot line.
    An optional ``candidates:`` header lists roster members that no ballot names.
    """
    text = source if isinstance(source, str) else source.read()
    kind: Kind | None = None
    seats: int | None = None
    roster: list[str] = []
    ballots: list[tuple[Ballot, int]] = []
    blanks = 0
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = _HEADER.match(line)
        if head and not head.group("key")[0].isdigit() and head.group("key").lower() in {"kind", "seats", "candidates"}:
            key, value = head.group("key").lower(), head.group("value").strip()
            if key == "kind":
                try:
                    kind = Kind(value)
                except ValueError:
                    raise ParseError(f"unknown kind {value!r}", lineno) from None
            elif key == "seats":
                if not re.fullmatch(r"\d+", value) or int(value) < 1:
                    raise ParseError(f"seats must be a positive integer, got {value!r}", lineno)
                seats = int(value)
            else:
                roster.extend(_check_id(t, lineno) for t in value.split())
            continue
        m = _BALLOT_LINE.match(line)
        if not m or not m.group("count").strip()[:1].isdigit():
            raise ParseError(f"unrecognized line {line!r}", lineno)
        if kind is None:
            raise ParseError("ballot before 'kind:' header", lineno)
        count_text = m.group("count").strip()
        if not re.fullmatch(r"\d+", count_text):
            raise ParseError(f"multiplicity must be a nonnegative integer, got {count_text!r}", lineno)
        count = int(count_text)
        weight = Fraction(1)
        if m.group("wnum") is not None:
            try:
                weight = Fraction(int(m.group("wnum")), int(m.group("wden") or 1))
            except (ValueError, ZeroDivisionError):
                raise ParseError("malformed weight", lineno) from None
            if weight <= 0:
                raise ParseError("weight must be positive", lineno)
        groups = _split_tokens(m.group("rest"), kind, lineno)
        if not groups:
            blanks += count
            continue
        if count == 0:
            continue
        ballots.append((Ballot(tuple(tuple(g) for g in groups), weight), count))
    if kind is None:
        raise ParseError("missing 'kind:' header")
    if seats is None:
        raise ParseError("missing 'seats:' header")
    names = set(roster).union(*(b.as_set for b, _ in ballots)) if ballots else set(roster)
    if seats > len(names):
        raise ParseError(f"seats ({seats}) exceed candidates ({len(names)})")
    notes = (f"dropped {blanks} blank ballot(s)",) if blanks else ()
    return Election(tuple(names), tuple(ballots), kind, seats, notes)


def render_election_text(e: Election) -> str:
    out = [f"kind: {e.kind.value}", f"seats: {e.seats}"]
    used = set().union(*(b.as_set for b, m in e.ballots if m > 0))
    if set(e.candidates) - used:
        out.append("candidates: " + " ".join(e.candidates))
    for b, m in e.ballots:
        w = "" if b.weight == 1 else f"x{b.weight.numerator}/{b.weight.denominator}"
        body = " ".join(b.names) if e.kind is Kind.ORDERED else b.label()
        out.append(f"{m}{w}: {body}")
    return "\n".join(out) + "\n"


def render_election_json(e: Election) -> str:
    """Byte-stable JSON mirror of an election."""
    rows = []
    for b, m in e.ballots:
        row: dict = {"count": m}
        if b.weight != 1:
            row["weight"] = {"num": b.weight.numerator, "den": b.weight.denominator}
        row["groups"] = [list(g) for g in b.groups]
        rows.append(row)
    obj: dict = {"kind": e.kind.value, "seats": e.seats, "ballots": rows}
    used = set().union(*(b.as_set for b, m in e.ballots if m > 0))
    if set(e.candidates) - used:
        obj["candidates"] = list(e.candidates)
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def parse_election_json(source: Union[str, TextIO, Mapping]) -> Election:
    if isinstance(source, Mapping):
        obj = source
    else:
        text = source if isinstance(source, str) else source.read()
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    try:
        kind = Kind(obj["kind"])
        seats = obj["seats"]
        ballots = []
        for row in obj["ballots"]:
            w = row.get("weight", 1)
            weight = Fraction(w["num"], w["den"]) if isinstance(w, Mapping) else as_rational(w)
            groups = [list(g) for g in row["groups"]]
            if not groups:
                continue
            if kind is Kind.ORDERED:
                groups = [[c] for g in groups for c in g]
            elif kind is Kind.UNORDERED:
                groups = [[c for g in groups for c in g]]
            if row["count"] == 0:
                continue
            ballots.append((Ballot(tuple(tuple(g) for g in groups), weight), int(row["count"])))
        names = set(obj.get("candidates", ())).union(*(b.as_set for b, _ in ballots)) if ballots else set(obj.get("candidates", ()))
        return Election(tuple(names), tuple(ballots), kind, int(seats))
    except (KeyError, TypeError, DomainError) as exc:
        raise ParseError(f"malformed election JSON: {exc}") from None


def approval_tally(e: Election) -> dict[str, Fraction]:
    """Total weight of the ballots naming each candidate anywhere."""
    tally = {c: Fraction(0) for c in e.candidates}
    for b, v in e.types():
        for c in b.names:
            tally[c] += v
    return tally


def first_name_tally(e: Election) -> dict[str, Fraction]:
    """Weight counted for each member of every ballot's first group."""
    tally = {c: Fraction(0) for c in e.candidates}
    for b, v in e.types():
        for c in b.groups[0]:
            tally[c] += v
    return tally


# --------------------------------------------------------------------------
# tie policies


@dataclass(frozen=True)
class Lexicographic:
    def __str__(self) -> str:
        return "lex"


@dataclass(frozen=True)
class Seeded:
    seed: int

    def __str__(self) -> str:
        return f"seed:{self.seed}"


@dataclass(frozen=True)
class EnumerateAll:
    limit: int = 1000

    def __post_init__(self) -> None:
        if self.limit < 1:
            raise ValidationError("enumeration limit must be positive")

    def __str__(self) -> str:
        return f"all:{self.limit}"


TiePolicy = Union[Lexicographic, Seeded, EnumerateAll]


def parse_tie_policy(text: str) -> TiePolicy:
    if text == "lex":
        return Lexicographic()
    kind, _, arg = text.partition(":")
    try:
        if kind == "seed":
            return Seeded(int(arg))
        if kind == "all":
            return EnumerateAll(int(arg) if arg else 1000)
    except ValueError:
        pass
    raise ValidationError(f"bad tie policy {text!r}; use lex, seed:<n> or all:<limit>")


@dataclass(frozen=True)
class TieEvent:
    round: int
    options: tuple[str, ...]
    chosen: str


def _seeded_index(seed: int, round_index: int, options: Sequence[str]) -> int:
    ids = sorted(options)
    rng = random.Random(f"{seed}:{round_index}:{','.join(ids)}")
    return list(options).index(ids[rng.randrange(len(ids))])


def break_tie(policy: TiePolicy, tied: Iterable[str], round_index: int = 0) -> str:
    """Resolve a tie once.  EnumerateAll forks elsewhere; here it takes the first branch."""
    options = sorted(tied)
    if not options:
        raise ValidationError("cannot break a tie among no candidates")
    if isinstance(policy, Seeded):
        return options[_seeded_index(policy.seed, round_index, options)]
    return options[0]


class Chooser:
    """Tie resolver for one run of an engine.

    Engines pass the tied options in preference order, so that the first entry
    is the lexicographic choice.  Under EnumerateAll the chooser replays a fixed
    prefix of branch indices and takes branch 0 beyond it, recording how many
    branches each tie had.
    """

    def __init__(self, policy: TiePolicy, path: Sequence[int] = ()):
        self.policy = policy
        self.path = tuple(path)
        self.taken: list[int] = []
        self.widths: list[int] = []
        self.events: list[TieEvent] = []

    def pick(self, options: Sequence[str], round_index: int) -> str:
        options = tuple(options)
        if len(options) == 1:
            return options[0]
        if isinstance(self.policy, Seeded):
            idx = _seeded_index(self.policy.seed, round_index, options)
        elif isinstance(self.policy, EnumerateAll):
            pos = len(self.taken)
            idx = self.path[pos] if pos < len(self.path) else 0
            self.taken.append(idx)
            self.widths.append(len(options))
        else:
            idx = 0
        self.events.append(TieEvent(round_index, options, options[idx]))
        return options[idx]


def run_with_policy(engine: Callable[[Chooser], "Outcome"], policy: TiePolicy) -> "Outcome":
    """Run ``engine`` once, or fork it over every tie branch under EnumerateAll.

    Under EnumerateAll the returned outcome is the all-first-branches run and
    ``alternatives`` lists every distinct elected sequence found.
    """
    if not isinstance(policy, EnumerateAll):
        return engine(Chooser(policy))
    stack: list[tuple[int, ...]] = [()]
    found: dict[tuple[str, ...], Outcome] = {}
    runs = 0
    first: Outcome | None = None
    while stack:
        path = stack.pop()
        runs += 1
        if runs > policy.limit:
            raise EnumerationOverflow(policy.limit, list(found.values()))
        ch = Chooser(policy, path)
        out = engine(ch)
        if first is None:
            first = out
        found.setdefault(out.elected, out)
        for pos in range(len(ch.taken) - 1, len(path) - 1, -1):
            for alt in range(ch.widths[pos] - 1, 0, -1):
                stack.append(tuple(ch.taken[:pos]) + (alt,))
    assert first is not None
    alts = tuple(sorted(found.values(), key=lambda o: o.elected))
    return replace(first, alternatives=alts)


# --------------------------------------------------------------------------
# outcomes


@dataclass(frozen=True)
class RoundRecord:
    """One round of a sequential count.

    ``scores`` maps each eligible candidate to the figure the method maximizes
    (or minimizes, for elimination and load methods).  ``loads`` is aligned
    with the election's ballot rows and holds place numbers or loads.
    """

    index: int
    scores: Mapping[str, Fraction]
    winner: str | None
    loads: tuple[Fraction, ...] = ()
    notes: tuple[str, ...] = ()
    action: str = "elect"


@dataclass(frozen=True)
class Outcome:
    method: str
    elected: tuple[str, ...]
    ordered: bool = True
    rounds: tuple[RoundRecord, ...] = ()
    ties: tuple[TieEvent, ...] = ()
    warnings: tuple[str, ...] = ()
    alternatives: tuple["Outcome", ...] = ()
    extra: Mapping[str, object] = field(default_factory=dict)

    @property
    def committee(self) -> frozenset[str]:
        return frozenset(self.elected)

    def outcome_sets(self) -> set[frozenset[str]]:
        """Committees among the alternatives, or just this one."""
        if self.alternatives:
            return {o.committee for o in self.alternatives}
        return {self.committee}

    def seat_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.elected:
            counts[c] = counts.get(c, 0) + 1
        return counts


@dataclass(frozen=True)
class Allocation:
    """Seats per party from an apportionment or party-version count."""

    seats: Mapping[str, int]
    order: tuple[str, ...] = ()
    alternatives: tuple["Allocation", ...] = ()
    notes: tuple[str, ...] = ()

    def outcome_sets(self) -> list[dict[str, int]]:
        if self.alternatives:
            return [dict(a.seats) for a in self.alternatives]
        return [dict(self.seats)]


def iter_subsets_nonempty(n: int) -> Iterator[tuple[int, ...]]:
    for mask in range(1, 1 << n):
        yield tuple(i for i in range(n) if mask >> i & 1)
