"""Command-line front end.

    phragthiele tally --method phragmen --trace fixtures:E1894
    phragthiele compare --methods phragmen,thiele-add fixtures:E1913.5
    phragthiele audit --method thiele-opt --check house:3 fixtures:ETh
    phragthiele fixtures list

Exit status: 0 success, 1 audit or fixture verification found a failure,
2 invalid input or usage, 3 search budget or tie enumeration overflow.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .audit import (
    CandidateMonotonicity,
    Consistency,
    FullBallotInvariance,
    HouseMonotonicity,
    PartyListReduction,
    check_representation,
    parse_criterion,
    random_election,
    scan_property,
)
from .core import (
    BudgetExceeded,
    Election,
    EnumerationOverflow,
    Kind,
    ValidationError,
    parse_election,
    parse_election_json,
    parse_tie_policy,
    render_election_json,
    render_election_text,
)
from .fixtures import FIXTURES, get_fixture, verify
from .methods import MethodSpec, parse_method, split_method_list
from .numeric import DomainError, RoundingPolicy
from .report import render_comparison, render_report
from .thiele import DEFAULT_BUDGET, parse_satisfaction
from .variants import parse_combo

__all__ = ["main", "run", "load_election"]


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 2 via our handler, not SystemExit from deep inside
        raise UsageError(f"{self.prog}: {message}")


def load_election(source: str, stdin: TextIO | None = None) -> Election:
    """Read ``-`` (standard input), ``fixtures:NAME`` or a file path; JSON is detected by a leading brace."""
    if source.startswith("fixtures:"):
        return get_fixture(source.split(":", 1)[1]).election
    if source == "-":
        text = (stdin or sys.stdin).read()
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read {source}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        return parse_election_json(text)
    return parse_election(text)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seats", type=int, help="override the seats header")
    p.add_argument("--tie", default="lex", help="lex | seed:<n> | all:<limit>")
    p.add_argument("--rounding", default="exact", choices=["exact", "law2dec"])
    p.add_argument("--f", default="prop", help="prop | strong | weak | custom:w1,w2,...[,repeat-last]")
    p.add_argument("--opt-combo", default="a2,b2,c2", help="a1|a2,b1|b2,c1|c2 for the opt-load method")
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.add_argument("--max-names", type=int, help="reject ballots naming more candidates than this")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search budget for set-valued methods")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phragthiele", description="Exact Phragmén and Thiele election counts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tally", help="run one method")
    t.add_argument("--method", required=True, help="method token, e.g. phragmen, thiele-opt, stv:wig:order=elect, dhondt")
    t.add_argument("--trace", action="store_true", help="print every round")
    _common(t)
    t.add_argument("election")

    c = sub.add_parser("compare", help="run several methods and show where they differ")
    c.add_argument("--methods", required=True, help="comma-separated method list")
    _common(c)
    c.add_argument("election")

    a = sub.add_parser("audit", help="check a criterion or property")
    a.add_argument("--method", required=True)
    a.add_argument(
        "--check",
        required=True,
        help="jr | pjr[:l] | ejr[:l] | phpc[:l] | house[:smax] | monotonicity[:trials] | "
        "full-ballots[:n] | party-lists[:trials] | consistency",
    )
    a.add_argument("--seed", type=int, default=0)
    _common(a)
    a.add_argument(
        "election",
        nargs="*",
        help="election (two for consistency, none for party-lists); random:unordered or random:ordered for generated ones",
    )

    f = sub.add_parser("fixtures", help="list, export or verify the built-in examples")
    f.add_argument("action", choices=["list", "export", "verify"])
    f.add_argument("names", nargs="*")
    f.add_argument("--format", default="text", choices=["text", "json"])
    return p


def _prepare(e: Election, args) -> Election:
    if args.seats is not None:
        e = e.with_seats(args.seats)
    if args.max_names is not None:
        bad = [b.label() for b, m in e.ballots if m > 0 and len(b.names) > args.max_names]
        if bad:
            raise ValidationError(f"ballots name more than {args.max_names} candidates: {'; '.join(bad)}")
    return e


def _method(token: str, args) -> MethodSpec:
    return parse_method(
        token,
        f=parse_satisfaction(args.f),
        combo=parse_combo(args.opt_combo),
        rounding=RoundingPolicy(args.rounding),
        budget=args.budget,
    )


def _tally(args, out: TextIO, stdin) -> int:
    policy = parse_tie_policy(args.tie)
    m = _method(args.method, args)
    e = _prepare(load_election(args.election, stdin), args)
    o = m.run(e, policy)
    out.write(render_report(o, args.format, trace=args.trace, election=e))
    return 0


def _compare(args, out: TextIO, stdin) -> int:
    tokens = split_method_list(args.methods)
    if len(tokens) < 2:
        raise ValidationError("compare needs at least two methods")
    policy = parse_tie_policy(args.tie)
    specs = [_method(t, args) for t in tokens]
    e = _prepare(load_election(args.election, stdin), args)
    outcomes = [m.run(e, policy) for m in specs]
    out.write(render_comparison(tokens, outcomes, args.format))
    return 0


def _subject(source: str, args, stdin):
    if source.startswith("random:"):
        kind = Kind(source.split(":", 1)[1])
        return lambda rng: random_election(rng, kind)
    return _prepare(load_election(source, stdin), args)


def _audit(args, out: TextIO, stdin) -> int:
    m = _method(args.method, args)
    policy = parse_tie_policy(args.tie) if args.tie != "lex" else None
    name, _, arg = args.check.partition(":")
    name = name.lower()
    num = int(arg) if arg else None
    sources = args.election
    if name == "consistency":
        if len(sources) != 2:
            raise ValidationError("consistency needs exactly two elections")
        e1, e2 = (_prepare(load_election(s, stdin), args) for s in sources)
        report = scan_property(m, None, Consistency(e1, e2), seed=args.seed, policy=policy)
    elif name == "party-lists":
        if sources:
            raise ValidationError("party-lists generates its own elections")
        report = scan_property(m, None, PartyListReduction(num or 200), seed=args.seed, policy=policy)
    else:
        if len(sources) != 1:
            raise ValidationError(f"{name} takes one election")
        subject = _subject(sources[0], args, stdin)
        if name in {"jr", "pjr", "ejr", "phpc"}:
            if callable(subject):
                raise ValidationError("representation checks need a concrete election")
            committee = m.run(subject, parse_tie_policy(args.tie)).elected
            report = check_representation(subject, committee, parse_criterion(args.check))
        elif name == "house":
            report = scan_property(m, subject, HouseMonotonicity(num or 5, trials=100), seed=args.seed, policy=policy)
        elif name == "monotonicity":
            report = scan_property(m, subject, CandidateMonotonicity(num or 200), seed=args.seed, policy=policy)
        elif name == "full-ballots":
            report = scan_property(m, subject, FullBallotInvariance(num or 10, trials=100), seed=args.seed)
        else:
            raise ValidationError(f"unknown check {args.check!r}")
    out.write(report.to_json() if args.format == "json" else report.summary())
    return 0 if report.passed else 1


def _fixtures(args, out: TextIO) -> int:
    names = args.names or list(FIXTURES)
    if args.action == "list":
        width = max(len(n) for n in names)
        for n in names:
            fx = get_fixture(n)
            out.write(f"{n.ljust(width)}  {fx.election.kind.value:<9}  s={fx.election.seats}  {fx.summary}\n")
        return 0
    if args.action == "export":
        if not args.names:
            raise ValidationError("export needs at least one fixture name")
        for n in names:
            e = get_fixture(n).election
            out.write(render_election_json(e) if args.format == "json" else f"# {n}\n" + render_election_text(e))
        return 0
    failures = 0
    for n in names:
        problems = verify(get_fixture(n))
        failures += len(problems)
        out.write(f"{n}: {'ok' if not problems else 'MISMATCH'}\n")
        for p in problems:
            out.write(f"  {p}\n")
    return 0 if failures == 0 else 1


def run(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None, stdin: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
        if args.command == "tally":
            return _tally(args, out, stdin)
        if args.command == "compare":
            return _compare(args, out, stdin)
        if args.command == "audit":
            return _audit(args, out, stdin)
        return _fixtures(args, out)
    except (BudgetExceeded, EnumerationOverflow) as exc:
        err.write(f"error: {exc}\n")
        return 3
    except (ValidationError, DomainError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
