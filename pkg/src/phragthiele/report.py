"""Text and JSON rendering of outcomes and comparison tables.

Every renderer is a pure function of its arguments, so identical inputs give
byte-identical output.  JSON writes each rational as ``{"num": .., "den": ..}``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, Sequence

from .core import Election, Outcome
from .numeric import fmt_rational

__all__ = ["to_plain", "outcome_obj", "render_report", "render_comparison"]


def to_plain(x):
    """JSON-ready copy: Fractions become {"num", "den"}, sets sorted lists."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, (set, frozenset)):
        return sorted(to_plain(v) for v in x)
    if isinstance(x, Mapping):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    return str(x)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, Mapping):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in x.items()) + "}"
    return str(x)


def outcome_obj(o: Outcome) -> dict:
    return {
        "method": o.method,
        "ordered": o.ordered,
        "elected": list(o.elected) if o.ordered else sorted(o.elected),
        "rounds": [
            {
                "index": r.index,
                "action": r.action,
                "winner": r.winner,
                "scores": to_plain(dict(sorted(r.scores.items()))),
                "loads": to_plain(list(r.loads)),
                "notes": list(r.notes),
            }
            for r in o.rounds
        ],
        "ties": [{"round": t.round, "options": list(t.options), "chosen": t.chosen} for t in o.ties],
        "warnings": list(o.warnings),
        "alternatives": [sorted(a.elected) for a in o.alternatives],
        "extra": to_plain(dict(o.extra)),
    }


def render_report(o: Outcome, fmt: str = "text", *, trace: bool = False, election: Election | None = None) -> str:
    """Render one outcome.  Text without ``trace`` lists only the elected."""
    if fmt == "json":
        return json.dumps(outcome_obj(o), indent=2, ensure_ascii=False) + "\n"
    lines = [f"method: {o.method}"]
    if o.ordered:
        lines.append("elected (in order): " + " ".join(o.elected))
    else:
        lines.append("elected (set): " + " ".join(sorted(o.elected)))
    if len(o.alternatives) > 1:
        lines.append("tied outcomes:")
        for a in o.alternatives:
            lines.append("  " + " ".join(a.elected if o.ordered else sorted(a.elected)))
    for w in o.warnings:
        lines.append(f"warning: {w}")
    if trace:
        labels = [f"{m} x {b.label()}" for b, m in election.ballots] if election is not None else []
        for r in o.rounds:
            lines.append(f"round {r.index}: {r.action} {r.winner}")
            for c, v in sorted(r.scores.items()):
                mark = " *" if c == r.winner else ""
                lines.append(f"  {c}: {fmt_rational(v)}{mark}")
            if r.loads:
                lines.append("  per ballot line:")
                for i, q in enumerate(r.loads):
                    name = labels[i] if i < len(labels) else f"line {i + 1}"
                    lines.append(f"    {name}: {fmt_rational(q)}")
            for n in r.notes:
                lines.append(f"  note: {n}")
        for t in o.ties:
            lines.append(f"tie in round {t.round}: {' '.join(t.options)} -> {t.chosen}")
        for k, v in o.extra.items():
            lines.append(f"{k}: {_fmt(v)}")
    return "\n".join(lines) + "\n"


def render_comparison(tokens: Sequence[str], outcomes: Sequence[Outcome], fmt: str = "text") -> str:
    """Seat-by-seat table.  A row is flagged when it names someone missing
    from another method's committee; order alone does not count."""
    columns = [list(o.elected) if o.ordered else sorted(o.elected) for o in outcomes]
    seats = max(len(c) for c in columns)
    committees = [frozenset(o.elected) for o in outcomes]
    same = len(set(committees)) == 1
    everyone = frozenset.intersection(*committees)
    rows = []
    for i in range(seats):
        cells = [c[i] if i < len(c) else "-" for c in columns]
        rows.append((i + 1, cells, any(x not in everyone for x in cells)))
    extra = {t: sorted(c - everyone) for t, c in zip(tokens, committees)}
    if fmt == "json":
        obj = {
            "methods": list(tokens),
            "rows": [{"seat": n, "elected": cells, "differs": d} for n, cells, d in rows],
            "committees": {t: sorted(c) for t, c in zip(tokens, committees)},
            "same_committee": same,
            "not_in_every_committee": extra,
        }
        return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    width = [max(len("seat"), len(str(seats)))] + [max(len(t), *(len(c) for c in col), 1) for t, col in zip(tokens, columns)]
    out = ["  ".join(h.ljust(w) for h, w in zip(["seat", *tokens], width)).rstrip()]
    for n, cells, d in rows:
        line = "  ".join(v.ljust(w) for v, w in zip([str(n), *cells], width)).rstrip()
        out.append(line + ("  <- differs" if d else ""))
    for t, o in zip(tokens, outcomes):
        kind = "order" if o.ordered else "set"
        out.append(f"{t} ({kind}): {' '.join(sorted(o.elected))}")
    if same:
        out.append("same committee")
    else:
        out.append("committees differ: " + ", ".join(f"{t} +{' '.join(x) or '-'}" for t, x in extra.items()))
    return "\n".join(out) + "\n"
