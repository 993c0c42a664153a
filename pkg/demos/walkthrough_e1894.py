"""Phragmén's count on the 1894 example, round by round, with exact figures."""

from phragthiele.fixtures import get_fixture
from phragthiele.numeric import fmt_rational
from phragthiele.phragmen import phragmen_elect

e = get_fixture("E1894").election
out = phragmen_elect(e)
for r in out.rounds:
    ranked = sorted(r.scores.items(), key=lambda kv: -kv[1])
    print(f"round {r.index}: {r.winner} elected")
    for c, w in ranked:
        print(f"  {c:>2}  {fmt_rational(w)}")
print("elected:", " ".join(out.elected))
