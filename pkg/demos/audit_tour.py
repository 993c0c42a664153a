"""Property scans that find the known failures, each replayed from its witness."""

from phragthiele.audit import (
    CandidateMonotonicity,
    Consistency,
    FullBallotInvariance,
    HouseMonotonicity,
    replay_witness,
    scan_property,
)
from phragthiele.fixtures import get_fixture


def fx(name):
    return get_fixture(name).election


scans = [
    ("thiele-opt", fx("ETh"), HouseMonotonicity(3)),
    ("phragmen", None, Consistency(fx("Econs-u-1"), fx("Econs-u-2"))),
    ("phragmen", fx("EfullABC"), FullBallotInvariance(10)),
    ("thiele-ordered", fx("E-monoTh-b"), CandidateMonotonicity(200)),
    ("phragmen", None, CandidateMonotonicity(200)),
]
for method, subject, prop in scans:
    rep = scan_property(method, subject, prop, seed=1)
    replays = sum(replay_witness(method, w) for w in rep.witnesses)
    print(rep.summary().splitlines()[0], f"({len(rep.witnesses)} witnesses, {replays} replayed)")
