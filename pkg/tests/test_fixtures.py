import pytest

from phragthiele.core import ValidationError
from phragthiele.fixtures import FIXTURES, get_fixture, threshold_election, verify, with_full_ballots


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_expectations_hold(name):
    assert verify(get_fixture(name)) == []


def test_unknown_fixture():
    with pytest.raises(ValidationError, match="unknown fixture"):
        get_fixture("E0000")


def test_full_ballot_helper_adds_one_weighted_type():
    e = get_fixture("EfullAB").election
    big = with_full_ballots(e, 10**4)
    assert len(big.ballots) == len(e.ballots) + 1
    assert big.total_weight == e.total_weight + 10**4


def test_threshold_family_is_well_formed():
    for c in ["1", "8/7", "6/5", "4/3", "3/2"]:
        e = threshold_election(c)
        assert e.seats >= 1 and e.total_weight > 0
