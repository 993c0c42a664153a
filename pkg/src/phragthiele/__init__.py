"""Exact multiwinner election counts in the Phragmén and Thiele families."""

from .audit import AuditReport, RepresentationCriterion, check_representation, scan_property
from .core import (
    Allocation,
    Ballot,
    Election,
    EnumerateAll,
    Kind,
    Lexicographic,
    Outcome,
    Seeded,
    approval_tally,
    election,
    first_name_tally,
    parse_election,
    parse_election_json,
    render_election_json,
    render_election_text,
)
from .methods import parse_method
from .numeric import RoundingPolicy, make_rational, truncate_2dec
from .phragmen import (
    phragmen_elect,
    phragmen_elect_by_power,
    phragmen_elect_grouped,
    phragmen_party_elect,
    ranking_plus_thiele,
    ranking_rule,
    recursive_alliance_elect,
)
from .reference import QuotaSpec, TransferPolicy, divisor_method, quota_method, simple_elect, stv_elect, stv_quota_from_phragmen
from .thiele import PROPORTIONAL, STRONG, WEAK, SatisfactionFunction, satisfaction, thiele_addition, thiele_elimination, thiele_opt, thiele_ordered
from .variants import OptCombo, enestrom_elect, limit_method_elect, opt_load_elect

__version__ = "0.1.0"
