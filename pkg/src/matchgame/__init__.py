"""Many-to-one matching markets with substitutable choice functions.

Stability oracles, deferred acceptance in both orientations, and an
exhaustive game-analysis layer that verifies two Nash-implementation
properties at desk scale: stable rules implement the individually rational
set when all agents are strategic, and the firm-optimal stable rule
implements the stable set when only workers are strategic and firms' choice
functions satisfy the law of aggregate demand.
"""

from .backend import active_backend
from .choice import (
    ChoiceFunction,
    ChoiceWitness,
    blair_geq,
    check_all,
    check_consistent,
    check_lad,
    check_path_independent,
    check_substitutable,
    choice_from_rule,
    choice_from_table,
    enumerate_path_independent,
    enumerate_substitutable,
    responsive_choice,
    theorem1_choice,
)
from .da import DARound, DATrace, da_firm_proposing, da_worker_proposing
from .documents import (
    DocumentError,
    emit_market,
    parse_market,
    serialize_matching,
)
from .errors import CapacityError, InputError, MatchgameError
from .games import (
    FullGameProfile,
    NashReport,
    NashWitness,
    StableRule,
    Theorem1Report,
    Theorem2Report,
    WorkersGameProfile,
    apply_rule,
    enumerate_worker_strategies,
    firm_gains,
    is_nash_full_game,
    is_nash_workers_game,
    rural_hospital_check,
    theorem1_profile,
    theorem2_profile,
    verify_theorem1,
    verify_theorem2,
)
from .generate import random_market
from .market import (
    Market,
    Matching,
    MatchingValidation,
    WorkerPreference,
    validate_matching,
    worker_prefers,
)
from .search import (
    search_firms_strategic_stable_failure,
    search_non_lad_rural_violation,
)
from .stability import (
    BlockReport,
    all_matchings,
    block_report,
    blocking_pairs,
    ir_set,
    is_blocked_by_firm,
    is_blocked_by_worker,
    is_individually_rational,
    is_stable,
    matching_blair_geq,
    matching_workers_weakly_prefer,
    stable_set,
)

__version__ = "0.1.0"

__all__ = [
    "BlockReport",
    "CapacityError",
    "ChoiceFunction",
    "ChoiceWitness",
    "DARound",
    "DATrace",
    "DocumentError",
    "FullGameProfile",
    "InputError",
    "Market",
    "MatchgameError",
    "Matching",
    "MatchingValidation",
    "NashReport",
    "NashWitness",
    "StableRule",
    "Theorem1Report",
    "Theorem2Report",
    "WorkerPreference",
    "WorkersGameProfile",
    "active_backend",
    "all_matchings",
    "apply_rule",
    "blair_geq",
    "block_report",
    "blocking_pairs",
    "check_all",
    "check_consistent",
    "check_lad",
    "check_path_independent",
    "check_substitutable",
    "choice_from_rule",
    "choice_from_table",
    "da_firm_proposing",
    "da_worker_proposing",
    "emit_market",
    "enumerate_path_independent",
    "enumerate_substitutable",
    "enumerate_worker_strategies",
    "firm_gains",
    "ir_set",
    "is_blocked_by_firm",
    "is_blocked_by_worker",
    "is_individually_rational",
    "is_nash_full_game",
    "is_nash_workers_game",
    "is_stable",
    "matching_blair_geq",
    "matching_workers_weakly_prefer",
    "parse_market",
    "random_market",
    "responsive_choice",
    "rural_hospital_check",
    "search_firms_strategic_stable_failure",
    "search_non_lad_rural_violation",
    "serialize_matching",
    "stable_set",
    "theorem1_choice",
    "theorem1_profile",
    "theorem2_profile",
    "validate_matching",
    "verify_theorem1",
    "verify_theorem2",
    "worker_prefers",
]
