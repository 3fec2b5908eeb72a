"""Seeded counterexample searches.

Two targets: a substitutable-but-non-LAD market where stable matchings give
some agent different partner counts (refuting the equal-counts property once
LAD is dropped), and the exploratory hunt for a firms-only game whose
equilibrium outcome is unstable under the truth (the workers-only
implementation result has no firms-only analogue).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .choice import ChoiceFunction, _enumerated_functions
from .encoding import MarketIndex
from .errors import InputError
from .games import RuralWitness
from .generate import PATH_INDEPENDENT, random_market
from .market import Market
from .stability import stable_set


@dataclass(frozen=True)
class RuralSearchResult:
    market: Market
    market_seed: int
    trials: int
    witness: RuralWitness


def search_non_lad_rural_violation(
    seed: int, budget: int, *, n_workers: int = 3, n_firms: int = 2
) -> Optional[RuralSearchResult]:
    """Hunt for a non-LAD market with unequal partner counts across stable
    matchings; returns None when the budget is exhausted."""
    rng = random.Random(seed)
    for trial in range(budget):
        market_seed = rng.randrange(2**32)
        market = random_market(market_seed, n_workers, n_firms, PATH_INDEPENDENT)
        if all(market.choice(f).satisfies_lad() for f in market.firms):
            continue
        matchings = stable_set(market)
        if len(matchings) < 2:
            continue
        first = matchings[0]
        for agent in list(market.workers) + list(market.firms):
            if agent in market.preferences:
                count = lambda m: 0 if m.firm_of(agent) is None else 1
            else:
                count = lambda m: len(m.workers_of(agent))
            c0 = count(first)
            for other in matchings[1:]:
                c1 = count(other)
                if c1 != c0:
                    return RuralSearchResult(
                        market=market,
                        market_seed=market_seed,
                        trials=trial + 1,
                        witness=RuralWitness(agent, c0, c1, first, other),
                    )
    return None


@dataclass(frozen=True)
class FirmsGameSearchResult:
    market: Market
    market_seed: int
    trials: int
    profile: dict[str, ChoiceFunction]
    outcome: "object"


def search_firms_strategic_stable_failure(
    seed: int, budget: int, *, n_workers: int = 3, n_firms: int = 3
) -> Optional[FirmsGameSearchResult]:
    """Hunt for a firms-only game equilibrium with an unstable outcome.

    Workers report truthfully; firms submit any substitutable-and-consistent
    choice function; the rule is firm-optimal on the submitted market.  A hit
    is an equilibrium profile whose outcome is not stable under the truth.
    Best-effort and exploratory.
    """
    if n_workers > 4:
        raise InputError("firms-only search is bounded at 4 workers")
    rng = random.Random(seed)
    for trial in range(budget):
        market_seed = rng.randrange(2**32)
        market = random_market(market_seed, n_workers, n_firms, PATH_INDEPENDENT)
        idx = MarketIndex(market)
        functions = _enumerated_functions(idx.workers, True)
        stack = np.stack([cf.table for cf in functions])
        n_funcs = len(functions)
        _, stable_flags = kernels.scan_matchings(
            idx.pref_rank, idx.pref_len, idx.tables
        )
        stable_codes = {int(c) for c in np.nonzero(stable_flags)[0]}

        n_profiles = n_funcs**idx.nf
        outcomes = np.empty((n_profiles, idx.nw), dtype=np.int64)
        tables = np.empty_like(idx.tables)
        for p in range(n_profiles):
            c = p
            for f in range(idx.nf):
                tables[f] = stack[c % n_funcs]
                c //= n_funcs
            outcomes[p] = kernels.da_firm(idx.pref_rank, idx.pref_len, tables)
        for p in range(n_profiles):
            code = idx.code_of(outcomes[p])
            if code in stable_codes:
                continue
            # only unstable outcomes are interesting; check equilibrium
            base = outcomes[p]
            nash = True
            c = p
            for f in range(idx.nf):
                digit = c % n_funcs
                c //= n_funcs
                held = 0
                for w in range(idx.nw):
                    if base[w] == f:
                        held |= 1 << w
                stride = n_funcs**f
                true_table = idx.tables[f]
                for d in range(n_funcs):
                    if d == digit:
                        continue
                    q = p + (d - digit) * stride
                    alt = 0
                    for w in range(idx.nw):
                        if outcomes[q, w] == f:
                            alt |= 1 << w
                    if int(true_table[held | alt]) != held:
                        nash = False
                        break
                if not nash:
                    break
            if nash:
                c = p
                profile = {}
                for f in range(idx.nf):
                    profile[idx.firms[f]] = functions[c % n_funcs]
                    c //= n_funcs
                return FirmsGameSearchResult(
                    market=market,
                    market_seed=market_seed,
                    trials=trial + 1,
                    profile=profile,
                    outcome=idx.matching_of_code(code),
                )
    return None
