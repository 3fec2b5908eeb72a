"""Matching games: stable rules, Nash checks, and implementation harnesses.

Two games are analyzed.  In the full game every worker submits a preference
list and every firm submits a substitutable (and, by default, consistent)
choice function; a stable rule maps the submitted profile to a stable
matching of the submitted market, and agents judge outcomes by their true
preferences and true choice functions (firms via the revealed Blair order,
where an incomparable alternative counts as a profitable deviation).  In the
workers-only game the choice profile is fixed and truthful, only preference
lists are strategic, and the rule is the firm-optimal stable rule.

The verify harnesses check, by exhaustive desk-scale enumeration, that the
equilibrium outcomes of the full game are exactly the individually rational
matchings of the true market (any stable rule), and that the equilibrium
outcomes of the workers-only game are exactly its stable matchings whenever
every choice function satisfies the law of aggregate demand.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Optional, Union

import numpy as np

from . import kernels
from .choice import (
    ChoiceFunction,
    blair_geq,
    check_consistent,
    check_lad,
    check_substitutable,
    enumerate_path_independent,
    enumerate_substitutable,
    theorem1_choice,
    _enumerated_functions,
)
from .documents import serialize_matching
from .encoding import MarketIndex, preference_arrays
from .errors import CapacityError, InputError
from .market import FirmId, Market, Matching, WorkerId, WorkerPreference
from .stability import ir_set, is_individually_rational, stable_set

FIRM_OPTIMAL = "firm-optimal"
WORKER_OPTIMAL = "worker-optimal"
LEXICOGRAPHIC = "lexicographic"
CUSTOM = "custom"

MAX_STRATEGY_FIRMS = 4


@dataclass(frozen=True)
class StableRule:
    """Selects a stable matching of every submitted market.

    The lexicographic rule picks the stable matching with the smallest
    canonical serialization; a custom selector receives the stable set (in
    canonical order) and must return one of its members.
    """

    kind: str
    selector: Optional[Callable[[list[Matching]], Matching]] = None

    def __post_init__(self):
        if self.kind not in (FIRM_OPTIMAL, WORKER_OPTIMAL, LEXICOGRAPHIC, CUSTOM):
            raise InputError(f"unknown rule kind: {self.kind!r}")
        if self.kind == CUSTOM and self.selector is None:
            raise InputError("custom rules need a selector")

    @classmethod
    def firm_optimal(cls) -> "StableRule":
        return cls(FIRM_OPTIMAL)

    @classmethod
    def worker_optimal(cls) -> "StableRule":
        return cls(WORKER_OPTIMAL)

    @classmethod
    def lexicographic(cls) -> "StableRule":
        return cls(LEXICOGRAPHIC)

    @classmethod
    def custom(cls, selector: Callable[[list[Matching]], Matching]) -> "StableRule":
        return cls(CUSTOM, selector)


@dataclass(frozen=True)
class FullGameProfile:
    """Submitted preferences for every worker and choices for every firm."""

    preferences: Mapping[WorkerId, WorkerPreference]
    choices: Mapping[FirmId, ChoiceFunction]


@dataclass(frozen=True)
class WorkersGameProfile:
    """Submitted preferences only; the true choice profile stays fixed."""

    preferences: Mapping[WorkerId, WorkerPreference]


@dataclass(frozen=True)
class NashWitness:
    """A profitable unilateral deviation; replaying it must improve the agent."""

    agent: str
    side: str  # "worker" or "firm"
    deviation: Union[WorkerPreference, ChoiceFunction]
    outcome_before: Union[Optional[FirmId], frozenset[WorkerId]]
    outcome_after: Union[Optional[FirmId], frozenset[WorkerId]]

    def describe(self) -> str:
        if self.side == "worker":
            dev = list(self.deviation.acceptable)
            return (
                f"worker {self.agent} deviates to {dev}: "
                f"{self.outcome_before} -> {self.outcome_after}"
            )
        before = "{" + ",".join(sorted(self.outcome_before)) + "}"
        after = "{" + ",".join(sorted(self.outcome_after)) + "}"
        return f"firm {self.agent} deviates: {before} -> {after} (not Blair-dominated)"


@dataclass(frozen=True)
class NashReport:
    is_equilibrium: bool
    witness: Optional[NashWitness]
    deviations_checked: int


@lru_cache(maxsize=None)
def _index_strategies(nf: int) -> tuple[tuple[int, ...], ...]:
    """Ordered firm-index selections, shortest first then lexicographic."""
    out: list[tuple[int, ...]] = []
    for k in range(nf + 1):
        out.extend(itertools.permutations(range(nf), k))
    return tuple(out)


@lru_cache(maxsize=None)
def _strategy_arrays(nf: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(order, len, rank) arrays for every worker strategy over nf firms."""
    strategies = _index_strategies(nf)
    count = len(strategies)
    order = np.full((count, max(nf, 1)), -1, dtype=np.int64)
    length = np.zeros(count, dtype=np.int64)
    rank = np.full((count, max(nf, 1)), nf + 1, dtype=np.int64)
    for s, strat in enumerate(strategies):
        length[s] = len(strat)
        for k, f in enumerate(strat):
            order[s, k] = f
            rank[s, f] = k
    return order, length, rank


def enumerate_worker_strategies(
    firms, *, max_firms: int = MAX_STRATEGY_FIRMS
) -> Iterator[WorkerPreference]:
    """Every strict ordered list over every subset of the firms.

    Canonical order: by list length, then lexicographically by firm ids.
    The count is sum over k of n!/(n-k)!.
    """
    ids = tuple(sorted(firms))
    if len(ids) > max_firms:
        raise CapacityError(
            f"{len(ids)} firms exceeds the strategy enumeration bound {max_firms}"
        )
    for strat in _index_strategies(len(ids)):
        yield WorkerPreference(tuple(ids[i] for i in strat))


@lru_cache(maxsize=None)
def _pi_table_stack(ground: tuple[str, ...], consistent: bool) -> np.ndarray:
    functions = _enumerated_functions(ground, consistent)
    return np.stack([cf.table for cf in functions])


def _deviation_functions(
    ground: tuple[str, ...], consistent: bool
) -> tuple[ChoiceFunction, ...]:
    """The firm deviation space, with the enumeration bounds enforced."""
    if consistent:
        return tuple(enumerate_path_independent(ground))
    return tuple(enumerate_substitutable(ground))


def firm_gains(
    c_true: ChoiceFunction, held, alternative
) -> bool:
    """True iff the firm truly gains by facing ``alternative`` instead.

    The submitted-game holding must Blair-dominate the deviation outcome
    (held = C_true(held u alternative)); failure of that relation, including
    incomparability, counts as a gain.
    """
    return not blair_geq(c_true, held, alternative)


class _RuleEngine:
    """Applies a rule at array level against one fixed (W, F) id frame."""

    def __init__(self, idx: MarketIndex):
        self.idx = idx
        self._serial_cache: dict[int, str] = {}

    def _serial(self, code: int) -> str:
        s = self._serial_cache.get(code)
        if s is None:
            s = serialize_matching(self.idx.matching_of_code(code))
            self._serial_cache[code] = s
        return s

    def outcome(
        self,
        rule: StableRule,
        pref_order: np.ndarray,
        pref_len: np.ndarray,
        pref_rank: np.ndarray,
        tables: np.ndarray,
    ) -> np.ndarray:
        if rule.kind == FIRM_OPTIMAL:
            return kernels.da_firm(pref_rank, pref_len, tables)
        if rule.kind == WORKER_OPTIMAL:
            return kernels.da_worker(pref_order, pref_len, tables)
        _, stable = kernels.scan_matchings(pref_rank, pref_len, tables)
        codes = [int(c) for c in np.nonzero(stable)[0]]
        if not codes:
            raise InputError("submitted market has no stable matching")
        if rule.kind == LEXICOGRAPHIC:
            best = min(codes, key=self._serial)
            return self.idx.assign_of_code(best)
        matchings = [self.idx.matching_of_code(c) for c in codes]
        picked = rule.selector(matchings)
        if picked not in matchings:
            raise InputError("custom selector returned a non-stable matching")
        return self.idx.assign_of(picked)


def apply_rule(rule: StableRule, market: Market, *, validate: bool = True) -> Matching:
    """Apply a stable rule to a (submitted) market."""
    if validate:
        from .da import _validate_choice_profile

        _validate_choice_profile(market)
    idx = MarketIndex(market)
    engine = _RuleEngine(idx)
    assign = engine.outcome(
        rule, idx.pref_order, idx.pref_len, idx.pref_rank, idx.tables
    )
    return idx.matching_of(assign)


def _true_outcome_rank(idx: MarketIndex, w: int, f: int) -> int:
    """Worker w's true rank of firm-index outcome f (-1 = unmatched)."""
    if f < 0:
        return int(idx.pref_len[w])
    r = int(idx.pref_rank[w, f])
    if r < idx.pref_len[w]:
        return r
    return int(idx.pref_len[w]) + 1


def _validate_profile(
    true_market: Market, profile: FullGameProfile, consistent: bool
) -> None:
    if set(profile.preferences) != set(true_market.workers):
        raise InputError("profile preferences must cover exactly the worker set")
    if set(profile.choices) != set(true_market.firms):
        raise InputError("profile choices must cover exactly the firm set")
    firm_set = set(true_market.firms)
    for w, pref in profile.preferences.items():
        unknown = [f for f in pref.acceptable if f not in firm_set]
        if unknown:
            raise InputError(f"submitted list of {w!r} names unknown firms: {unknown}")
    for f, cf in profile.choices.items():
        if cf.ground != true_market.workers:
            raise InputError(f"submitted choice of {f!r} has the wrong ground set")
        ok, witness = check_substitutable(cf)
        if not ok:
            raise InputError(
                f"submitted choice of {f!r} is not substitutable: {witness.describe()}"
            )
        if consistent:
            ok, witness = check_consistent(cf)
            if not ok:
                raise InputError(
                    f"submitted choice of {f!r} is not consistent: {witness.describe()}"
                )


def is_nash_full_game(
    rule: StableRule,
    true_market: Market,
    profile: FullGameProfile,
    *,
    consistent_deviations: bool = True,
) -> NashReport:
    """Exhaustive unilateral-deviation check for the full game.

    Worker deviations range over every preference list; firm deviations range
    over every substitutable-and-consistent choice function on W (set
    ``consistent_deviations=False`` to drop consistency).  The first
    profitable deviation, scanning workers then firms in id order and
    strategies in canonical order, is returned as the witness.
    """
    _validate_profile(true_market, profile, consistent_deviations)
    idx = MarketIndex(true_market)
    engine = _RuleEngine(idx)
    sub_order, sub_len, sub_rank = preference_arrays(
        [profile.preferences[w] for w in idx.workers], idx.fidx, idx.nf
    )
    sub_tables = np.stack([profile.choices[f].table for f in idx.firms])
    base = engine.outcome(rule, sub_order, sub_len, sub_rank, sub_tables)

    checked = 0
    strategies = list(enumerate_worker_strategies(idx.firms))
    s_order, s_len, s_rank = _strategy_arrays(idx.nf)
    for w in range(idx.nw):
        base_rank = _true_outcome_rank(idx, w, int(base[w]))
        saved = (sub_order[w].copy(), int(sub_len[w]), sub_rank[w].copy())
        for s in range(len(strategies)):
            sub_order[w] = s_order[s]
            sub_len[w] = s_len[s]
            sub_rank[w] = s_rank[s]
            out = engine.outcome(rule, sub_order, sub_len, sub_rank, sub_tables)
            checked += 1
            if _true_outcome_rank(idx, w, int(out[w])) < base_rank:
                witness = NashWitness(
                    agent=idx.workers[w],
                    side="worker",
                    deviation=strategies[s],
                    outcome_before=(
                        idx.firms[int(base[w])] if base[w] >= 0 else None
                    ),
                    outcome_after=(
                        idx.firms[int(out[w])] if out[w] >= 0 else None
                    ),
                )
                return NashReport(False, witness, checked)
        sub_order[w], sub_len[w], sub_rank[w] = saved

    deviations = _deviation_functions(idx.workers, consistent_deviations)
    dev_stack = _pi_table_stack(idx.workers, consistent_deviations)
    for f in range(idx.nf):
        held = 0
        for w in range(idx.nw):
            if base[w] == f:
                held |= 1 << w
        true_table = idx.tables[f]
        saved_row = sub_tables[f].copy()
        for d in range(len(deviations)):
            sub_tables[f] = dev_stack[d]
            out = engine.outcome(rule, sub_order, sub_len, sub_rank, sub_tables)
            checked += 1
            alt = 0
            for w in range(idx.nw):
                if out[w] == f:
                    alt |= 1 << w
            if int(true_table[held | alt]) != held:
                witness = NashWitness(
                    agent=idx.firms[f],
                    side="firm",
                    deviation=deviations[d],
                    outcome_before=idx.worker_set(held),
                    outcome_after=idx.worker_set(alt),
                )
                return NashReport(False, witness, checked)
        sub_tables[f] = saved_row
    return NashReport(True, None, checked)


def is_nash_workers_game(
    true_market: Market, profile: WorkersGameProfile
) -> NashReport:
    """Deviation check for the workers-only game under the firm-optimal rule."""
    if set(profile.preferences) != set(true_market.workers):
        raise InputError("profile preferences must cover exactly the worker set")
    idx = MarketIndex(true_market)
    sub_order, sub_len, sub_rank = preference_arrays(
        [profile.preferences[w] for w in idx.workers], idx.fidx, idx.nf
    )
    base = kernels.da_firm(sub_rank, sub_len, idx.tables)

    checked = 0
    strategies = list(enumerate_worker_strategies(idx.firms))
    s_order, s_len, s_rank = _strategy_arrays(idx.nf)
    for w in range(idx.nw):
        base_rank = _true_outcome_rank(idx, w, int(base[w]))
        saved = (sub_order[w].copy(), int(sub_len[w]), sub_rank[w].copy())
        for s in range(len(strategies)):
            sub_order[w] = s_order[s]
            sub_len[w] = s_len[s]
            sub_rank[w] = s_rank[s]
            out = kernels.da_firm(sub_rank, sub_len, idx.tables)
            checked += 1
            if _true_outcome_rank(idx, w, int(out[w])) < base_rank:
                witness = NashWitness(
                    agent=idx.workers[w],
                    side="worker",
                    deviation=strategies[s],
                    outcome_before=(
                        idx.firms[int(base[w])] if base[w] >= 0 else None
                    ),
                    outcome_after=(
                        idx.firms[int(out[w])] if out[w] >= 0 else None
                    ),
                )
                return NashReport(False, witness, checked)
        sub_order[w], sub_len[w], sub_rank[w] = saved
    return NashReport(True, None, checked)


def theorem1_profile(mu: Matching, true_market: Market) -> FullGameProfile:
    """The truncation-and-intersection equilibrium profile that locks in mu.

    Every worker declares only her assigned firm; every firm declares the
    choice function that picks exactly its assigned workers out of any set.
    Requires mu individually rational in the true market.
    """
    if not is_individually_rational(mu, true_market):
        raise InputError("profile construction requires an individually rational matching")
    preferences = {}
    for w in true_market.workers:
        f = mu.firm_of(w)
        preferences[w] = WorkerPreference((f,) if f is not None else ())
    choices = {
        f: theorem1_choice(mu.workers_of(f), true_market.workers)
        for f in true_market.firms
    }
    return FullGameProfile(preferences=preferences, choices=choices)


def theorem2_profile(mu: Matching) -> WorkersGameProfile:
    """Singleton truncation profile: each worker declares only her firm."""
    preferences = {
        w: WorkerPreference((f,) if f is not None else ())
        for w, f in mu.worker_side.items()
    }
    return WorkersGameProfile(preferences=preferences)


@dataclass(frozen=True)
class ClauseReport:
    ok: bool
    checked: int
    detail: str = ""


@dataclass(frozen=True)
class Theorem1Report:
    rule: str
    exhaustive: bool
    profiles_total: int
    equilibrium_count: int
    ir_count: int
    clause_i: ClauseReport
    clause_ii: ClauseReport
    outcome_set_equals_ir: Optional[bool]

    @property
    def ok(self) -> bool:
        return self.clause_i.ok and self.clause_ii.ok


def _theorem1_clause2(
    true_market: Market, rule: StableRule, *, consistent_deviations: bool = True
) -> ClauseReport:
    """Every IR matching arises from its own equilibrium profile.

    For each individually rational mu: the constructed profile is a Nash
    equilibrium under exhaustive deviations, the rule outputs mu, and mu is
    the unique stable matching of the submitted market.
    """
    idx = MarketIndex(true_market)
    checked = 0
    for mu in ir_set(true_market):
        profile = theorem1_profile(mu, true_market)
        sub_prefs = [profile.preferences[w] for w in idx.workers]
        sub_order, sub_len, sub_rank = preference_arrays(sub_prefs, idx.fidx, idx.nf)
        sub_tables = np.stack([profile.choices[f].table for f in idx.firms])
        _, stable_flags = kernels.scan_matchings(sub_rank, sub_len, sub_tables)
        stable_codes = np.nonzero(stable_flags)[0]
        mu_assign = idx.assign_of(mu)
        mu_code = idx.code_of(mu_assign)
        if stable_codes.tolist() != [mu_code]:
            return ClauseReport(
                False,
                checked,
                f"submitted market for {mu!r} has stable set "
                f"{[idx.matching_of_code(int(c)) for c in stable_codes]!r}, not {{mu}}",
            )
        engine = _RuleEngine(idx)
        out = engine.outcome(rule, sub_order, sub_len, sub_rank, sub_tables)
        if idx.code_of(out) != mu_code:
            return ClauseReport(
                False, checked, f"rule output {idx.matching_of(out)!r} != {mu!r}"
            )
        report = is_nash_full_game(
            rule, true_market, profile, consistent_deviations=consistent_deviations
        )
        checked += 1
        if not report.is_equilibrium:
            return ClauseReport(
                False,
                checked,
                f"profile for {mu!r} is not an equilibrium: "
                f"{report.witness.describe()}",
            )
    return ClauseReport(True, checked)


def verify_theorem1(
    true_market: Market,
    rule: StableRule,
    *,
    max_exhaustive_profiles: int = 1_000_000,
    sample_size: int = 200,
    seed: int = 0,
    consistent_deviations: bool = True,
) -> Theorem1Report:
    """Check that the full game implements the individually rational set.

    Clause (i): every Nash profile maps to an IR matching of the true market
    (exhaustive over the whole profile space when it has at most
    ``max_exhaustive_profiles`` profiles, otherwise a seeded profile sample).
    Clause (ii): every IR matching is the outcome of its own equilibrium
    profile.
    """
    idx = MarketIndex(true_market)
    strategies = list(enumerate_worker_strategies(idx.firms))
    n_strats = len(strategies)
    functions = _deviation_functions(idx.workers, consistent_deviations)
    n_funcs = len(functions)
    total = n_strats ** idx.nw * n_funcs ** idx.nf
    ir_flags, _ = kernels.scan_matchings(idx.pref_rank, idx.pref_len, idx.tables)
    ir_codes = {int(c) for c in np.nonzero(ir_flags)[0]}

    exhaustive = total <= max_exhaustive_profiles
    if exhaustive:
        clause_i, eq_count, outcome_codes = _theorem1_clause1_exhaustive(
            idx, rule, n_strats, n_funcs, ir_codes, consistent_deviations
        )
        outcome_eq_ir = outcome_codes == ir_codes if clause_i.ok else None
    else:
        clause_i, eq_count = _theorem1_clause1_sampled(
            true_market,
            idx,
            rule,
            strategies,
            functions,
            ir_codes,
            sample_size,
            seed,
            consistent_deviations,
        )
        outcome_eq_ir = None
    clause_ii = _theorem1_clause2(
        true_market, rule, consistent_deviations=consistent_deviations
    )
    return Theorem1Report(
        rule=rule.kind,
        exhaustive=exhaustive,
        profiles_total=total if exhaustive else sample_size,
        equilibrium_count=eq_count,
        ir_count=len(ir_codes),
        clause_i=clause_i,
        clause_ii=clause_ii,
        outcome_set_equals_ir=outcome_eq_ir,
    )


def _theorem1_clause1_exhaustive(
    idx: MarketIndex,
    rule: StableRule,
    n_strats: int,
    n_funcs: int,
    ir_codes: set[int],
    consistent: bool,
) -> tuple[ClauseReport, int, set[int]]:
    nw, nf = idx.nw, idx.nf
    s_order, s_len, s_rank = _strategy_arrays(nf)
    pi_stack = _pi_table_stack(idx.workers, consistent)
    engine = _RuleEngine(idx)
    n_wp = n_strats**nw
    n_fp = n_funcs**nf
    outcomes = np.empty((n_wp * n_fp, nw), dtype=np.int64)
    pref_order = np.empty((nw, max(nf, 1)), dtype=np.int64)
    pref_len = np.empty(nw, dtype=np.int64)
    pref_rank = np.empty((nw, max(nf, 1)), dtype=np.int64)
    tables = np.empty((nf, 1 << nw), dtype=np.int64)
    for p in range(n_wp * n_fp):
        c = p
        for w in range(nw):
            s = c % n_strats
            c //= n_strats
            pref_order[w] = s_order[s]
            pref_len[w] = s_len[s]
            pref_rank[w] = s_rank[s]
        for f in range(nf):
            tables[f] = pi_stack[c % n_funcs]
            c //= n_funcs
        outcomes[p] = engine.outcome(rule, pref_order, pref_len, pref_rank, tables)

    eq_count = 0
    outcome_codes: set[int] = set()
    w_strides = [n_strats**w for w in range(nw)]
    f_strides = [n_wp * n_funcs**f for f in range(nf)]
    for p in range(n_wp * n_fp):
        base = outcomes[p]
        nash = True
        c = p
        for w in range(nw):
            digit = c % n_strats
            c //= n_strats
            base_rank = _true_outcome_rank(idx, w, int(base[w]))
            stride = w_strides[w]
            for s in range(n_strats):
                if s == digit:
                    continue
                q = p + (s - digit) * stride
                if _true_outcome_rank(idx, w, int(outcomes[q, w])) < base_rank:
                    nash = False
                    break
            if not nash:
                break
        if nash:
            for f in range(nf):
                digit = c % n_funcs
                c //= n_funcs
                held = 0
                for w in range(nw):
                    if base[w] == f:
                        held |= 1 << w
                true_table = idx.tables[f]
                stride = f_strides[f]
                for d in range(n_funcs):
                    if d == digit:
                        continue
                    q = p + (d - digit) * stride
                    alt = 0
                    for w in range(nw):
                        if outcomes[q, w] == f:
                            alt |= 1 << w
                    if int(true_table[held | alt]) != held:
                        nash = False
                        break
                if not nash:
                    break
        if nash:
            eq_count += 1
            code = idx.code_of(base)
            outcome_codes.add(code)
            if code not in ir_codes:
                return (
                    ClauseReport(
                        False,
                        p + 1,
                        f"equilibrium profile #{p} maps to "
                        f"{idx.matching_of_code(code)!r}, which is not IR",
                    ),
                    eq_count,
                    outcome_codes,
                )
    return ClauseReport(True, n_wp * n_fp), eq_count, outcome_codes


def _theorem1_clause1_sampled(
    true_market: Market,
    idx: MarketIndex,
    rule: StableRule,
    strategies: list[WorkerPreference],
    functions: tuple[ChoiceFunction, ...],
    ir_codes: set[int],
    sample_size: int,
    seed: int,
    consistent: bool,
) -> tuple[ClauseReport, int]:
    rng = random.Random(seed)
    eq_count = 0
    for i in range(sample_size):
        profile = FullGameProfile(
            preferences={
                w: strategies[rng.randrange(len(strategies))] for w in idx.workers
            },
            choices={
                f: functions[rng.randrange(len(functions))] for f in idx.firms
            },
        )
        report = is_nash_full_game(
            rule, true_market, profile, consistent_deviations=consistent
        )
        if report.is_equilibrium:
            eq_count += 1
            submitted = Market(
                idx.workers, idx.firms, profile.preferences, profile.choices
            )
            outcome = apply_rule(rule, submitted, validate=False)
            if idx.code_of(idx.assign_of(outcome)) not in ir_codes:
                return (
                    ClauseReport(
                        False,
                        i + 1,
                        f"sampled equilibrium maps to {outcome!r}, which is not IR",
                    ),
                    eq_count,
                )
    return ClauseReport(True, sample_size), eq_count


@dataclass(frozen=True)
class Theorem2Report:
    profiles_total: int
    equilibrium_count: int
    stable_count: int
    clause_i: ClauseReport
    clause_ii: ClauseReport
    outcome_set_equals_stable: bool

    @property
    def ok(self) -> bool:
        return (
            self.clause_i.ok and self.clause_ii.ok and self.outcome_set_equals_stable
        )


def verify_theorem2(
    true_market: Market, *, max_firms: int = 3
) -> Theorem2Report:
    """Check that the workers-only game implements the stable set.

    Requires every true choice function to satisfy the law of aggregate
    demand.  Clause (i): every Nash profile maps under the firm-optimal rule
    to a stable matching of the true market; clause (ii): every stable
    matching arises from its own truncation equilibrium and is the unique
    stable matching of the submitted market.  The equilibrium outcome set
    must equal the stable set exactly.
    """
    for f in true_market.firms:
        ok, witness = check_lad(true_market.choice(f))
        if not ok:
            raise InputError(
                f"choice function of {f!r} violates LAD: {witness.describe()}"
            )
    if len(true_market.firms) > max_firms:
        raise CapacityError(
            f"{len(true_market.firms)} firms exceeds the exhaustive bound {max_firms}"
        )
    idx = MarketIndex(true_market)
    s_order, s_len, s_rank = _strategy_arrays(idx.nf)
    n_strats = s_rank.shape[0]
    outcomes = kernels.fill_firm_optimal(s_rank, s_len, idx.tables, idx.nw)
    nash = kernels.nash_scan_workers(outcomes, idx.pref_rank, idx.pref_len, n_strats)
    _, stable_flags = kernels.scan_matchings(idx.pref_rank, idx.pref_len, idx.tables)
    stable_codes = {int(c) for c in np.nonzero(stable_flags)[0]}

    n_profiles = outcomes.shape[0]
    powers = (idx.nf + 1) ** np.arange(idx.nw, dtype=np.int64)
    all_codes = (outcomes + 1) @ powers
    nash_idx = np.nonzero(nash)[0]
    eq_codes = {int(all_codes[p]) for p in nash_idx}
    clause_i = ClauseReport(True, int(len(nash_idx)))
    bad = eq_codes - stable_codes
    if bad:
        code = min(bad)
        clause_i = ClauseReport(
            False,
            int(len(nash_idx)),
            f"equilibrium outcome {idx.matching_of_code(code)!r} is not stable",
        )

    strategy_index = {strat: s for s, strat in enumerate(_index_strategies(idx.nf))}
    clause_ii = ClauseReport(True, len(stable_codes))
    for code in sorted(stable_codes):
        assign = idx.assign_of_code(code)
        digits = [
            strategy_index[(int(f),)] if f >= 0 else strategy_index[()]
            for f in assign
        ]
        p = 0
        for w in range(idx.nw - 1, -1, -1):
            p = p * n_strats + digits[w]
        if not nash[p]:
            clause_ii = ClauseReport(
                False,
                len(stable_codes),
                f"truncation profile for {idx.matching_of_code(code)!r} "
                f"is not an equilibrium",
            )
            break
        if int(all_codes[p]) != code:
            clause_ii = ClauseReport(
                False,
                len(stable_codes),
                f"truncation profile for {idx.matching_of_code(code)!r} "
                f"does not reproduce it",
            )
            break
        trunc_rank = np.stack([s_rank[d] for d in digits])
        trunc_len = np.array([s_len[d] for d in digits], dtype=np.int64)
        _, sub_stable = kernels.scan_matchings(trunc_rank, trunc_len, idx.tables)
        if np.nonzero(sub_stable)[0].tolist() != [code]:
            clause_ii = ClauseReport(
                False,
                len(stable_codes),
                f"submitted market for {idx.matching_of_code(code)!r} does not "
                f"have it as the unique stable matching",
            )
            break
    return Theorem2Report(
        profiles_total=n_profiles,
        equilibrium_count=int(len(nash_idx)),
        stable_count=len(stable_codes),
        clause_i=clause_i,
        clause_ii=clause_ii,
        outcome_set_equals_stable=eq_codes == stable_codes,
    )


@dataclass(frozen=True)
class RuralWitness:
    """An agent matched to differently sized sets in two stable matchings."""

    agent: str
    count_a: int
    count_b: int
    matching_a: Matching
    matching_b: Matching


def rural_hospital_check(market: Market) -> tuple[bool, Optional[RuralWitness]]:
    """Equal partner counts for every agent across the whole stable set.

    Requires every choice function to satisfy the law of aggregate demand;
    the property is guaranteed there and can fail without it.
    """
    for f in market.firms:
        ok, witness = check_lad(market.choice(f))
        if not ok:
            raise InputError(
                f"choice function of {f!r} violates LAD: {witness.describe()}"
            )
    matchings = stable_set(market)
    if len(matchings) <= 1:
        return True, None
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
                return False, RuralWitness(agent, c0, c1, first, other)
    return True, None
