"""Blocking predicates and brute-force matching oracles.

``ir_set`` and ``stable_set`` are exhaustive filters over every possible
matching; they are the correctness anchors the rest of the package is tested
against, not performance features, and they fail fast beyond desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from . import kernels
from .encoding import MarketIndex
from .errors import CapacityError
from .market import FirmId, Market, Matching, WorkerId

MAX_WORKERS = 6
MAX_FIRMS = 4


@dataclass(frozen=True)
class BlockReport:
    """Every individual and pairwise block of one matching."""

    worker_blocks: frozenset[WorkerId]
    firm_blocks: frozenset[FirmId]
    pair_blocks: frozenset[tuple[FirmId, WorkerId]]

    @property
    def empty(self) -> bool:
        return not (self.worker_blocks or self.firm_blocks or self.pair_blocks)


def is_blocked_by_worker(matching: Matching, worker: WorkerId, market: Market) -> bool:
    """True iff the worker would rather be unmatched than keep her firm."""
    firm = matching.firm_of(worker)
    return firm is not None and not market.preference(worker).accepts(firm)


def is_blocked_by_firm(matching: Matching, firm: FirmId, market: Market) -> bool:
    """True iff the firm would drop part of its assigned set."""
    held = matching.workers_of(firm)
    return market.choice(firm).evaluate(held) != held


def blocking_pairs(
    matching: Matching, market: Market
) -> frozenset[tuple[FirmId, WorkerId]]:
    """Pairs (f, w) where f would hire w on top of its match and w prefers f."""
    pairs = set()
    for f in market.firms:
        held = matching.workers_of(f)
        cf = market.choice(f)
        for w in market.workers:
            if matching.firm_of(w) == f:
                continue
            if market.preference(w).rank(f) >= market.preference(w).rank(
                matching.firm_of(w)
            ):
                continue
            if w in cf.evaluate(held | {w}):
                pairs.add((f, w))
    return frozenset(pairs)


def block_report(matching: Matching, market: Market) -> BlockReport:
    return BlockReport(
        worker_blocks=frozenset(
            w for w in market.workers if is_blocked_by_worker(matching, w, market)
        ),
        firm_blocks=frozenset(
            f for f in market.firms if is_blocked_by_firm(matching, f, market)
        ),
        pair_blocks=blocking_pairs(matching, market),
    )


def is_individually_rational(matching: Matching, market: Market) -> bool:
    return not any(
        is_blocked_by_worker(matching, w, market) for w in market.workers
    ) and not any(is_blocked_by_firm(matching, f, market) for f in market.firms)


def is_stable(matching: Matching, market: Market) -> bool:
    return is_individually_rational(matching, market) and not blocking_pairs(
        matching, market
    )


def _check_bounds(market: Market, max_workers: int, max_firms: int) -> None:
    if len(market.workers) > max_workers:
        raise CapacityError(
            f"{len(market.workers)} workers exceeds the enumeration bound {max_workers}"
        )
    if len(market.firms) > max_firms:
        raise CapacityError(
            f"{len(market.firms)} firms exceeds the enumeration bound {max_firms}"
        )


def all_matchings(
    market: Market, *, max_workers: int = MAX_WORKERS, max_firms: int = MAX_FIRMS
) -> Iterator[Matching]:
    """Every function W -> F + {unmatched}, in canonical code order."""
    _check_bounds(market, max_workers, max_firms)
    idx = MarketIndex(market)
    for code in range(idx.ncodes):
        yield idx.matching_of_code(code)


def ir_set(
    market: Market, *, max_workers: int = MAX_WORKERS, max_firms: int = MAX_FIRMS
) -> list[Matching]:
    """All individually rational matchings, in canonical code order."""
    _check_bounds(market, max_workers, max_firms)
    idx = MarketIndex(market)
    ir, _ = kernels.scan_matchings(idx.pref_rank, idx.pref_len, idx.tables)
    return [idx.matching_of_code(code) for code in range(idx.ncodes) if ir[code]]


def stable_set(
    market: Market, *, max_workers: int = MAX_WORKERS, max_firms: int = MAX_FIRMS
) -> list[Matching]:
    """All stable matchings, in canonical code order."""
    _check_bounds(market, max_workers, max_firms)
    idx = MarketIndex(market)
    _, stable = kernels.scan_matchings(idx.pref_rank, idx.pref_len, idx.tables)
    return [idx.matching_of_code(code) for code in range(idx.ncodes) if stable[code]]


def matching_blair_geq(m1: Matching, m2: Matching, market: Market) -> bool:
    """True iff every firm weakly prefers its m1 set to its m2 set (Blair)."""
    from .choice import blair_geq

    return all(
        blair_geq(market.choice(f), m1.workers_of(f), m2.workers_of(f))
        for f in market.firms
    )


def matching_workers_weakly_prefer(m1: Matching, m2: Matching, market: Market) -> bool:
    """True iff every worker weakly prefers her m1 firm to her m2 firm."""
    return all(
        market.worker_prefers(w, m1.firm_of(w), m2.firm_of(w)) >= 0
        for w in market.workers
    )
