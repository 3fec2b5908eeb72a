"""Deferred acceptance under substitutable choice functions, both orientations.

Rounds are simultaneous: every free worker proposes (or every firm offers) in
the same round, and all responses are processed together.  The optional
sequential mode lets one proposer move per round; the outcome is the same and
is asserted as a property in the test suite.  Traces are off by default
because exhaustive game analysis calls these routines millions of times.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import kernels
from .choice import check_consistent, check_substitutable
from .encoding import MarketIndex
from .errors import InputError
from .market import FirmId, Market, Matching, WorkerId


@dataclass(frozen=True)
class DARound:
    """One simultaneous round: per-firm proposal/offer, holding, rejection sets."""

    proposals: dict[FirmId, frozenset[WorkerId]]
    holdings: dict[FirmId, frozenset[WorkerId]]
    rejections: dict[FirmId, frozenset[WorkerId]]


@dataclass(frozen=True)
class DATrace:
    side: str  # "worker" or "firm"
    rounds: tuple[DARound, ...]

    def final_holdings(self) -> dict[FirmId, frozenset[WorkerId]]:
        return dict(self.rounds[-1].holdings) if self.rounds else {}


def _validate_choice_profile(market: Market) -> None:
    for f in market.firms:
        cf = market.choice(f)
        ok, witness = check_substitutable(cf)
        if not ok:
            raise InputError(
                f"choice function of {f!r} is not substitutable: {witness.describe()}"
            )
        ok, witness = check_consistent(cf)
        if not ok:
            raise InputError(
                f"choice function of {f!r} is not consistent: {witness.describe()}"
            )


def da_worker_proposing(
    market: Market,
    *,
    trace: bool = False,
    sequential: bool = False,
    validate: bool = True,
) -> Union[Matching, tuple[Matching, DATrace]]:
    """Worker-proposing deferred acceptance.

    Each free worker with untried acceptable firms proposes to her best
    untried firm; each firm keeps its choice out of current holdings plus new
    proposals, freeing the rest.  The output is the worker-optimal stable
    matching of the submitted market.
    """
    if validate:
        _validate_choice_profile(market)
    idx = MarketIndex(market)
    if not trace and not sequential:
        assign = kernels.da_worker(idx.pref_order, idx.pref_len, idx.tables)
        return idx.matching_of(assign)

    ptr = [0] * idx.nw
    held_by = [-1] * idx.nw
    hold = [0] * idx.nf
    rounds: list[DARound] = []
    while True:
        props = [0] * idx.nf
        proposers = [
            w
            for w in range(idx.nw)
            if held_by[w] == -1 and ptr[w] < idx.pref_len[w]
        ]
        if sequential:
            proposers = proposers[:1]
        if not proposers:
            break
        for w in proposers:
            f = int(idx.pref_order[w, ptr[w]])
            ptr[w] += 1
            props[f] |= 1 << w
        rejections = [0] * idx.nf
        for f in range(idx.nf):
            if props[f]:
                pool = hold[f] | props[f]
                chosen = int(idx.tables[f, pool])
                rejections[f] = pool & ~chosen
                for w in range(idx.nw):
                    if rejections[f] >> w & 1:
                        held_by[w] = -1
                    elif chosen >> w & 1:
                        held_by[w] = f
                hold[f] = chosen
        if trace:
            rounds.append(
                DARound(
                    proposals={
                        idx.firms[f]: idx.worker_set(props[f]) for f in range(idx.nf)
                    },
                    holdings={
                        idx.firms[f]: idx.worker_set(hold[f]) for f in range(idx.nf)
                    },
                    rejections={
                        idx.firms[f]: idx.worker_set(rejections[f])
                        for f in range(idx.nf)
                    },
                )
            )
    matching = idx.matching_of(held_by)
    if trace:
        return matching, DATrace(side="worker", rounds=tuple(rounds))
    return matching


def da_firm_proposing(
    market: Market,
    *,
    trace: bool = False,
    validate: bool = True,
) -> Union[Matching, tuple[Matching, DATrace]]:
    """Firm-proposing deferred acceptance.

    Each firm offers to its choice out of the workers that have not rejected
    it; each worker holds the best acceptable offer and rejects the rest.
    The output is the firm-optimal stable matching of the submitted market.
    """
    if validate:
        _validate_choice_profile(market)
    idx = MarketIndex(market)
    if not trace:
        assign = kernels.da_firm(idx.pref_rank, idx.pref_len, idx.tables)
        return idx.matching_of(assign)

    full = (1 << idx.nw) - 1
    rejected = [0] * idx.nf
    held_by = [-1] * idx.nw
    rounds: list[DARound] = []
    while True:
        new_rejections = [0] * idx.nf
        offers = [int(idx.tables[f, full & ~rejected[f]]) for f in range(idx.nf)]
        for w in range(idx.nw):
            best = held_by[w]
            for f in range(idx.nf):
                if offers[f] >> w & 1 and f != best:
                    if idx.pref_rank[w, f] < idx.pref_len[w]:
                        if best == -1 or idx.pref_rank[w, f] < idx.pref_rank[w, best]:
                            if best != -1:
                                rejected[best] |= 1 << w
                                new_rejections[best] |= 1 << w
                            best = f
                        else:
                            rejected[f] |= 1 << w
                            new_rejections[f] |= 1 << w
                    else:
                        rejected[f] |= 1 << w
                        new_rejections[f] |= 1 << w
            held_by[w] = best
        holdings = [0] * idx.nf
        for w in range(idx.nw):
            if held_by[w] >= 0:
                holdings[held_by[w]] |= 1 << w
        rounds.append(
            DARound(
                proposals={idx.firms[f]: idx.worker_set(offers[f]) for f in range(idx.nf)},
                holdings={
                    idx.firms[f]: idx.worker_set(holdings[f]) for f in range(idx.nf)
                },
                rejections={
                    idx.firms[f]: idx.worker_set(new_rejections[f])
                    for f in range(idx.nf)
                },
            )
        )
        if not any(new_rejections):
            break
    matching = idx.matching_of(held_by)
    if trace:
        return matching, DATrace(side="firm", rounds=tuple(rounds))
    return matching
