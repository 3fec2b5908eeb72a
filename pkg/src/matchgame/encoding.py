"""Index-level view of a market for the kernel layer.

Workers and firms are numbered in sorted id order; worker sets become int64
bitmasks and matchings become base-``nf+1`` codes (digit 0 = unmatched,
digit d = firm d-1, worker 0 in the least significant position).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .market import Market, Matching, WorkerPreference


def preference_arrays(
    prefs: Sequence[WorkerPreference], firm_index: dict[str, int], nf: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(pref_order, pref_len, pref_rank) arrays for a list of preferences.

    pref_order rows are padded with -1; pref_rank uses nf + 1 for unlisted
    firms, which is >= pref_len for every list.
    """
    nw = len(prefs)
    order = np.full((nw, max(nf, 1)), -1, dtype=np.int64)
    length = np.zeros(nw, dtype=np.int64)
    rank = np.full((nw, max(nf, 1)), nf + 1, dtype=np.int64)
    for w, pref in enumerate(prefs):
        length[w] = len(pref.acceptable)
        for k, f in enumerate(pref.acceptable):
            fi = firm_index[f]
            order[w, k] = fi
            rank[w, fi] = k
    return order, length, rank


class MarketIndex:
    """Cached arrays for one market, plus id/code conversions."""

    def __init__(self, market: Market):
        self.market = market
        self.workers = market.workers
        self.firms = market.firms
        self.nw = len(self.workers)
        self.nf = len(self.firms)
        self.widx = {w: i for i, w in enumerate(self.workers)}
        self.fidx = {f: i for i, f in enumerate(self.firms)}
        self.pref_order, self.pref_len, self.pref_rank = preference_arrays(
            [market.preferences[w] for w in self.workers], self.fidx, self.nf
        )
        self.tables = np.stack(
            [market.choices[f].table for f in self.firms]
        ) if self.nf else np.zeros((0, 1 << self.nw), dtype=np.int64)
        self.ncodes = (self.nf + 1) ** self.nw

    def worker_mask(self, workers: Iterable[str]) -> int:
        m = 0
        for w in workers:
            i = self.widx.get(w)
            if i is None:
                raise InputError(f"unknown worker id: {w!r}")
            m |= 1 << i
        return m

    def worker_set(self, mask: int) -> frozenset[str]:
        return frozenset(self.workers[i] for i in range(self.nw) if mask >> i & 1)

    def assign_of(self, matching: Matching) -> np.ndarray:
        assign = np.full(self.nw, -1, dtype=np.int64)
        for w, f in matching.worker_side.items():
            wi = self.widx.get(w)
            if wi is None:
                raise InputError(f"unknown worker id: {w!r}")
            if f is not None:
                fi = self.fidx.get(f)
                if fi is None:
                    raise InputError(f"unknown firm id: {f!r}")
                assign[wi] = fi
        return assign

    def matching_of(self, assign: Sequence[int]) -> Matching:
        worker_side = {
            self.workers[w]: (self.firms[int(f)] if f >= 0 else None)
            for w, f in enumerate(assign)
        }
        return Matching.from_worker_side(worker_side, self.firms)

    def code_of(self, assign: Sequence[int]) -> int:
        code = 0
        base = self.nf + 1
        for w in range(self.nw - 1, -1, -1):
            code = code * base + int(assign[w]) + 1
        return code

    def assign_of_code(self, code: int) -> np.ndarray:
        assign = np.empty(self.nw, dtype=np.int64)
        base = self.nf + 1
        for w in range(self.nw):
            assign[w] = code % base - 1
            code //= base
        return assign

    def matching_of_code(self, code: int) -> Matching:
        return self.matching_of(self.assign_of_code(code))
