"""Hot bitmask kernels working on index-encoded markets.

Workers are bit positions (bit ``i`` = i-th worker in sorted id order), worker
sets are int64 masks, and a firm's choice function is a row ``table[f]`` of
length ``2**nw`` mapping each available-set mask to the chosen-set mask.
Matchings are encoded as ``assign`` arrays (firm index or -1 per worker) or as
base-``nf+1`` integer codes, worker 0 in the least significant digit.

Each kernel is a self-contained function over numpy arrays; the active
backend (:mod:`matchgame.backend`) decides whether the exported names run
jitted or interpreted.  ``python_kernels()`` always exposes the interpreted
versions so the two paths can be compared and benchmarked.
"""

from __future__ import annotations

import numpy as np

from . import backend


def _check_substitutable(table, n):
    """True iff table[s] & sp <= table[sp] for every sp <= s."""
    for s in range(1 << n):
        cs = table[s]
        sp = s
        while True:
            if (cs & sp) & ~table[sp]:
                return False
            if sp == 0:
                break
            sp = (sp - 1) & s
    return True


def _check_consistent(table, n):
    """True iff table[sp] == table[s] whenever table[s] <= sp <= s."""
    for s in range(1 << n):
        cs = table[s]
        sp = s
        while True:
            if (cs | sp) == sp and table[sp] != cs:
                return False
            if sp == 0:
                break
            sp = (sp - 1) & s
    return True


def _check_path_independent(table, n):
    """True iff table[s | sp] == table[table[s] | sp] for every pair s, sp."""
    for s in range(1 << n):
        cs = table[s]
        for sp in range(1 << n):
            if table[s | sp] != table[cs | sp]:
                return False
    return True


def _check_lad(table, n):
    """True iff |table[sp]| <= |table[s]| for every sp <= s."""
    for s in range(1 << n):
        cnt = 0
        x = table[s]
        while x:
            x &= x - 1
            cnt += 1
        sp = s
        while True:
            c2 = 0
            x = table[sp]
            while x:
                x &= x - 1
                c2 += 1
            if c2 > cnt:
                return False
            if sp == 0:
                break
            sp = (sp - 1) & s
    return True


def _da_worker(pref_order, pref_len, tables):
    """Worker-proposing deferred acceptance; returns assign (firm idx or -1).

    pref_order[w, k] is the k-th firm on worker w's submitted list; rows are
    padded with -1 beyond pref_len[w].  Each round every free worker proposes
    to her best untried firm and every firm keeps its choice out of current
    holdings plus new proposals.
    """
    nw = pref_order.shape[0]
    nf = tables.shape[0]
    ptr = np.zeros(nw, dtype=np.int64)
    held_by = np.full(nw, -1, dtype=np.int64)
    hold = np.zeros(nf, dtype=np.int64)
    props = np.zeros(nf, dtype=np.int64)
    while True:
        for f in range(nf):
            props[f] = 0
        any_prop = False
        for w in range(nw):
            if held_by[w] == -1 and ptr[w] < pref_len[w]:
                f = pref_order[w, ptr[w]]
                ptr[w] += 1
                props[f] |= 1 << w
                any_prop = True
        if not any_prop:
            break
        for f in range(nf):
            if props[f]:
                pool = hold[f] | props[f]
                chosen = tables[f, pool]
                dropped = pool & ~chosen
                for w in range(nw):
                    if dropped >> w & 1:
                        held_by[w] = -1
                    elif chosen >> w & 1:
                        held_by[w] = f
                hold[f] = chosen
    return held_by


def _da_firm(pref_rank, pref_len, tables):
    """Firm-proposing deferred acceptance; returns assign (firm idx or -1).

    pref_rank[w, f] is f's position on w's submitted list (>= pref_len[w]
    when unlisted).  Each round every firm offers to its choice out of the
    workers that have not rejected it; each worker holds the best acceptable
    offer and rejects the rest.  Rejections accumulate until a fixpoint.
    """
    nw = pref_rank.shape[0]
    nf = tables.shape[0]
    full = (1 << nw) - 1
    rejected = np.zeros(nf, dtype=np.int64)
    held_by = np.full(nw, -1, dtype=np.int64)
    offers = np.zeros(nf, dtype=np.int64)
    while True:
        new_rejection = False
        for f in range(nf):
            offers[f] = tables[f, full & ~rejected[f]]
        for w in range(nw):
            best = held_by[w]
            for f in range(nf):
                if offers[f] >> w & 1 and f != best:
                    if pref_rank[w, f] < pref_len[w]:
                        if best == -1 or pref_rank[w, f] < pref_rank[w, best]:
                            if best != -1:
                                rejected[best] |= 1 << w
                                new_rejection = True
                            best = f
                        else:
                            rejected[f] |= 1 << w
                            new_rejection = True
                    else:
                        rejected[f] |= 1 << w
                        new_rejection = True
            held_by[w] = best
        if not new_rejection:
            break
    return held_by


def _scan_matchings(pref_rank, pref_len, tables):
    """Flag every matching code as individually rational and/or stable.

    Returns (ir, stable) uint8 arrays of length (nf+1)**nw, indexed by
    matching code.
    """
    nw = pref_rank.shape[0]
    nf = tables.shape[0]
    ncodes = 1
    for _ in range(nw):
        ncodes *= nf + 1
    ir = np.zeros(ncodes, dtype=np.uint8)
    stable = np.zeros(ncodes, dtype=np.uint8)
    assign = np.zeros(nw, dtype=np.int64)
    fs = np.zeros(nf, dtype=np.int64)
    for code in range(ncodes):
        c = code
        for f in range(nf):
            fs[f] = 0
        ok = True
        for w in range(nw):
            d = c % (nf + 1)
            c //= nf + 1
            assign[w] = d - 1
            if d > 0:
                if pref_rank[w, d - 1] >= pref_len[w]:
                    ok = False
                fs[d - 1] |= 1 << w
        if ok:
            for f in range(nf):
                if tables[f, fs[f]] != fs[f]:
                    ok = False
                    break
        if not ok:
            continue
        ir[code] = 1
        blocked = False
        for f in range(nf):
            for w in range(nw):
                if assign[w] == f:
                    continue
                if pref_rank[w, f] >= pref_len[w]:
                    continue
                current = pref_len[w] if assign[w] < 0 else pref_rank[w, assign[w]]
                if pref_rank[w, f] < current and tables[f, fs[f] | (1 << w)] >> w & 1:
                    blocked = True
                    break
            if blocked:
                break
        if not blocked:
            stable[code] = 1
    return ir, stable


def _fill_firm_optimal(strat_rank, strat_len, tables, nw):
    """Firm-optimal outcome for every workers-game profile.

    strat_rank[s, f] / strat_len[s] describe the s-th worker strategy over
    the firms.  Profile index p encodes worker w's strategy as digit w of p
    in base n_strats.  Returns outcomes[p, w] = firm index or -1.
    """
    n_strats = strat_rank.shape[0]
    nf = strat_rank.shape[1]
    full = (1 << nw) - 1
    n_profiles = 1
    for _ in range(nw):
        n_profiles *= n_strats
    outcomes = np.empty((n_profiles, nw), dtype=np.int64)
    pick = np.zeros(nw, dtype=np.int64)
    rejected = np.zeros(nf, dtype=np.int64)
    offers = np.zeros(nf, dtype=np.int64)
    for p in range(n_profiles):
        c = p
        for w in range(nw):
            pick[w] = c % n_strats
            c //= n_strats
        # inline firm-proposing deferred acceptance under this profile
        for f in range(nf):
            rejected[f] = 0
        held_by = outcomes[p]
        for w in range(nw):
            held_by[w] = -1
        while True:
            new_rejection = False
            for f in range(nf):
                offers[f] = tables[f, full & ~rejected[f]]
            for w in range(nw):
                s = pick[w]
                best = held_by[w]
                for f in range(nf):
                    if offers[f] >> w & 1 and f != best:
                        if strat_rank[s, f] < strat_len[s]:
                            if best == -1 or strat_rank[s, f] < strat_rank[s, best]:
                                if best != -1:
                                    rejected[best] |= 1 << w
                                    new_rejection = True
                                best = f
                            else:
                                rejected[f] |= 1 << w
                                new_rejection = True
                        else:
                            rejected[f] |= 1 << w
                            new_rejection = True
                held_by[w] = best
            if not new_rejection:
                break
    return outcomes


def _nash_scan_workers(outcomes, true_rank, true_len, n_strats):
    """Flag workers-game Nash profiles given the full outcome grid.

    A profile is an equilibrium iff no worker has a unilateral strategy
    change whose outcome she truly strictly prefers.  Unlisted firms rank
    strictly below staying unmatched (rank true_len[w]).
    """
    n_profiles = outcomes.shape[0]
    nw = outcomes.shape[1]
    nash = np.ones(n_profiles, dtype=np.uint8)
    for p in range(n_profiles):
        c = p
        stride = 1
        for w in range(nw):
            digit = c % n_strats
            c //= n_strats
            f0 = outcomes[p, w]
            if f0 < 0:
                base = true_len[w]
            elif true_rank[w, f0] < true_len[w]:
                base = true_rank[w, f0]
            else:
                base = true_len[w] + 1
            for s in range(n_strats):
                if s == digit:
                    continue
                q = p + (s - digit) * stride
                f1 = outcomes[q, w]
                if f1 < 0:
                    r = true_len[w]
                elif true_rank[w, f1] < true_len[w]:
                    r = true_rank[w, f1]
                else:
                    r = true_len[w] + 1
                if r < base:
                    nash[p] = 0
                    break
            if nash[p] == 0:
                break
            stride *= n_strats
    return nash


_IMPLS = {
    "check_substitutable": _check_substitutable,
    "check_consistent": _check_consistent,
    "check_path_independent": _check_path_independent,
    "check_lad": _check_lad,
    "da_worker": _da_worker,
    "da_firm": _da_firm,
    "scan_matchings": _scan_matchings,
    "fill_firm_optimal": _fill_firm_optimal,
    "nash_scan_workers": _nash_scan_workers,
}

if backend.active_backend() == "numba":
    check_substitutable = backend.jit(_check_substitutable)
    check_consistent = backend.jit(_check_consistent)
    check_path_independent = backend.jit(_check_path_independent)
    check_lad = backend.jit(_check_lad)
    da_worker = backend.jit(_da_worker)
    da_firm = backend.jit(_da_firm)
    scan_matchings = backend.jit(_scan_matchings)
    fill_firm_optimal = backend.jit(_fill_firm_optimal)
    nash_scan_workers = backend.jit(_nash_scan_workers)
else:
    check_substitutable = _check_substitutable
    check_consistent = _check_consistent
    check_path_independent = _check_path_independent
    check_lad = _check_lad
    da_worker = _da_worker
    da_firm = _da_firm
    scan_matchings = _scan_matchings
    fill_firm_optimal = _fill_firm_optimal
    nash_scan_workers = _nash_scan_workers


def python_kernels() -> dict:
    """The interpreted (non-jitted) kernel implementations, by name."""
    return dict(_IMPLS)


def active_kernels() -> dict:
    """The kernels as exported under the active backend, by name."""
    return {name: globals()[name] for name in _IMPLS}
