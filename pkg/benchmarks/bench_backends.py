"""Benchmark: jitted kernels vs the interpreted numpy fallback.

Runs the three hot workloads (choice-law checks, deferred acceptance, and
the workers-game grid) through both kernel paths and prints the speedups.
Requires the numba backend; force the other path globally with
MATCHGAME_BACKEND=numpy to see the whole suite on the fallback instead.
"""

import random
import sys
import time

import numpy as np

import matchgame as mg
from matchgame.choice import _enumerated_tables
from matchgame.encoding import MarketIndex
from matchgame.games import _strategy_arrays
from matchgame.kernels import active_kernels, python_kernels

REPEATS = 5


def timed(fn, *args):
    best = float("inf")
    for _ in range(REPEATS):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, jit_fn, py_fn, *args):
    jit_fn(*args)  # warm the JIT outside the timer
    t_jit = timed(jit_fn, *args)
    t_py = timed(py_fn, *args)
    print(
        f"{name:<28} numba {t_jit * 1e3:9.2f} ms   numpy {t_py * 1e3:9.2f} ms"
        f"   speedup {t_py / t_jit:7.1f}x"
    )


def law_checks(kernels, tables, n):
    for table in tables:
        kernels["check_substitutable"](table, n)
        kernels["check_consistent"](table, n)
        kernels["check_path_independent"](table, n)
        kernels["check_lad"](table, n)


def da_sweep(kernels, indexed):
    for idx in indexed:
        kernels["da_worker"](idx.pref_order, idx.pref_len, idx.tables)
        kernels["da_firm"](idx.pref_rank, idx.pref_len, idx.tables)
        kernels["scan_matchings"](idx.pref_rank, idx.pref_len, idx.tables)


def workers_game(kernels, idx, s_order, s_len, s_rank):
    outcomes = kernels["fill_firm_optimal"](s_rank, s_len, idx.tables, idx.nw)
    kernels["nash_scan_workers"](outcomes, idx.pref_rank, idx.pref_len, s_rank.shape[0])


def main() -> int:
    if mg.active_backend() != "numba":
        print("active backend is numpy; nothing to compare (set MATCHGAME_BACKEND=numba)")
        return 1
    jit = active_kernels()
    py = python_kernels()

    # every substitutable+consistent choice table on four workers
    tables = [np.array(t, dtype=np.int64) for t in _enumerated_tables(4, True)]
    print(f"law checks over {len(tables)} tables on 4 workers:")
    bench("  four law checkers", lambda *a: law_checks(jit, *a),
          lambda *a: law_checks(py, *a), tables, 4)

    rng = random.Random(1)
    markets = [
        mg.random_market(rng.randrange(2**32), rng.randint(2, 4), rng.randint(2, 3),
                         rng.choice(("responsive", "path-independent")))
        for _ in range(200)
    ]
    indexed = [MarketIndex(m) for m in markets]
    print(f"deferred acceptance + stability scan over {len(markets)} markets:")
    bench("  da both sides + scan", lambda *a: da_sweep(jit, *a),
          lambda *a: da_sweep(py, *a), indexed)

    market = mg.random_market(11, 3, 3, "responsive")
    idx = MarketIndex(market)
    s_order, s_len, s_rank = _strategy_arrays(idx.nf)
    print(f"workers-game grid (16^3 profiles) on a 3x3 market:")
    bench("  fill + nash scan", lambda *a: workers_game(jit, *a),
          lambda *a: workers_game(py, *a), idx, s_order, s_len, s_rank)
    return 0


if __name__ == "__main__":
    sys.exit(main())
