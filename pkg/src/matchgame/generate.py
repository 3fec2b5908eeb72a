"""Seeded random market generation."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from .choice import ChoiceFunction, responsive_choice, _enumerated_functions
from .errors import CapacityError, InputError
from .market import Market, WorkerPreference

RESPONSIVE = "responsive"
PATH_INDEPENDENT = "path-independent"
FAMILIES = (RESPONSIVE, PATH_INDEPENDENT)

MAX_WORKERS = 6
MAX_FIRMS = 4
MAX_PI_WORKERS = 4
MAX_PI_FIRMS = 3


@lru_cache(maxsize=None)
def _ordered_selections(items: tuple[str, ...]) -> tuple[tuple[str, ...], ...]:
    """Every ordered list over every subset, shortest first then lex."""
    out: list[tuple[str, ...]] = []
    for k in range(len(items) + 1):
        out.extend(itertools.permutations(items, k))
    return tuple(out)


def random_market(
    seed: int,
    n_workers: int,
    n_firms: int,
    family: str,
    *,
    worker_prefix: str = "w",
    firm_prefix: str = "f",
) -> Market:
    """Deterministic-in-seed market with the given choice-function family.

    Worker lists are drawn uniformly over all preference strategies.  The
    responsive family draws a uniformly random ranked subset of workers and a
    uniform quota (always passing all four choice laws); the path-independent
    family draws uniformly from the full substitutable-and-consistent family,
    which need not satisfy LAD.
    """
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if n_workers < 1 or n_firms < 1:
        raise InputError("markets need at least one worker and one firm")
    if n_workers > MAX_WORKERS or n_firms > MAX_FIRMS:
        raise CapacityError(
            f"market size {n_workers}x{n_firms} exceeds the generation bounds "
            f"{MAX_WORKERS}x{MAX_FIRMS}"
        )
    if family == PATH_INDEPENDENT and (
        n_workers > MAX_PI_WORKERS or n_firms > MAX_PI_FIRMS
    ):
        raise CapacityError(
            f"path-independent family is bounded at "
            f"{MAX_PI_WORKERS}x{MAX_PI_FIRMS}, got {n_workers}x{n_firms}"
        )
    workers = tuple(f"{worker_prefix}{i + 1}" for i in range(n_workers))
    firms = tuple(f"{firm_prefix}{i + 1}" for i in range(n_firms))
    rng = random.Random(seed)

    firm_lists = _ordered_selections(tuple(sorted(firms)))
    preferences = {
        w: WorkerPreference(firm_lists[rng.randrange(len(firm_lists))])
        for w in sorted(workers)
    }
    choices: dict[str, ChoiceFunction] = {}
    if family == RESPONSIVE:
        rankings = _ordered_selections(tuple(sorted(workers)))
        for f in sorted(firms):
            ranking = rankings[rng.randrange(len(rankings))]
            quota = rng.randint(1, n_workers)
            choices[f] = responsive_choice(ranking, quota, workers)
    else:
        functions = _enumerated_functions(tuple(sorted(workers)), True)
        for f in sorted(firms):
            choices[f] = functions[rng.randrange(len(functions))]
    return Market(workers, firms, preferences, choices)
