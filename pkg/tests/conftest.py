"""Shared fixtures: the canonical two-by-two market and the seeded suites."""

import random
from pathlib import Path

import pytest

import matchgame as mg
from matchgame.generate import FAMILIES

SUITE_SEED = 20240613
FIXTURES = Path(__file__).parent / "fixtures"


def build_market_a() -> mg.Market:
    workers = ("w1", "w2")
    return mg.Market(
        workers,
        ("f1", "f2"),
        {
            "w1": mg.WorkerPreference(["f2", "f1"]),
            "w2": mg.WorkerPreference(["f1", "f2"]),
        },
        {
            "f1": mg.responsive_choice(["w1", "w2"], 1, workers),
            "f2": mg.responsive_choice(["w2", "w1"], 1, workers),
        },
    )


def build_mixed_suite(seed: int, count: int, *, max_workers=4, max_firms=3):
    """Deterministic mixed-family markets, |W| <= 4 and |F| <= 3."""
    rng = random.Random(seed)
    markets = []
    for _ in range(count):
        nw = rng.randint(1, max_workers)
        nf = rng.randint(1, max_firms)
        family = rng.choice(FAMILIES)
        markets.append(mg.random_market(rng.randrange(2**32), nw, nf, family))
    return markets


def build_sized_suite(seed: int, count: int, nw: int, nf: int):
    rng = random.Random(seed)
    markets = []
    for _ in range(count):
        family = rng.choice(FAMILIES)
        markets.append(mg.random_market(rng.randrange(2**32), nw, nf, family))
    return markets


def build_lad_suite(seed: int, count: int, *, max_workers=3, max_firms=3):
    """First ``count`` markets whose firms all satisfy LAD."""
    rng = random.Random(seed)
    markets = []
    while len(markets) < count:
        nw = rng.randint(1, max_workers)
        nf = rng.randint(1, max_firms)
        family = rng.choice(FAMILIES)
        market = mg.random_market(rng.randrange(2**32), nw, nf, family)
        if all(market.choice(f).satisfies_lad() for f in market.firms):
            markets.append(market)
    return markets


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Run every kernel once so JIT compilation stays out of timed blocks."""
    market = build_market_a()
    mg.ir_set(market)
    mg.stable_set(market)
    mg.da_worker_proposing(market)
    mg.da_firm_proposing(market)
    mg.verify_theorem2(market)
    mg.verify_theorem1(market, mg.StableRule.firm_optimal())


@pytest.fixture
def market_a():
    return build_market_a()


@pytest.fixture(scope="session")
def mixed_suite():
    return build_mixed_suite(SUITE_SEED, 200)


@pytest.fixture(scope="session")
def two_by_two_suite():
    return build_sized_suite(SUITE_SEED + 1, 50, 2, 2)


@pytest.fixture(scope="session")
def lad_suite():
    return build_lad_suite(SUITE_SEED + 2, 50)
