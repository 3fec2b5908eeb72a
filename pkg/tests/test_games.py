import pytest

import matchgame as mg
from matchgame.errors import CapacityError, InputError

import oracle
from conftest import build_lad_suite, build_mixed_suite, build_sized_suite


def lib_matching(market, assignment):
    return mg.Matching.from_worker_side(assignment, market.firms)


def truth_profile(market):
    return mg.FullGameProfile(
        preferences=dict(market.preferences), choices=dict(market.choices)
    )


# ---------------------------------------------------------------- strategies


def test_strategy_counts():
    for nf, expected in ((1, 2), (2, 5), (3, 16), (4, 65)):
        firms = tuple(f"f{i}" for i in range(nf))
        strategies = list(mg.enumerate_worker_strategies(firms))
        assert len(strategies) == expected
        assert expected == oracle.strategy_count(nf)
        # each exactly once
        assert len({s.acceptable for s in strategies}) == expected


def test_strategy_canonical_order():
    strategies = [
        list(s.acceptable) for s in mg.enumerate_worker_strategies(("f1", "f2"))
    ]
    assert strategies == [[], ["f1"], ["f2"], ["f1", "f2"], ["f2", "f1"]]


def test_strategy_capacity():
    with pytest.raises(CapacityError, match="4"):
        list(mg.enumerate_worker_strategies(("f1", "f2", "f3", "f4", "f5")))


# ----------------------------------------------------------------- the rules


def test_apply_rule_market_a(market_a):
    mu1 = lib_matching(market_a, {"w1": "f2", "w2": "f1"})
    mu2 = lib_matching(market_a, {"w1": "f1", "w2": "f2"})
    assert mg.apply_rule(mg.StableRule.firm_optimal(), market_a) == mu2
    assert mg.apply_rule(mg.StableRule.worker_optimal(), market_a) == mu1


def test_every_rule_agrees_on_unique_stable_market():
    market = mg.random_market(3, 2, 2, "responsive")
    stable = mg.stable_set(market)
    assume_unique = len(stable) == 1
    if not assume_unique:
        market = next(
            m for m in build_mixed_suite(71, 30) if len(mg.stable_set(m)) == 1
        )
        stable = mg.stable_set(market)
    rules = [
        mg.StableRule.firm_optimal(),
        mg.StableRule.worker_optimal(),
        mg.StableRule.lexicographic(),
        mg.StableRule.custom(lambda ms: ms[-1]),
    ]
    for rule in rules:
        assert mg.apply_rule(rule, market) == stable[0]


def test_rule_outputs_are_stable_for_submitted_market():
    for market in build_mixed_suite(81, 25):
        stable = mg.stable_set(market)
        for rule in (
            mg.StableRule.firm_optimal(),
            mg.StableRule.worker_optimal(),
            mg.StableRule.lexicographic(),
        ):
            assert mg.apply_rule(rule, market) in stable


def test_lexicographic_rule_minimizes_serialization(market_a):
    stable = mg.stable_set(market_a)
    expected = min(stable, key=mg.serialize_matching)
    assert mg.apply_rule(mg.StableRule.lexicographic(), market_a) == expected


def test_custom_rule_must_pick_a_stable_matching(market_a):
    bad = mg.StableRule.custom(lambda ms: market_a.empty_matching())
    with pytest.raises(InputError):
        mg.apply_rule(bad, market_a)


# ----------------------------------------------------------------- firm gain


def test_firm_gains_examples():
    cf = mg.responsive_choice(["w1", "w2"], 1, ("w1", "w2"))
    assert not mg.firm_gains(cf, {"w1"}, {"w1"})
    assert not mg.firm_gains(cf, {"w1"}, set())
    assert mg.firm_gains(cf, {"w2"}, {"w1"})


def test_firm_gains_blair_dominated_subset():
    cf = mg.responsive_choice(["w1", "w2"], 2, ("w1", "w2"))
    # held chosen out of the union: no gain
    assert not mg.firm_gains(cf, {"w1", "w2"}, {"w1"})


# ------------------------------------------------------------- nash checking


def test_truth_telling_not_equilibrium_market_a(market_a):
    report = mg.is_nash_full_game(
        mg.StableRule.firm_optimal(), market_a, truth_profile(market_a)
    )
    assert not report.is_equilibrium
    witness = report.witness
    assert witness.agent == "w1"
    assert witness.side == "worker"
    assert list(witness.deviation.acceptable) == ["f2"]
    assert witness.outcome_before == "f1"
    assert witness.outcome_after == "f2"


def test_profile_with_unlisted_outcome_not_equilibrium():
    # w1 truly accepts nobody but submits [f1]; dropping to the empty list
    # makes her unmatched, which she truly prefers
    workers = ("w1",)
    market = mg.Market(
        workers,
        ("f1",),
        {"w1": mg.WorkerPreference([])},
        {"f1": mg.responsive_choice(["w1"], 1, workers)},
    )
    profile = mg.FullGameProfile(
        preferences={"w1": mg.WorkerPreference(["f1"])},
        choices=dict(market.choices),
    )
    report = mg.is_nash_full_game(mg.StableRule.firm_optimal(), market, profile)
    assert not report.is_equilibrium
    assert report.witness.side == "worker"
    assert report.witness.deviation.acceptable == ()
    assert report.witness.outcome_after is None


def random_profile(market, rng):
    strategies = list(mg.enumerate_worker_strategies(market.firms))
    functions = list(mg.enumerate_path_independent(market.workers))
    return mg.FullGameProfile(
        preferences={w: rng.choice(strategies) for w in market.workers},
        choices={f: rng.choice(functions) for f in market.firms},
    )


def test_nash_witness_replays_to_strict_improvement():
    import random

    rng = random.Random(2718)
    rule = mg.StableRule.firm_optimal()
    cases = []
    for market in build_mixed_suite(91, 20):
        cases.append((market, truth_profile(market)))
        for _ in range(3):
            cases.append((market, random_profile(market, rng)))
    replayed = 0
    for market, profile in cases:
        report = mg.is_nash_full_game(rule, market, profile)
        if report.is_equilibrium:
            continue
        witness = report.witness
        submitted = mg.Market(
            market.workers, market.firms, profile.preferences, profile.choices
        )
        base = mg.apply_rule(rule, submitted)
        prefs = dict(profile.preferences)
        choices = dict(profile.choices)
        if witness.side == "worker":
            prefs[witness.agent] = witness.deviation
        else:
            choices[witness.agent] = witness.deviation
        deviated = mg.Market(market.workers, market.firms, prefs, choices)
        outcome = mg.apply_rule(rule, deviated)
        # the improvement is judged by the agent's TRUE preference or choice
        if witness.side == "worker":
            assert outcome.firm_of(witness.agent) == witness.outcome_after
            assert base.firm_of(witness.agent) == witness.outcome_before
            assert (
                market.worker_prefers(
                    witness.agent,
                    outcome.firm_of(witness.agent),
                    base.firm_of(witness.agent),
                )
                > 0
            )
        else:
            assert outcome.workers_of(witness.agent) == witness.outcome_after
            assert base.workers_of(witness.agent) == witness.outcome_before
            assert mg.firm_gains(
                market.choice(witness.agent),
                base.workers_of(witness.agent),
                outcome.workers_of(witness.agent),
            )
        replayed += 1
    assert replayed >= 10


def test_profile_validation_rejects_non_substitutable():
    workers = ("w1", "w2")
    complements = mg.choice_from_table(
        workers,
        {
            frozenset(): frozenset(),
            frozenset(["w1"]): frozenset(),
            frozenset(["w2"]): frozenset(),
            frozenset(["w1", "w2"]): frozenset(["w1", "w2"]),
        },
    )
    market = mg.random_market(1, 2, 1, "responsive")
    profile = mg.FullGameProfile(
        preferences=dict(market.preferences), choices={"f1": complements}
    )
    with pytest.raises(InputError, match="substitutable"):
        mg.is_nash_full_game(mg.StableRule.firm_optimal(), market, profile)


def test_workers_game_truth_not_equilibrium_market_a(market_a):
    report = mg.is_nash_workers_game(
        market_a, mg.WorkersGameProfile(preferences=dict(market_a.preferences))
    )
    assert not report.is_equilibrium
    assert report.witness.agent == "w1"
    assert list(report.witness.deviation.acceptable) == ["f2"]


def test_workers_game_single_firm_truth_equilibrium():
    workers = ("w1", "w2")
    market = mg.Market(
        workers,
        ("f1",),
        {w: mg.WorkerPreference(["f1"]) for w in workers},
        {"f1": mg.choice_from_rule(workers, lambda s: s)},
    )
    report = mg.is_nash_workers_game(
        market, mg.WorkersGameProfile(preferences=dict(market.preferences))
    )
    assert report.is_equilibrium


def test_consistency_flag_widens_firm_deviation_space(market_a):
    # dropping consistency enlarges the deviation space (9 vs 6 functions on
    # two workers); the truncation-profile equilibria survive the wider scan
    rule = mg.StableRule.firm_optimal()
    for mu in mg.ir_set(market_a):
        profile = mg.theorem1_profile(mu, market_a)
        strict = mg.is_nash_full_game(rule, market_a, profile)
        loose = mg.is_nash_full_game(
            rule, market_a, profile, consistent_deviations=False
        )
        assert strict.is_equilibrium and loose.is_equilibrium
        assert strict.deviations_checked == 2 * 5 + 2 * 6
        assert loose.deviations_checked == 2 * 5 + 2 * 9


# --------------------------------------------------------- profile builders


def test_theorem1_profile_empty_matching(market_a):
    profile = mg.theorem1_profile(market_a.empty_matching(), market_a)
    assert all(p.acceptable == () for p in profile.preferences.values())
    submitted = mg.Market(
        market_a.workers, market_a.firms, profile.preferences, profile.choices
    )
    assert mg.apply_rule(mg.StableRule.firm_optimal(), submitted) == (
        market_a.empty_matching()
    )


def test_theorem1_profile_market_a_instance(market_a):
    mu1 = lib_matching(market_a, {"w1": "f2", "w2": "f1"})
    profile = mg.theorem1_profile(mu1, market_a)
    assert profile.preferences["w1"].acceptable == ("f2",)
    assert profile.preferences["w2"].acceptable == ("f1",)
    for f in market_a.firms:
        cf = profile.choices[f]
        mu_f = mu1.workers_of(f)
        for s in oracle.subsets(market_a.workers):
            assert cf.evaluate(s) == mu_f & s


def test_theorem1_profile_requires_ir(market_a):
    not_ir = lib_matching(market_a, {"w1": None, "w2": "f2"})
    # w2 truly ranks f1 first but f2 is still acceptable; make one that is not IR
    workers = ("w1",)
    market = mg.Market(
        workers,
        ("f1",),
        {"w1": mg.WorkerPreference([])},
        {"f1": mg.responsive_choice(["w1"], 1, workers)},
    )
    bad = mg.Matching.from_worker_side({"w1": "f1"}, market.firms)
    with pytest.raises(InputError):
        mg.theorem1_profile(bad, market)
    assert mg.theorem1_profile(not_ir, market_a)  # IR matchings are accepted


def test_theorem1_profile_locks_in_unique_stable_matching():
    for market in build_mixed_suite(101, 15):
        for mu in mg.ir_set(market):
            profile = mg.theorem1_profile(mu, market)
            submitted = mg.Market(
                market.workers, market.firms, profile.preferences, profile.choices
            )
            assert mg.stable_set(submitted) == [mu]
            assert mg.da_firm_proposing(submitted) == mu
            assert mg.da_worker_proposing(submitted) == mu


def test_theorem2_profile_instances(market_a):
    mu2 = lib_matching(market_a, {"w1": "f1", "w2": "f2"})
    profile = mg.theorem2_profile(mu2)
    assert profile.preferences["w1"].acceptable == ("f1",)
    assert profile.preferences["w2"].acceptable == ("f2",)
    empty = mg.theorem2_profile(market_a.empty_matching())
    assert all(p.acceptable == () for p in empty.preferences.values())


def test_theorem2_profile_unique_stable_under_lad():
    for market in build_lad_suite(111, 15):
        for mu in mg.stable_set(market):
            profile = mg.theorem2_profile(mu)
            submitted = mg.Market(
                market.workers, market.firms, profile.preferences, market.choices
            )
            assert mg.stable_set(submitted) == [mu]


# ------------------------------------------------------------------ theorems


def test_verify_theorem1_market_a_all_rules(market_a):
    for rule in (
        mg.StableRule.firm_optimal(),
        mg.StableRule.worker_optimal(),
        mg.StableRule.lexicographic(),
    ):
        report = mg.verify_theorem1(market_a, rule)
        assert report.exhaustive
        assert report.profiles_total == 900
        assert report.ok, (rule.kind, report)
        assert report.outcome_set_equals_ir


def test_verify_theorem1_one_by_one_market_exhaustive():
    market = mg.Market(
        ("w1",),
        ("f1",),
        {"w1": mg.WorkerPreference(["f1"])},
        {"f1": mg.responsive_choice(["w1"], 1, ("w1",))},
    )
    report = mg.verify_theorem1(market, mg.StableRule.firm_optimal())
    assert report.exhaustive
    # 2 worker strategies x 2 firm strategies
    assert report.profiles_total == 4
    assert report.ok


def test_verify_theorem1_rule_independence_on_random_markets():
    for market in build_sized_suite(121, 6, 2, 2):
        for rule in (
            mg.StableRule.firm_optimal(),
            mg.StableRule.worker_optimal(),
            mg.StableRule.lexicographic(),
        ):
            report = mg.verify_theorem1(market, rule)
            assert report.ok, (rule.kind, market, report)


def test_verify_theorem1_sampled_mode():
    market = mg.random_market(5, 3, 3, "responsive")
    report = mg.verify_theorem1(
        market, mg.StableRule.firm_optimal(), max_exhaustive_profiles=100,
        sample_size=25, seed=3,
    )
    assert not report.exhaustive
    assert report.ok


def test_verify_theorem2_market_a(market_a):
    report = mg.verify_theorem2(market_a)
    assert report.ok
    assert report.stable_count == 2
    assert report.outcome_set_equals_stable
    assert report.profiles_total == 25  # 5 strategies per worker


def test_verify_theorem2_unique_stable_market():
    market = next(
        m for m in build_lad_suite(131, 10) if len(mg.stable_set(m)) == 1
    )
    report = mg.verify_theorem2(market)
    assert report.ok
    assert report.equilibrium_count >= 1
    assert report.stable_count == 1


def test_verify_theorem2_refuses_non_lad_market():
    workers = ("w1", "w2", "w3")
    manager = mg.choice_from_rule(
        workers, lambda s: frozenset(["w1"]) if "w1" in s else s
    )
    market = mg.Market(
        workers,
        ("f1",),
        {w: mg.WorkerPreference(["f1"]) for w in workers},
        {"f1": manager},
    )
    with pytest.raises(InputError, match="LAD"):
        mg.verify_theorem2(market)
    with pytest.raises(InputError, match="LAD"):
        mg.rural_hospital_check(market)


# ------------------------------------------------------------ rural hospital


def test_rural_hospital_market_a(market_a):
    ok, witness = mg.rural_hospital_check(market_a)
    assert ok and witness is None


def test_rural_hospital_unique_stable_market():
    market = next(
        m for m in build_lad_suite(141, 10) if len(mg.stable_set(m)) == 1
    )
    ok, witness = mg.rural_hospital_check(market)
    assert ok and witness is None


def test_rural_hospital_fails_without_lad():
    result = mg.search_non_lad_rural_violation(123, 500)
    assert result is not None
    market = result.market
    w = result.witness
    assert not all(market.choice(f).satisfies_lad() for f in market.firms)
    assert mg.is_stable(w.matching_a, market)
    assert mg.is_stable(w.matching_b, market)
    assert w.count_a != w.count_b
