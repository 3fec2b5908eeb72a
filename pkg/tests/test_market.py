import pytest
from hypothesis import given, strategies as st

import matchgame as mg
from matchgame.errors import InputError

import oracle

FIRMS = ("f1", "f2", "f3")


def test_preference_rejects_duplicates():
    with pytest.raises(InputError):
        mg.WorkerPreference(["f1", "f1"])


def test_rank_semantics():
    pref = mg.WorkerPreference(["f2", "f1"])
    assert pref.rank("f2") == 0
    assert pref.rank("f1") == 1
    assert pref.rank(None) == 2
    assert pref.rank("f3") == 3  # unlisted sits below the outside option


def test_worker_prefers_list_order():
    pref = mg.WorkerPreference(["f1", "f2"])
    assert mg.worker_prefers(pref, "f1", "f2") > 0


def test_worker_prefers_unlisted_below_outside():
    pref = mg.WorkerPreference(["f1"])
    assert mg.worker_prefers(pref, None, "f2") > 0
    assert mg.worker_prefers(pref, "f2", None) < 0
    assert mg.worker_prefers(pref, "f1", "f2") > 0


def test_worker_prefers_reflexive():
    pref = mg.WorkerPreference(["f1"])
    assert mg.worker_prefers(pref, "f1", "f1") == 0


def test_worker_prefers_unknown_firm():
    pref = mg.WorkerPreference(["f1"])
    with pytest.raises(InputError):
        mg.worker_prefers(pref, "f9", None, firms=FIRMS)


@st.composite
def preference_and_outcomes(draw):
    listed = draw(st.permutations(FIRMS).map(tuple))
    k = draw(st.integers(0, len(FIRMS)))
    pref = mg.WorkerPreference(listed[:k])
    outcome = st.sampled_from([None, *FIRMS])
    return pref, draw(outcome), draw(outcome), draw(outcome)


@given(preference_and_outcomes())
def test_worker_prefers_strict_weak_order(case):
    pref, a, b, c = case

    def sign(x):
        return (x > 0) - (x < 0)

    cmp_ab = mg.worker_prefers(pref, a, b)
    assert sign(cmp_ab) == -sign(mg.worker_prefers(pref, b, a))
    # transitivity of weak preference
    if cmp_ab >= 0 and mg.worker_prefers(pref, b, c) >= 0:
        assert mg.worker_prefers(pref, a, c) >= 0
    # totality (strictness) on acceptable firms plus the outside option
    domain = set(pref.acceptable) | {None}
    if a in domain and b in domain and a != b:
        assert cmp_ab != 0
    # the oracle rank induces the same comparison
    ranks = oracle.rank(list(pref.acceptable), b) - oracle.rank(
        list(pref.acceptable), a
    )
    assert sign(cmp_ab) == sign(ranks)


def test_matching_from_worker_side_builds_transpose():
    m = mg.Matching.from_worker_side({"w1": "f1", "w2": None}, ["f1", "f2"])
    assert m.workers_of("f1") == {"w1"}
    assert m.workers_of("f2") == frozenset()
    assert m.firm_of("w2") is None
    assert m.matched_pairs() == (("w1", "f1"),)


def test_matching_equality_and_hash():
    a = mg.Matching.from_worker_side({"w1": "f1"}, ["f1"])
    b = mg.Matching({"w1": "f1"}, {"f1": {"w1"}})
    assert a == b
    assert hash(a) == hash(b)
    assert a != mg.Matching({"w1": "f1"}, {"f1": set()})


def test_validate_empty_matching(market_a):
    m = market_a.empty_matching()
    assert validate_ok(m, market_a)


def test_validate_singleton_symmetric(market_a):
    m = mg.Matching(
        {"w1": "f1", "w2": None}, {"f1": {"w1"}, "f2": set()}
    )
    assert validate_ok(m, market_a)


def test_validate_constructed_asymmetry(market_a):
    m = mg.Matching({"w1": "f1", "w2": None}, {"f1": set(), "f2": set()})
    result = mg.validate_matching(m, market_a)
    assert not result.ok
    assert result.clause == "(iii)"
    assert result.offenders == ("w1", "f1")


def test_validate_unknown_ids(market_a):
    with pytest.raises(InputError):
        mg.validate_matching(
            mg.Matching({"w9": None, "w1": None, "w2": None},
                        {"f1": set(), "f2": set()}),
            market_a,
        )
    with pytest.raises(InputError):
        mg.validate_matching(
            mg.Matching({"w1": "f9", "w2": None}, {"f1": set(), "f2": set()}),
            market_a,
        )


def test_validate_matches_transpose_reconstruction(market_a):
    # accepted iff rebuilding the firm side from the worker side reproduces it
    for assignment in oracle.all_assignments(market_a.workers, market_a.firms):
        rebuilt = mg.Matching.from_worker_side(assignment, market_a.firms)
        for firm_side in (
            rebuilt.firm_side,
            {"f1": set(), "f2": set()},
            {"f1": {"w1", "w2"}, "f2": set()},
        ):
            m = mg.Matching(assignment, firm_side)
            expected = {f: frozenset(ws) for f, ws in rebuilt.firm_side.items()}
            got = mg.validate_matching(m, market_a)
            assert got.ok == (m.firm_side == expected)


def validate_ok(m, market):
    result = mg.validate_matching(m, market)
    assert result.clause is None
    return result.ok


def test_market_requires_full_profiles():
    pref = mg.WorkerPreference(["f1"])
    cf = mg.responsive_choice(["w1"], 1, ("w1",))
    with pytest.raises(InputError):
        mg.Market(("w1",), ("f1",), {}, {"f1": cf})
    with pytest.raises(InputError):
        mg.Market(("w1",), ("f1",), {"w1": pref}, {})


def test_market_rejects_unknown_firm_in_preferences():
    cf = mg.responsive_choice(["w1"], 1, ("w1",))
    with pytest.raises(InputError):
        mg.Market(
            ("w1",), ("f1",), {"w1": mg.WorkerPreference(["f9"])}, {"f1": cf}
        )


def test_market_rejects_ground_mismatch():
    cf = mg.responsive_choice(["w1"], 1, ("w1",))
    with pytest.raises(InputError):
        mg.Market(
            ("w1", "w2"),
            ("f1",),
            {"w1": mg.WorkerPreference([]), "w2": mg.WorkerPreference([])},
            {"f1": cf},
        )


def test_market_rejects_overlapping_ids():
    cf = mg.responsive_choice([], 1, ("a",))
    with pytest.raises(InputError):
        mg.Market(("a",), ("a",), {"a": mg.WorkerPreference([])}, {"a": cf})
