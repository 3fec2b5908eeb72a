import json
import subprocess
import sys

import pytest

import matchgame as mg
from matchgame.cli import run

from conftest import FIXTURES

MARKET_A = str(FIXTURES / "market_a.json")


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_choice_ok(capsys):
    code, out, _ = invoke(capsys, "check-choice", MARKET_A)
    assert code == 0
    assert "f1 substitutability: ok" in out
    assert "f2 lad: ok" in out


def test_check_choice_violation(capsys, tmp_path):
    market = mg.random_market(17, 3, 2, "path-independent")
    assert any(not market.choice(f).satisfies_lad() for f in market.firms)
    path = tmp_path / "m.json"
    path.write_text(mg.emit_market(market))
    code, out, _ = invoke(capsys, "check-choice", str(path))
    assert code == 1
    assert "lad: VIOLATION" in out


def test_da_firm_prints_firm_optimal_matching(capsys, market_a):
    code, out, _ = invoke(capsys, "da", MARKET_A, "--side", "firm")
    assert code == 0
    assert out.strip() == mg.serialize_matching(mg.da_firm_proposing(market_a))


def test_da_trace(capsys):
    code, out, _ = invoke(capsys, "da", MARKET_A, "--side", "worker", "--trace")
    assert code == 0
    assert "round 1 proposals:" in out


def test_stable_set_output(capsys, market_a):
    code, out, _ = invoke(capsys, "stable-set", MARKET_A)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "stable matchings: 2"
    assert lines[1:] == [mg.serialize_matching(m) for m in mg.stable_set(market_a)]


def test_ir_set_output(capsys):
    code, out, _ = invoke(capsys, "ir-set", MARKET_A)
    assert code == 0
    assert out.splitlines()[0] == "individually rational matchings: 7"


def test_nash_full_truth_not_equilibrium(capsys, tmp_path, market_a):
    profile = {
        "preferences": {"w1": ["f2", "f1"], "w2": ["f1", "f2"]},
        "choice": {
            "f1": {"kind": "responsive", "ranking": ["w1", "w2"], "quota": 1},
            "f2": {"kind": "responsive", "ranking": ["w2", "w1"], "quota": 1},
        },
    }
    path = tmp_path / "profile.json"
    path.write_text(json.dumps(profile))
    code, out, _ = invoke(
        capsys, "nash", MARKET_A, "--profile", str(path), "--game", "full",
        "--rule", "firm-opt",
    )
    assert code == 1
    assert "equilibrium: no" in out
    assert "worker w1 deviates to ['f2']" in out


def test_nash_full_equilibrium_profile(capsys, tmp_path, market_a):
    mu = mg.da_worker_proposing(market_a)
    profile = {
        "preferences": {"w1": ["f2"], "w2": ["f1"]},
        "choice": {
            "f1": {"kind": "theorem1", "mu_f": sorted(mu.workers_of("f1"))},
            "f2": {"kind": "theorem1", "mu_f": sorted(mu.workers_of("f2"))},
        },
    }
    path = tmp_path / "profile.json"
    path.write_text(json.dumps(profile))
    code, out, _ = invoke(
        capsys, "nash", MARKET_A, "--profile", str(path), "--game", "full",
        "--rule", "worker-opt",
    )
    assert code == 0
    assert out.startswith("equilibrium: yes")


def test_nash_workers_game(capsys, tmp_path):
    profile = {"preferences": {"w1": ["f2"], "w2": ["f1"]}}
    path = tmp_path / "profile.json"
    path.write_text(json.dumps(profile))
    code, out, _ = invoke(
        capsys, "nash", MARKET_A, "--profile", str(path), "--game", "workers"
    )
    assert code == 0


def test_verify_theorem1_cli(capsys):
    code, out, _ = invoke(capsys, "verify-theorem1", MARKET_A, "--rule", "firm-opt")
    assert code == 0
    assert "clause (i) [exhaustive]: ok (900 profiles" in out
    assert "clause (ii): ok (7 individually rational matchings)" in out
    assert "equilibrium outcomes = individually rational set" in out


def test_verify_theorem2_cli(capsys):
    code, out, _ = invoke(capsys, "verify-theorem2", MARKET_A)
    assert code == 0
    assert "equilibrium outcomes = stable set (2 matchings)" in out


def test_verify_theorem2_rejects_non_lad(capsys, tmp_path):
    market = mg.random_market(17, 3, 2, "path-independent")
    path = tmp_path / "m.json"
    path.write_text(mg.emit_market(market))
    code, out, err = invoke(capsys, "verify-theorem2", str(path))
    assert code == 2
    assert "LAD" in err


def test_rural_hospital_cli(capsys):
    code, out, _ = invoke(capsys, "rural-hospital", MARKET_A)
    assert code == 0
    assert out.strip() == "rural hospital property holds (2 stable matchings)"


def test_random_roundtrip(capsys):
    code, out, _ = invoke(
        capsys, "random", "--seed", "9", "--workers", "3", "--firms", "2",
        "--family", "responsive",
    )
    assert code == 0
    market = mg.parse_market(out)
    assert market == mg.random_market(9, 3, 2, "responsive")


def test_random_capacity_error(capsys):
    code, _, err = invoke(
        capsys, "random", "--seed", "1", "--workers", "9", "--firms", "2",
        "--family", "responsive",
    )
    assert code == 2
    assert "error:" in err


def test_search_rural_found(capsys):
    code, out, _ = invoke(
        capsys, "search", "--target", "non-lad-rural-violation",
        "--seed", "123", "--budget", "500",
    )
    assert code == 0
    assert "found after" in out
    assert "witness:" in out


def test_search_rural_budget_exhausted(capsys):
    code, out, _ = invoke(
        capsys, "search", "--target", "non-lad-rural-violation",
        "--seed", "123", "--budget", "1",
    )
    assert code == 1
    assert "no violation found" in out


def test_search_firms_game(capsys):
    code, out, _ = invoke(
        capsys, "search", "--target", "firms-strategic-stable-failure",
        "--seed", "2024", "--budget", "20",
    )
    assert code == 0
    assert "unstable outcome:" in out


def test_missing_file_is_input_error(capsys):
    code, _, err = invoke(capsys, "stable-set", "/nonexistent/market.json")
    assert code == 2


def test_malformed_document_is_input_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    code, _, err = invoke(capsys, "stable-set", str(path))
    assert code == 2
    assert "syntax error" in err


def test_jobs_flag_validated_and_inert(capsys):
    bad_code, _, err = invoke(capsys, "stable-set", MARKET_A, "--jobs", "0")
    assert bad_code == 2
    code1, out1, _ = invoke(capsys, "stable-set", MARKET_A)
    code2, out2, _ = invoke(capsys, "stable-set", MARKET_A, "--jobs", "4")
    assert code1 == code2 == 0
    assert out1 == out2


def test_jobs_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("MATCHGAME_JOBS", "0")
    code, _, err = invoke(capsys, "stable-set", MARKET_A)
    assert code == 2
    monkeypatch.setenv("MATCHGAME_JOBS", "3")
    code, out, _ = invoke(capsys, "stable-set", MARKET_A)
    assert code == 0


def test_repeated_invocations_byte_identical(capsys):
    for argv in (
        ["stable-set", MARKET_A],
        ["verify-theorem2", MARKET_A],
        ["da", MARKET_A, "--side", "worker"],
    ):
        _, first, _ = invoke(capsys, *argv)
        _, second, _ = invoke(capsys, *argv)
        assert first == second


def test_console_script_subprocess():
    result = subprocess.run(
        [sys.executable, "-m", "matchgame.cli", "da", MARKET_A, "--side", "firm"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    mu2 = mg.da_firm_proposing(mg.parse_market(open(MARKET_A).read()))
    assert result.stdout.strip() == mg.serialize_matching(mu2)


def test_no_subcommand_exits_with_usage_error():
    with pytest.raises(SystemExit):
        run([])
