"""Canonical market documents: parsing, validation, and byte-exact emission.

A market document is a JSON object with exactly the keys ``workers``,
``firms``, ``preferences``, and ``choice``.  Worker/firm id lists are sorted;
preference lists and responsive rankings are order-significant.  A choice
entry is one of::

    {"kind": "responsive", "ranking": [...], "quota": 1}
    {"kind": "table", "table": {"": [], "w1": ["w1"], "w1,w2": ["w1"], ...}}
    {"kind": "theorem1", "mu_f": ["w1"]}

Table keys are comma-joined sorted worker ids and must cover every subset of
the worker set.  ``emit_market`` produces the canonical form (sorted keys,
two-space indent, trailing newline); parsing a canonical document and
re-emitting it is byte-identical.
"""

from __future__ import annotations

import json

from .choice import ChoiceFunction, choice_from_table, responsive_choice, theorem1_choice
from .errors import InputError
from .market import Market, Matching, WorkerPreference


class DocumentError(InputError):
    """A document failed to parse or validate."""


def _reject_duplicate_keys(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise DocumentError(f"duplicate key {key!r}")
        seen.add(key)
    return dict(pairs)


def _load(text: str):
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def _require_keys(obj: dict, expected: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise DocumentError(f"{path}: expected an object")
    unknown = set(obj) - expected
    if unknown:
        raise DocumentError(f"{path}: unknown field {sorted(unknown)[0]!r}")
    missing = expected - set(obj)
    if missing:
        raise DocumentError(f"{path}: missing field {sorted(missing)[0]!r}")


def _id_list(value, path: str, *, sorted_required: bool) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise DocumentError(f"{path}: expected a list of strings")
    if len(set(value)) != len(value):
        raise DocumentError(f"{path}: duplicate entry")
    if sorted_required and value != sorted(value):
        raise DocumentError(f"{path}: ids must be sorted")
    return value


def _parse_choice(entry, workers: list[str], path: str) -> ChoiceFunction:
    if not isinstance(entry, dict):
        raise DocumentError(f"{path}: expected an object")
    kind = entry.get("kind")
    if kind == "responsive":
        _require_keys(entry, {"kind", "ranking", "quota"}, path)
        ranking = _id_list(entry["ranking"], f"{path}.ranking", sorted_required=False)
        unknown = [w for w in ranking if w not in workers]
        if unknown:
            raise DocumentError(f"{path}.ranking: unknown worker {unknown[0]!r}")
        quota = entry["quota"]
        if not isinstance(quota, int) or isinstance(quota, bool) or quota < 1:
            raise DocumentError(f"{path}.quota: must be an integer >= 1")
        return responsive_choice(ranking, quota, workers)
    if kind == "table":
        _require_keys(entry, {"kind", "table"}, path)
        table = entry["table"]
        if not isinstance(table, dict):
            raise DocumentError(f"{path}.table: expected an object")
        mapping = {}
        for key, chosen in table.items():
            ids = key.split(",") if key else []
            if ids != sorted(set(ids)):
                raise DocumentError(
                    f"{path}.table: subset key {key!r} must list sorted unique ids"
                )
            unknown = [w for w in ids if w not in workers]
            if unknown:
                raise DocumentError(f"{path}.table: unknown worker {unknown[0]!r}")
            chosen_ids = _id_list(chosen, f"{path}.table[{key!r}]", sorted_required=True)
            bad = [w for w in chosen_ids if w not in ids]
            if bad:
                raise DocumentError(
                    f"{path}.table[{key!r}]: chose {bad[0]!r} outside the subset"
                )
            mapping[frozenset(ids)] = frozenset(chosen_ids)
        try:
            return choice_from_table(workers, mapping)
        except InputError as exc:
            raise DocumentError(f"{path}.table: {exc}") from None
    if kind == "theorem1":
        _require_keys(entry, {"kind", "mu_f"}, path)
        mu = _id_list(entry["mu_f"], f"{path}.mu_f", sorted_required=True)
        unknown = [w for w in mu if w not in workers]
        if unknown:
            raise DocumentError(f"{path}.mu_f: unknown worker {unknown[0]!r}")
        return theorem1_choice(mu, workers)
    raise DocumentError(f"{path}.kind: expected responsive, table, or theorem1")


def _parse_preferences(raw, workers: list[str], firms: list[str], path: str):
    if not isinstance(raw, dict):
        raise DocumentError(f"{path}: expected an object")
    unknown = set(raw) - set(workers)
    if unknown:
        raise DocumentError(f"{path}.{sorted(unknown)[0]}: unknown worker")
    missing = set(workers) - set(raw)
    if missing:
        raise DocumentError(f"{path}: missing entry for {sorted(missing)[0]!r}")
    prefs = {}
    for w in workers:
        lst = _id_list(raw[w], f"{path}.{w}", sorted_required=False)
        bad = [f for f in lst if f not in firms]
        if bad:
            raise DocumentError(f"{path}.{w}: unknown firm {bad[0]!r}")
        prefs[w] = WorkerPreference(lst)
    return prefs


def parse_market(text: str) -> Market:
    """Parse a market document; errors carry line/column or field paths."""
    raw = _load(text)
    _require_keys(raw, {"workers", "firms", "preferences", "choice"}, "document")
    workers = _id_list(raw["workers"], "workers", sorted_required=True)
    firms = _id_list(raw["firms"], "firms", sorted_required=True)
    if set(workers) & set(firms):
        raise DocumentError("workers and firms must be disjoint")
    prefs = _parse_preferences(raw["preferences"], workers, firms, "preferences")
    choice_raw = raw["choice"]
    if not isinstance(choice_raw, dict):
        raise DocumentError("choice: expected an object")
    unknown = set(choice_raw) - set(firms)
    if unknown:
        raise DocumentError(f"choice.{sorted(unknown)[0]}: unknown firm")
    missing = set(firms) - set(choice_raw)
    if missing:
        raise DocumentError(f"choice: missing entry for {sorted(missing)[0]!r}")
    choices = {
        f: _parse_choice(choice_raw[f], workers, f"choice.{f}") for f in firms
    }
    return Market(workers, firms, prefs, choices)


def emit_market(market: Market) -> str:
    """Canonical byte-exact serialization: parse(emit(m)) == m."""
    doc = {
        "workers": list(market.workers),
        "firms": list(market.firms),
        "preferences": {
            w: list(market.preferences[w].acceptable) for w in market.workers
        },
        "choice": {f: market.choices[f].document() for f in market.firms},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def serialize_matching(matching: Matching) -> str:
    """Compact canonical one-line form; also the lexicographic rule's sort key."""
    doc = {
        "worker_side": dict(sorted(matching.worker_side.items())),
        "firm_side": {f: sorted(ws) for f, ws in sorted(matching.firm_side.items())},
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def parse_full_profile(text: str, market: Market) -> tuple[dict, dict]:
    """Strategy document for the full game: submitted preferences and choices."""
    raw = _load(text)
    _require_keys(raw, {"preferences", "choice"}, "profile")
    workers = list(market.workers)
    firms = list(market.firms)
    prefs = _parse_preferences(raw["preferences"], workers, firms, "preferences")
    choice_raw = raw["choice"]
    if not isinstance(choice_raw, dict):
        raise DocumentError("choice: expected an object")
    unknown = set(choice_raw) - set(firms)
    if unknown:
        raise DocumentError(f"choice.{sorted(unknown)[0]}: unknown firm")
    missing = set(firms) - set(choice_raw)
    if missing:
        raise DocumentError(f"choice: missing entry for {sorted(missing)[0]!r}")
    choices = {
        f: _parse_choice(choice_raw[f], workers, f"choice.{f}") for f in firms
    }
    return prefs, choices


def parse_workers_profile(text: str, market: Market) -> dict:
    """Strategy document for the workers-only game: submitted preferences."""
    raw = _load(text)
    _require_keys(raw, {"preferences"}, "profile")
    return _parse_preferences(
        raw["preferences"], list(market.workers), list(market.firms), "preferences"
    )
