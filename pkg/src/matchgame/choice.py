"""Firms' choice functions over worker sets.

A choice function is materialized as a full table: a numpy int64 array of
length ``2**n`` mapping every subset mask of the ground set to the chosen
submask (bit i = i-th ground worker in sorted id order).  Checkers for the
four choice-function laws (substitutability, consistency, path independence,
law of aggregate demand) return minimal counterexample witnesses, and the
family of all substitutable-and-consistent functions on a small ground set
can be enumerated in a canonical deterministic order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from . import kernels
from .errors import CapacityError, InputError

MAX_TABLE_GROUND = 12
PI_ENUMERATION_BOUND = 4
SUBSTITUTABLE_ENUMERATION_BOUND = 3

SUBSTITUTABILITY = "substitutability"
CONSISTENCY = "consistency"
PATH_INDEPENDENCE = "path-independence"
LAD = "lad"


@lru_cache(maxsize=None)
def canonical_masks(n: int) -> tuple[int, ...]:
    """All masks over n bits ordered by (cardinality, lexicographic ids)."""

    def key(m: int):
        idxs = tuple(i for i in range(n) if m >> i & 1)
        return (len(idxs), idxs)

    return tuple(sorted(range(1 << n), key=key))


@lru_cache(maxsize=None)
def _mask_rank(n: int) -> tuple[int, ...]:
    rank = [0] * (1 << n)
    for i, m in enumerate(canonical_masks(n)):
        rank[m] = i
    return tuple(rank)


def _submasks(m: int) -> list[int]:
    out = []
    s = m
    while True:
        out.append(s)
        if s == 0:
            break
        s = (s - 1) & m
    return out


class ChoiceFunction:
    """Total choice map on subsets of a fixed ground set of workers."""

    __slots__ = ("ground", "table", "_index", "_laws", "_doc")

    def __init__(self, ground: Iterable[str], table: np.ndarray, doc: Optional[dict] = None):
        ids = tuple(sorted(ground))
        if len(set(ids)) != len(ids):
            raise InputError(f"duplicate worker in ground set: {ids}")
        if len(ids) > MAX_TABLE_GROUND:
            raise CapacityError(
                f"ground set of size {len(ids)} exceeds the table bound {MAX_TABLE_GROUND}"
            )
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (1 << len(ids),):
            raise InputError(
                f"table must have {1 << len(ids)} entries, got {table.shape}"
            )
        masks = np.arange(1 << len(ids), dtype=np.int64)
        if np.any(table & ~masks):
            bad = int(np.nonzero(table & ~masks)[0][0])
            raise InputError(f"choice table infeasible: C(S) !<= S at mask {bad}")
        self.ground = ids
        self.table = table
        self.table.setflags(write=False)
        self._index = {w: i for i, w in enumerate(ids)}
        self._laws: dict[str, bool] = {}
        self._doc = doc

    @property
    def n(self) -> int:
        return len(self.ground)

    def mask_of(self, workers: Iterable[str]) -> int:
        m = 0
        for w in workers:
            i = self._index.get(w)
            if i is None:
                raise InputError(f"worker {w!r} is not in the ground set")
            m |= 1 << i
        return m

    def set_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.ground[i] for i in range(self.n) if mask >> i & 1)

    def evaluate(self, workers: Iterable[str]) -> frozenset[str]:
        """The chosen subset C(S); always a subset of S."""
        return self.set_of(int(self.table[self.mask_of(workers)]))

    def _law(self, name: str, kernel) -> bool:
        cached = self._laws.get(name)
        if cached is None:
            cached = bool(kernel(self.table, self.n))
            self._laws[name] = cached
        return cached

    def is_substitutable(self) -> bool:
        return self._law(SUBSTITUTABILITY, kernels.check_substitutable)

    def is_consistent(self) -> bool:
        return self._law(CONSISTENCY, kernels.check_consistent)

    def is_path_independent(self) -> bool:
        return self._law(PATH_INDEPENDENCE, kernels.check_path_independent)

    def satisfies_lad(self) -> bool:
        return self._law(LAD, kernels.check_lad)

    def document(self) -> dict:
        """JSON-ready description; falls back to the explicit table form."""
        if self._doc is not None:
            return dict(self._doc)
        table = {}
        for mask in range(1 << self.n):
            key = ",".join(sorted(self.set_of(mask)))
            table[key] = sorted(self.set_of(int(self.table[mask])))
        return {"kind": "table", "table": table}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ChoiceFunction)
            and self.ground == other.ground
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.ground, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"ChoiceFunction(ground={self.ground}, table={self.table.tolist()})"


@dataclass(frozen=True)
class ChoiceWitness:
    """Counterexample to one of the four laws.

    For substitutability / consistency / LAD the pair satisfies
    s_prime <= s; for path independence the two sets are unrelated.
    Replaying the defining condition on the witness sets reproduces the
    violation (see :meth:`violates`).
    """

    kind: str
    s: frozenset[str]
    s_prime: frozenset[str]
    chosen_s: frozenset[str]
    chosen_s_prime: frozenset[str]

    def violates(self, cf: ChoiceFunction) -> bool:
        """Re-evaluate the defining condition of ``kind`` on this pair."""
        if self.kind == SUBSTITUTABILITY:
            return not (cf.evaluate(self.s) & self.s_prime) <= cf.evaluate(self.s_prime)
        if self.kind == CONSISTENCY:
            cs = cf.evaluate(self.s)
            return cs <= self.s_prime <= self.s and cf.evaluate(self.s_prime) != cs
        if self.kind == PATH_INDEPENDENCE:
            return cf.evaluate(self.s | self.s_prime) != cf.evaluate(
                cf.evaluate(self.s) | self.s_prime
            )
        if self.kind == LAD:
            return self.s_prime <= self.s and len(cf.evaluate(self.s_prime)) > len(
                cf.evaluate(self.s)
            )
        raise InputError(f"unknown witness kind: {self.kind!r}")

    def describe(self) -> str:
        fmt = lambda xs: "{" + ",".join(sorted(xs)) + "}"
        return (
            f"{self.kind}: S={fmt(self.s)} C(S)={fmt(self.chosen_s)} "
            f"S'={fmt(self.s_prime)} C(S')={fmt(self.chosen_s_prime)}"
        )


def _nested_pairs(n: int) -> Iterator[tuple[int, int]]:
    """Pairs (s, sp) with sp <= s, minimal-witness order (|s|,|sp|,lex,lex)."""
    for ks in range(n + 1):
        for kp in range(ks + 1):
            for s_idx in itertools.combinations(range(n), ks):
                s = sum(1 << i for i in s_idx)
                for sp_idx in itertools.combinations(s_idx, kp):
                    yield s, sum(1 << i for i in sp_idx)


def _all_pairs(n: int) -> Iterator[tuple[int, int]]:
    """All pairs (s, sp), minimal-witness order (|s|,|sp|,lex,lex)."""
    for ks in range(n + 1):
        for kp in range(n + 1):
            for s_idx in itertools.combinations(range(n), ks):
                s = sum(1 << i for i in s_idx)
                for sp_idx in itertools.combinations(range(n), kp):
                    yield s, sum(1 << i for i in sp_idx)


def _witness(cf: ChoiceFunction, kind: str, s: int, sp: int) -> ChoiceWitness:
    return ChoiceWitness(
        kind=kind,
        s=cf.set_of(s),
        s_prime=cf.set_of(sp),
        chosen_s=cf.set_of(int(cf.table[s])),
        chosen_s_prime=cf.set_of(int(cf.table[sp])),
    )


def check_substitutable(cf: ChoiceFunction) -> tuple[bool, Optional[ChoiceWitness]]:
    """C(S) inter S' <= C(S') for all S' <= S; witness is the minimal failure."""
    if cf.is_substitutable():
        return True, None
    t = cf.table
    for s, sp in _nested_pairs(cf.n):
        if (int(t[s]) & sp) & ~int(t[sp]):
            return False, _witness(cf, SUBSTITUTABILITY, s, sp)
    raise AssertionError("kernel reported a violation but none was found")


def check_consistent(cf: ChoiceFunction) -> tuple[bool, Optional[ChoiceWitness]]:
    """C(S') = C(S) whenever C(S) <= S' <= S; witness is the minimal failure."""
    if cf.is_consistent():
        return True, None
    t = cf.table
    for s, sp in _nested_pairs(cf.n):
        cs = int(t[s])
        if (cs | sp) == sp and int(t[sp]) != cs:
            return False, _witness(cf, CONSISTENCY, s, sp)
    raise AssertionError("kernel reported a violation but none was found")


def check_path_independent(cf: ChoiceFunction) -> tuple[bool, Optional[ChoiceWitness]]:
    """C(S u S') = C(C(S) u S') for all pairs; witness is the minimal failure."""
    if cf.is_path_independent():
        return True, None
    t = cf.table
    for s, sp in _all_pairs(cf.n):
        if int(t[s | sp]) != int(t[int(t[s]) | sp]):
            return False, _witness(cf, PATH_INDEPENDENCE, s, sp)
    raise AssertionError("kernel reported a violation but none was found")


def check_lad(cf: ChoiceFunction) -> tuple[bool, Optional[ChoiceWitness]]:
    """|C(S')| <= |C(S)| for all S' <= S; witness is the minimal failure."""
    if cf.satisfies_lad():
        return True, None
    t = cf.table
    for s, sp in _nested_pairs(cf.n):
        if int(t[sp]).bit_count() > int(t[s]).bit_count():
            return False, _witness(cf, LAD, s, sp)
    raise AssertionError("kernel reported a violation but none was found")


def check_all(cf: ChoiceFunction) -> dict[str, tuple[bool, Optional[ChoiceWitness]]]:
    """Run all four checkers, keyed by law name."""
    return {
        SUBSTITUTABILITY: check_substitutable(cf),
        CONSISTENCY: check_consistent(cf),
        PATH_INDEPENDENCE: check_path_independent(cf),
        LAD: check_lad(cf),
    }


def choice_from_table(ground: Iterable[str], mapping) -> ChoiceFunction:
    """Build a choice function from an explicit subset -> choice mapping.

    The mapping must cover every subset of the ground set exactly once.
    """
    ids = tuple(sorted(ground))
    index = {w: i for i, w in enumerate(ids)}
    n = len(ids)
    if n > MAX_TABLE_GROUND:
        raise CapacityError(
            f"ground set of size {n} exceeds the table bound {MAX_TABLE_GROUND}"
        )
    table = np.full(1 << n, -1, dtype=np.int64)
    for subset, chosen in mapping.items():
        m = 0
        for w in subset:
            if w not in index:
                raise InputError(f"table subset lists unknown worker {w!r}")
            m |= 1 << index[w]
        c = 0
        for w in chosen:
            if w not in index:
                raise InputError(f"table choice lists unknown worker {w!r}")
            c |= 1 << index[w]
        if table[m] != -1:
            raise InputError(f"duplicate table entry for subset {sorted(subset)}")
        table[m] = c
    if np.any(table < 0):
        missing = int(np.nonzero(table < 0)[0][0])
        ids_missing = sorted(ids[i] for i in range(n) if missing >> i & 1)
        raise InputError(f"incomplete table: missing subset {{{','.join(ids_missing)}}}")
    return ChoiceFunction(ids, table)


def responsive_choice(
    ranking: Iterable[str], quota: int, ground: Iterable[str]
) -> ChoiceFunction:
    """Take the min(quota, .) highest-ranked acceptable workers of any set.

    Workers missing from ``ranking`` are never chosen.
    """
    ids = tuple(sorted(ground))
    index = {w: i for i, w in enumerate(ids)}
    ranking = list(ranking)
    if len(set(ranking)) != len(ranking):
        raise InputError(f"duplicate worker in ranking: {ranking}")
    if quota < 1:
        raise InputError(f"quota must be >= 1, got {quota}")
    for w in ranking:
        if w not in index:
            raise InputError(f"ranking lists unknown worker {w!r}")
    n = len(ids)
    table = np.zeros(1 << n, dtype=np.int64)
    bits = [1 << index[w] for w in ranking]
    for mask in range(1 << n):
        chosen = 0
        count = 0
        for b in bits:
            if mask & b:
                chosen |= b
                count += 1
                if count == quota:
                    break
        table[mask] = chosen
    return ChoiceFunction(
        ids, table, doc={"kind": "responsive", "ranking": list(ranking), "quota": quota}
    )


def theorem1_choice(mu_f: Iterable[str], ground: Iterable[str]) -> ChoiceFunction:
    """The intersection choice C(S) = mu_f inter S used by the full-game
    equilibrium construction: exactly the assigned set is ever chosen."""
    ids = tuple(sorted(ground))
    index = {w: i for i, w in enumerate(ids)}
    mu = 0
    mu_list = sorted(set(mu_f))
    for w in mu_list:
        if w not in index:
            raise InputError(f"assigned set lists unknown worker {w!r}")
        mu |= 1 << index[w]
    table = np.arange(1 << len(ids), dtype=np.int64) & mu
    cf = ChoiceFunction(ids, table, doc={"kind": "theorem1", "mu_f": mu_list})
    # on subsets of mu_f the choice is the identity, so strictly nested
    # subsets get strictly nested choices
    sp = mu
    while True:
        assert cf.table[sp] == sp
        if sp == 0:
            break
        sp = (sp - 1) & mu
    return cf


def choice_from_rule(ground: Iterable[str], rule: Callable) -> ChoiceFunction:
    """Materialize a choice rule (callable on frozensets) into a table."""
    ids = tuple(sorted(ground))
    if len(ids) > MAX_TABLE_GROUND:
        raise CapacityError(
            f"ground set of size {len(ids)} exceeds the table bound {MAX_TABLE_GROUND}"
        )
    index = {w: i for i, w in enumerate(ids)}
    n = len(ids)
    table = np.zeros(1 << n, dtype=np.int64)
    for mask in range(1 << n):
        subset = frozenset(ids[i] for i in range(n) if mask >> i & 1)
        chosen = rule(subset)
        m = 0
        for w in chosen:
            if w not in subset:
                raise InputError(f"rule chose {w!r} outside the offered set")
            m |= 1 << index[w]
        table[mask] = m
    return ChoiceFunction(ids, table)


def blair_geq(cf: ChoiceFunction, s: Iterable[str], t: Iterable[str]) -> bool:
    """True iff S = C(S u T): S revealed weakly better than T for the firm."""
    sm = cf.mask_of(s)
    tm = cf.mask_of(t)
    return int(cf.table[sm | tm]) == sm


@lru_cache(maxsize=None)
def _enumerated_tables(n: int, consistent: bool) -> tuple[tuple[int, ...], ...]:
    """DFS over canonical subset order, images tried in canonical rank order.

    Substitutability (and, when requested, consistency) is enforced against
    already-assigned smaller subsets, which is exhaustive because the
    canonical order is cardinality-major.
    """
    order = canonical_masks(n)
    rank = _mask_rank(n)
    table = [0] * (1 << n)
    results: list[tuple[int, ...]] = []

    def admissible(s: int, img: int) -> bool:
        for sp in _submasks(s):
            if sp == s:
                continue
            if (img & sp) & ~table[sp]:
                return False
            if consistent and (img | sp) == sp and table[sp] != img:
                return False
        return True

    def dfs(pos: int) -> None:
        if pos == len(order):
            results.append(tuple(table))
            return
        s = order[pos]
        if s == 0:
            dfs(pos + 1)
            return
        for img in sorted(_submasks(s), key=lambda m: rank[m]):
            if admissible(s, img):
                table[s] = img
                dfs(pos + 1)

    dfs(0)
    return tuple(results)


@lru_cache(maxsize=None)
def _enumerated_functions(
    ground: tuple[str, ...], consistent: bool
) -> tuple[ChoiceFunction, ...]:
    return tuple(
        ChoiceFunction(ground, np.array(tbl, dtype=np.int64))
        for tbl in _enumerated_tables(len(ground), consistent)
    )


def enumerate_path_independent(
    ground: Iterable[str], *, max_ground: int = PI_ENUMERATION_BOUND
) -> Iterator[ChoiceFunction]:
    """Every substitutable-and-consistent choice function on ``ground``.

    Yields each function exactly once, in the canonical order given by the
    concatenated choice images over subsets sorted by (cardinality,
    lexicographic ids).
    """
    ids = tuple(sorted(ground))
    if len(ids) > max_ground:
        raise CapacityError(
            f"ground set of size {len(ids)} exceeds the enumeration bound {max_ground}"
        )
    yield from _enumerated_functions(ids, True)


def enumerate_substitutable(
    ground: Iterable[str], *, max_ground: int = SUBSTITUTABLE_ENUMERATION_BOUND
) -> Iterator[ChoiceFunction]:
    """Substitutable-only variant (consistency dropped); larger family."""
    ids = tuple(sorted(ground))
    if len(ids) > max_ground:
        raise CapacityError(
            f"ground set of size {len(ids)} exceeds the enumeration bound {max_ground}"
        )
    yield from _enumerated_functions(ids, False)
