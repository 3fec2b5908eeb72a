"""Agents, preferences, matchings, and whole markets.

Identifiers are opaque strings, unique within their side.  A worker's
preference is the ordered list of firms she finds acceptable; firms left off
the list are unacceptable and rank strictly below staying unmatched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .errors import InputError

WorkerId = str
FirmId = str


@dataclass(frozen=True)
class WorkerPreference:
    """Strict preference list over firms, most-preferred first.

    The outside option (staying unmatched) sits directly after the last
    listed firm; unlisted firms are unacceptable.
    """

    acceptable: tuple[FirmId, ...]

    def __init__(self, acceptable: Iterable[FirmId] = ()):
        firms = tuple(acceptable)
        if len(set(firms)) != len(firms):
            raise InputError(f"duplicate firm in preference list: {firms}")
        object.__setattr__(self, "acceptable", firms)

    def accepts(self, firm: FirmId) -> bool:
        return firm in self.acceptable

    def rank(self, firm: Optional[FirmId]) -> int:
        """Position of ``firm`` (None = unmatched); lower is better.

        Listed firms rank by list position, None ranks len(acceptable), and
        every unlisted firm ranks len(acceptable) + 1.  Two distinct unlisted
        firms therefore share the bottom tier.
        """
        if firm is None:
            return len(self.acceptable)
        try:
            return self.acceptable.index(firm)
        except ValueError:
            return len(self.acceptable) + 1

    def __len__(self) -> int:
        return len(self.acceptable)


def worker_prefers(
    pref: WorkerPreference,
    a: Optional[FirmId],
    b: Optional[FirmId],
    firms: Optional[Iterable[FirmId]] = None,
) -> int:
    """Compare two outcomes under ``pref``: positive iff a is strictly better.

    Returns a positive number when a is strictly preferred to b, zero when
    they are equally ranked, negative otherwise.  When ``firms`` is given,
    ids outside it raise InputError.
    """
    if firms is not None:
        known = set(firms)
        for x in (a, b):
            if x is not None and x not in known:
                raise InputError(f"unknown firm id: {x!r}")
    return pref.rank(b) - pref.rank(a)


class Matching:
    """Two-sided assignment: each worker to at most one firm.

    Both directions are stored so lookups are O(1) either way; use
    :func:`validate_matching` to check that the two sides agree.
    """

    __slots__ = ("worker_side", "firm_side", "_key")

    def __init__(
        self,
        worker_side: Mapping[WorkerId, Optional[FirmId]],
        firm_side: Mapping[FirmId, Iterable[WorkerId]],
    ):
        self.worker_side: dict[WorkerId, Optional[FirmId]] = dict(worker_side)
        self.firm_side: dict[FirmId, frozenset[WorkerId]] = {
            f: frozenset(ws) for f, ws in firm_side.items()
        }
        self._key = (
            tuple(sorted(self.worker_side.items(), key=lambda kv: kv[0])),
            tuple(sorted((f, tuple(sorted(ws))) for f, ws in self.firm_side.items())),
        )

    @classmethod
    def from_worker_side(
        cls,
        assignment: Mapping[WorkerId, Optional[FirmId]],
        firms: Iterable[FirmId],
    ) -> "Matching":
        """Build a consistent matching from the worker side alone."""
        firm_side: dict[FirmId, set[WorkerId]] = {f: set() for f in firms}
        for w, f in assignment.items():
            if f is not None:
                if f not in firm_side:
                    raise InputError(f"unknown firm id: {f!r}")
                firm_side[f].add(w)
        return cls(assignment, firm_side)

    def firm_of(self, worker: WorkerId) -> Optional[FirmId]:
        return self.worker_side[worker]

    def workers_of(self, firm: FirmId) -> frozenset[WorkerId]:
        return self.firm_side.get(firm, frozenset())

    def matched_pairs(self) -> tuple[tuple[WorkerId, FirmId], ...]:
        return tuple(
            sorted((w, f) for w, f in self.worker_side.items() if f is not None)
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Matching) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        pairs = ", ".join(f"{w}->{f}" for w, f in self.matched_pairs())
        return f"Matching({pairs or 'empty'})"


@dataclass(frozen=True)
class MatchingValidation:
    """Outcome of validating a matching against Definition-style clauses."""

    ok: bool
    clause: Optional[str] = None
    offenders: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


class Market:
    """A many-to-one market: workers, firms, preferences, and choices."""

    __slots__ = ("workers", "firms", "preferences", "choices")

    def __init__(
        self,
        workers: Iterable[WorkerId],
        firms: Iterable[FirmId],
        preferences: Mapping[WorkerId, WorkerPreference],
        choices: Mapping[FirmId, "ChoiceFunction"],
    ):
        self.workers: tuple[WorkerId, ...] = tuple(sorted(set(workers)))
        self.firms: tuple[FirmId, ...] = tuple(sorted(set(firms)))
        if set(self.workers) & set(self.firms):
            overlap = sorted(set(self.workers) & set(self.firms))
            raise InputError(f"worker and firm ids must be disjoint: {overlap}")
        self.preferences = dict(preferences)
        self.choices = dict(choices)
        if set(self.preferences) != set(self.workers):
            raise InputError("preferences must cover exactly the worker set")
        if set(self.choices) != set(self.firms):
            raise InputError("choices must cover exactly the firm set")
        firm_set = set(self.firms)
        for w, pref in self.preferences.items():
            unknown = [f for f in pref.acceptable if f not in firm_set]
            if unknown:
                raise InputError(f"preference of {w!r} lists unknown firms: {unknown}")
        for f, choice in self.choices.items():
            if tuple(choice.ground) != self.workers:
                raise InputError(
                    f"choice function of {f!r} has ground {choice.ground}, "
                    f"expected the full worker set {self.workers}"
                )

    def preference(self, worker: WorkerId) -> WorkerPreference:
        try:
            return self.preferences[worker]
        except KeyError:
            raise InputError(f"unknown worker id: {worker!r}") from None

    def choice(self, firm: FirmId) -> "ChoiceFunction":
        try:
            return self.choices[firm]
        except KeyError:
            raise InputError(f"unknown firm id: {firm!r}") from None

    def worker_prefers(
        self, worker: WorkerId, a: Optional[FirmId], b: Optional[FirmId]
    ) -> int:
        return worker_prefers(self.preference(worker), a, b, firms=self.firms)

    def empty_matching(self) -> Matching:
        return Matching.from_worker_side({w: None for w in self.workers}, self.firms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Market)
            and self.workers == other.workers
            and self.firms == other.firms
            and self.preferences == other.preferences
            and self.choices == other.choices
        )

    def __repr__(self) -> str:
        return f"Market(workers={self.workers}, firms={self.firms})"


def validate_matching(matching: Matching, market: Market) -> MatchingValidation:
    """Check the structural matching clauses against ``market``.

    Unknown agent ids raise InputError; structural violations are reported
    with the first violated clause and the offending agents.  Clause (iii) is
    the bidirectional consistency w in mu(f) <=> mu(w) = f.
    """
    workers = set(market.workers)
    firms = set(market.firms)
    for w in matching.worker_side:
        if w not in workers:
            raise InputError(f"unknown worker id: {w!r}")
    for f in matching.firm_side:
        if f not in firms:
            raise InputError(f"unknown firm id: {f!r}")
    for w, f in matching.worker_side.items():
        if f is not None and f not in firms:
            raise InputError(f"unknown firm id: {f!r}")
    for f, ws in matching.firm_side.items():
        for w in ws:
            if w not in workers:
                raise InputError(f"unknown worker id: {w!r}")
    missing = workers - set(matching.worker_side)
    if missing:
        return MatchingValidation(False, "worker-domain", tuple(sorted(missing)))
    missing_f = firms - set(matching.firm_side)
    if missing_f:
        return MatchingValidation(False, "firm-domain", tuple(sorted(missing_f)))
    # clause (iii): w in mu(f) <=> mu(w) = f, checked in both directions
    for w in sorted(matching.worker_side):
        f = matching.worker_side[w]
        if f is not None and w not in matching.firm_side[f]:
            return MatchingValidation(False, "(iii)", (w, f))
    for f in sorted(matching.firm_side):
        for w in sorted(matching.firm_side[f]):
            if matching.worker_side.get(w) != f:
                return MatchingValidation(False, "(iii)", (w, f))
    return MatchingValidation(True)
