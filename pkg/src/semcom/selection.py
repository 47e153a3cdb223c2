"""Budgeted evidence selection via the symbolic lexicographic key.

Enumerating probabilities to pick the best k-subset is hopeless (they
live at scales like 2**-2**30), so subsets are ranked by the key

    kappa = (n_nonoverlap, K, -H_(1), -H_(2), ...)

with the non-overlapping specificities H sorted ascending.  Everything
is exponent arithmetic: H = 2**(T-Z) is never formed, only T-Z, because
ordering by exponent equals ordering by value.  Minimizing kappa
lexicographically prefers subsets that witness more hypotheses, then
fewer distinct Q-sentences, then larger minimum specificity.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import ConfigurationError, FeasibilityError
from .logic import EvidenceItem, Hypothesis, distinct_q, hypothesis_satisfied_by

DEFAULT_ENUMERATION_CAP = 10**7


@dataclass(frozen=True)
class SelectionKey:
    """The comparison key kappa as small integers.

    sorted_specificity_exponents holds T-Z per non-overlapping
    hypothesis, ascending (so ascending H).  Comparison is lexicographic
    on (n_nonoverlap, K, -H_(1), -H_(2), ...); since the lists only meet
    when n_nonoverlap ties, their lengths always match there.
    """

    n_nonoverlap: int
    K: int
    sorted_specificity_exponents: Tuple[int, ...]

    def __post_init__(self) -> None:
        exps = self.sorted_specificity_exponents
        if len(exps) != self.n_nonoverlap:
            raise ConfigurationError("exponent list length must equal n_nonoverlap")
        if any(exps[i] > exps[i + 1] for i in range(len(exps) - 1)):
            raise ConfigurationError("specificity exponents must be ascending")

    def as_tuple(self) -> Tuple[int, ...]:
        return (
            self.n_nonoverlap,
            self.K,
            *(-g for g in self.sorted_specificity_exponents),
        )


def lex_compare(a: SelectionKey, b: SelectionKey) -> int:
    """-1, 0, or 1 as a orders before, with, or after b."""
    ta, tb = a.as_tuple(), b.as_tuple()
    if ta < tb:
        return -1
    if ta > tb:
        return 1
    return 0


class KeyEngine:
    """Key computation for one fixed (hypotheses, T) pair, with caches.

    Satisfaction masks per distinct Q-sentence turn the key into
    OR/popcount work, and exponent tails are memoized per
    uncovered-hypothesis mask.  One engine per rule set is the intended
    usage; all public selection functions delegate here so there is a
    single implementation of the ordering.
    """

    def __init__(self, hypotheses: Sequence[Hypothesis], T: int):
        if not hypotheses:
            raise ConfigurationError("at least one hypothesis is required")
        for h in hypotheses:
            h.validate_width(T)
        self.hypotheses = tuple(hypotheses)
        self.T = T
        self.exponents = tuple(h.specificity_exponent(T) for h in hypotheses)
        self.full_mask = (1 << len(hypotheses)) - 1
        self._sat: Dict[int, int] = {}
        self._tails: Dict[int, Tuple[int, ...]] = {}

    def sat_mask(self, qbits: int) -> int:
        """Bitmask of hypotheses satisfied by the Q-sentence pattern."""
        try:
            return self._sat[qbits]
        except KeyError:
            mask = 0
            for i, h in enumerate(self.hypotheses):
                if all((qbits >> s) & 1 == v for s, v in h.fixed_slots):
                    mask |= 1 << i
            self._sat[qbits] = mask
            return mask

    def _tail(self, uncovered: int) -> Tuple[int, ...]:
        try:
            return self._tails[uncovered]
        except KeyError:
            exps = sorted(
                self.exponents[i] for i in range(len(self.exponents)) if (uncovered >> i) & 1
            )
            tail = tuple(-g for g in exps)
            self._tails[uncovered] = tail
            return tail

    def key_for_patterns(self, qbits_list: Iterable[int]) -> SelectionKey:
        distinct = set(qbits_list)
        covered = 0
        for qbits in distinct:
            covered |= self.sat_mask(qbits)
        uncovered = self.full_mask & ~covered
        tail = self._tail(uncovered)
        return SelectionKey(
            n_nonoverlap=uncovered.bit_count(),
            K=len(distinct),
            sorted_specificity_exponents=tuple(-g for g in tail),
        )

    def select(self, entries: Sequence[Tuple[int, int]], k: int) -> Tuple[int, ...]:
        """kappa-lex-minimal k-subset of (entity_id, qbits) entries.

        Entries must be sorted ascending by entity id; ties on kappa go
        to the first combination in id-lexicographic order, i.e. the
        smallest sorted id tuple.
        """
        if len(entries) <= k:
            return tuple(e[0] for e in entries)
        masks = [self.sat_mask(qbits) for _, qbits in entries]
        patterns = [qbits for _, qbits in entries]
        full = self.full_mask
        best_head: Optional[Tuple[int, int]] = None
        best_tail: Tuple[int, ...] = ()
        best_combo: Tuple[int, ...] = ()
        for combo in itertools.combinations(range(len(entries)), k):
            covered = 0
            qset = set()
            for idx in combo:
                covered |= masks[idx]
                qset.add(patterns[idx])
            uncovered = full & ~covered
            head = (uncovered.bit_count(), len(qset))
            if best_head is not None:
                if head > best_head:
                    continue
                if head == best_head:
                    tail = self._tail(uncovered)
                    if tail >= best_tail:
                        continue
                    best_tail = tail
                else:
                    best_tail = self._tail(uncovered)
            else:
                best_tail = self._tail(uncovered)
            best_head = head
            best_combo = combo
        return tuple(entries[i][0] for i in best_combo)


def comparison_key(
    subset: Iterable[EvidenceItem], hypotheses: Sequence[Hypothesis], T: int
) -> SelectionKey:
    """Compute kappa for one candidate subset."""
    subset = tuple(subset)
    if not subset:
        raise ConfigurationError("comparison key needs a non-empty subset")
    qs = distinct_q(subset)
    exponents = []
    for h in hypotheses:
        if not any(hypothesis_satisfied_by(q, h) for q in qs):
            exponents.append(h.specificity_exponent(T))
    exponents.sort()
    return SelectionKey(
        n_nonoverlap=len(exponents),
        K=len(qs),
        sorted_specificity_exponents=tuple(exponents),
    )


def _sorted_by_entity(pool: Iterable[EvidenceItem]) -> List[EvidenceItem]:
    return sorted(pool, key=lambda item: item.entity_id)


def select_semantic(
    pool: Iterable[EvidenceItem],
    hypotheses: Sequence[Hypothesis],
    k: int,
    T: int,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    engine: Optional[KeyEngine] = None,
) -> FrozenSet[EvidenceItem]:
    """The kappa-lex-minimal size-k subset of the pool.

    Pools at or under budget are returned whole.  Ties on kappa go to
    the smallest sorted entity-id tuple, which also makes the result
    invariant under pool permutation.
    """
    if k < 1:
        raise ConfigurationError("budget k must be at least 1")
    items = _sorted_by_entity(pool)
    if len({it.entity_id for it in items}) != len(items):
        raise ConfigurationError("pool contains duplicate entity ids")
    if len(items) <= k:
        return frozenset(items)
    n_subsets = comb(len(items), k)
    if n_subsets > enumeration_cap:
        raise FeasibilityError(
            "C(%d, %d) = %d subsets exceeds the enumeration cap of %d"
            % (len(items), k, n_subsets, enumeration_cap)
        )
    if engine is None:
        engine = KeyEngine(hypotheses, T)
    chosen = engine.select([(it.entity_id, it.q.bits) for it in items], k)
    by_id = {it.entity_id: it for it in items}
    return frozenset(by_id[i] for i in chosen)


def select_random(
    pool: Iterable[EvidenceItem], k: int, rng_seed: int
) -> FrozenSet[EvidenceItem]:
    """Uniform without-replacement sample, reproducible from the seed."""
    if k < 1:
        raise ConfigurationError("budget k must be at least 1")
    items = _sorted_by_entity(pool)
    if len(items) <= k:
        return frozenset(items)
    rng = random.Random(rng_seed)
    return frozenset(rng.sample(items, k))
