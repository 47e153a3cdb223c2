"""Predicate vocabularies, Q-sentences, hypotheses, and grounding.

A Q-sentence is the complete true/false pattern over all T predicate
slots for one (ego, entity) pair.  It is stored as a plain bit pattern:
slot ``s`` maps to bit position ``s``, and a set sign flag becomes bit
value 1.  Exactly one Q-sentence holds for a pair under a full truth
assignment, which makes grounding a total function.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Mapping, Tuple

from .errors import ConfigurationError, GroundingError

MAX_ENGINE_T = 62


class PredicateCategory(str, Enum):
    MONADIC = "monadic-on-entity"
    EGO_ENTITY = "dyadic-ego-entity"
    ENTITY_EGO = "dyadic-entity-ego"


PredicateKey = Tuple[PredicateCategory, str]


@dataclass(frozen=True)
class PredicateVocabulary:
    """Ordered list of predicate occurrences; T is the slot count."""

    predicates: Tuple[Tuple[str, PredicateCategory], ...]

    def __post_init__(self) -> None:
        if not self.predicates:
            raise ConfigurationError("vocabulary must list at least one predicate")
        names = [name for name, _ in self.predicates]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ConfigurationError(
                "duplicate predicate name(s): %s" % ", ".join(sorted(dupes))
            )
        if len(self.predicates) > MAX_ENGINE_T:
            raise ConfigurationError(
                "T=%d exceeds the engine bound of %d slots"
                % (len(self.predicates), MAX_ENGINE_T)
            )

    @property
    def T(self) -> int:
        return len(self.predicates)

    def slot_of(self, name: str) -> int:
        for i, (pname, _) in enumerate(self.predicates):
            if pname == name:
                return i
        raise ConfigurationError("unknown predicate %r" % name)


@dataclass(frozen=True)
class SlotMap:
    """Deterministic bijection (category, name) -> slot index in [0, T)."""

    by_key: Mapping[PredicateKey, int]
    T: int

    def slot(self, category: PredicateCategory, name: str) -> int:
        try:
            return self.by_key[(category, name)]
        except KeyError:
            raise GroundingError(
                "no slot for predicate (%s, %s)" % (category.value, name)
            ) from None


def build_slot_map(vocab: PredicateVocabulary) -> SlotMap:
    """Assign slots in declaration order; same vocabulary, same map."""
    mapping: Dict[PredicateKey, int] = {}
    for i, (name, category) in enumerate(vocab.predicates):
        mapping[(category, name)] = i
    return SlotMap(by_key=mapping, T=vocab.T)


@dataclass(frozen=True, order=True)
class QSentence:
    """Fixed-width bit pattern; bit s holds the sign of slot s."""

    bits: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ConfigurationError("QSentence width must be positive")
        if not 0 <= self.bits < (1 << self.width):
            raise ConfigurationError(
                "bits %d out of range for width %d" % (self.bits, self.width)
            )

    def bit(self, slot: int) -> int:
        return (self.bits >> slot) & 1

    def __str__(self) -> str:
        return format(self.bits, "0%db" % self.width)


@dataclass(frozen=True)
class Hypothesis:
    """A goal-oriented state: fixed predicate slots plus an action.

    ``fixed_slots`` is a sorted tuple of (slot, bit) pairs; Z is its
    length and the specificity is 2**(T - Z) compatible Q-sentences,
    always handled as the exponent T - Z.
    """

    id: int
    fixed_slots: Tuple[Tuple[int, int], ...]
    action: str

    def __post_init__(self) -> None:
        slots = [s for s, _ in self.fixed_slots]
        if not slots:
            raise ConfigurationError("hypothesis %d fixes no slot (Z >= 1 required)" % self.id)
        if len(set(slots)) != len(slots):
            raise ConfigurationError("hypothesis %d repeats a slot" % self.id)
        if any(s < 0 for s in slots) or any(v not in (0, 1) for _, v in self.fixed_slots):
            raise ConfigurationError("hypothesis %d has an invalid (slot, value) pair" % self.id)
        object.__setattr__(self, "fixed_slots", tuple(sorted(self.fixed_slots)))

    @classmethod
    def from_constraints(cls, id: int, constraints: Mapping[int, int], action: str) -> "Hypothesis":
        return cls(id=id, fixed_slots=tuple(sorted(constraints.items())), action=action)

    @property
    def Z(self) -> int:
        return len(self.fixed_slots)

    def specificity_exponent(self, T: int) -> int:
        """Exponent of the compatible-Q-sentence count, T - Z."""
        self.validate_width(T)
        return T - self.Z

    def validate_width(self, T: int) -> None:
        if any(s >= T for s, _ in self.fixed_slots):
            raise ConfigurationError(
                "hypothesis %d fixes slot beyond width T=%d" % (self.id, T)
            )

    def compatible_qs(self, T: int) -> FrozenSet[QSentence]:
        """All 2**(T-Z) Q-sentences satisfying the fixed slots (tiny T only)."""
        self.validate_width(T)
        fixed = dict(self.fixed_slots)
        out = []
        free = [s for s in range(T) if s not in fixed]
        base = sum(v << s for s, v in fixed.items())
        for combo in range(1 << len(free)):
            bits = base
            for j, s in enumerate(free):
                if (combo >> j) & 1:
                    bits |= 1 << s
            out.append(QSentence(bits, T))
        return frozenset(out)


@dataclass(frozen=True)
class EvidenceItem:
    """One grounded observation: the Q-sentence of an (ego, entity) pair."""

    entity_id: int
    q: QSentence


def ground_pair(truth_assignment: Mapping[PredicateKey, int], slot_map: SlotMap) -> QSentence:
    """Fold a full truth assignment into the pair's unique Q-sentence.

    Every predicate occurrence in the slot map must receive a bit;
    partial evidence is rejected because the indicator model assumes
    fully observed slots.
    """
    bits = 0
    seen = 0
    for key, slot in slot_map.by_key.items():
        try:
            val = truth_assignment[key]
        except KeyError:
            raise GroundingError(
                "missing value for predicate (%s, %s)" % (key[0].value, key[1])
            ) from None
        if val not in (0, 1, True, False):
            raise GroundingError("non-boolean value %r for %s" % (val, key[1]))
        if val:
            bits |= 1 << slot
        seen += 1
    if len(truth_assignment) != seen:
        extra = set(truth_assignment) - set(slot_map.by_key)
        raise GroundingError(
            "truth assignment names unknown predicates: %s" % sorted(str(k) for k in extra)
        )
    return QSentence(bits, slot_map.T)


def hypothesis_satisfied_by(q: QSentence, h: Hypothesis) -> bool:
    """True iff every fixed slot of h matches q (the overlap predicate)."""
    h.validate_width(q.width)
    return all(q.bit(s) == v for s, v in h.fixed_slots)


def distinct_q(pool: Iterable[EvidenceItem]) -> FrozenSet[QSentence]:
    """The set of distinct Q-sentences in a pool; K is its cardinality."""
    return frozenset(item.q for item in pool)
