"""Grounding, slot maps, and hypothesis satisfaction."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semcom.errors import ConfigurationError, GroundingError
from semcom.logic import (
    EvidenceItem,
    Hypothesis,
    MAX_ENGINE_T,
    PredicateCategory,
    PredicateVocabulary,
    QSentence,
    build_slot_map,
    distinct_q,
    ground_pair,
    hypothesis_satisfied_by,
)
from semcom.world import DEFAULT_PREDICATE_ORDER, default_vocabulary

MON = PredicateCategory.MONADIC
EGO_ENT = PredicateCategory.EGO_ENTITY
ENT_EGO = PredicateCategory.ENTITY_EGO


def two_slot_vocab():
    return PredicateVocabulary(predicates=(("Hot", MON), ("Behind", EGO_ENT)))


# ---------------------------------------------------------------- vocabulary


def test_slots_follow_declaration_order():
    vocab = PredicateVocabulary(
        predicates=(("A", MON), ("B", EGO_ENT), ("C", ENT_EGO))
    )
    assert vocab.T == 3
    assert [vocab.slot_of(n) for n in "ABC"] == [0, 1, 2]
    slot_map = build_slot_map(vocab)
    assert slot_map.T == 3
    assert slot_map.slot(EGO_ENT, "B") == 1


def test_default_vocabulary_is_ten_wide():
    vocab = default_vocabulary()
    assert vocab.T == 10
    assert tuple(name for name, _ in vocab.predicates) == DEFAULT_PREDICATE_ORDER


def test_wide_vocabulary_is_supported():
    # widths well past the shipped ten slots must still ground and key
    preds = tuple(("P%d" % i, MON) for i in range(34))
    vocab = PredicateVocabulary(predicates=preds)
    assert vocab.T == 34
    h = Hypothesis.from_constraints(1, {33: 1}, "Stop")
    h.validate_width(34)


def test_vocabulary_rejects_empty():
    with pytest.raises(ConfigurationError):
        PredicateVocabulary(predicates=())


def test_vocabulary_rejects_duplicate_names():
    with pytest.raises(ConfigurationError, match="duplicate"):
        PredicateVocabulary(predicates=(("A", MON), ("A", EGO_ENT)))


def test_vocabulary_rejects_widths_past_engine_bound():
    preds = tuple(("P%d" % i, MON) for i in range(MAX_ENGINE_T + 1))
    with pytest.raises(ConfigurationError):
        PredicateVocabulary(predicates=preds)


def test_slot_lookup_unknown_name():
    with pytest.raises(ConfigurationError):
        two_slot_vocab().slot_of("Cold")
    with pytest.raises(GroundingError):
        build_slot_map(two_slot_vocab()).slot(MON, "Cold")


# ------------------------------------------------------------------ grounding


def test_ground_pair_all_false_is_zero():
    slot_map = build_slot_map(two_slot_vocab())
    q = ground_pair({(MON, "Hot"): 0, (EGO_ENT, "Behind"): 0}, slot_map)
    assert q == QSentence(bits=0, width=2)


def test_ground_pair_sets_one_bit_per_true_slot():
    slot_map = build_slot_map(two_slot_vocab())
    assert ground_pair({(MON, "Hot"): 1, (EGO_ENT, "Behind"): 0}, slot_map).bits == 0b01
    assert ground_pair({(MON, "Hot"): 0, (EGO_ENT, "Behind"): 1}, slot_map).bits == 0b10
    assert ground_pair({(MON, "Hot"): 1, (EGO_ENT, "Behind"): 1}, slot_map).bits == 0b11


def test_ground_pair_requires_total_assignment():
    slot_map = build_slot_map(two_slot_vocab())
    with pytest.raises(GroundingError):
        ground_pair({(MON, "Hot"): 1}, slot_map)
    with pytest.raises(GroundingError):
        ground_pair(
            {(MON, "Hot"): 1, (EGO_ENT, "Behind"): 0, (MON, "Stray"): 1}, slot_map
        )


def test_grounding_is_functional():
    slot_map = build_slot_map(two_slot_vocab())
    a = ground_pair({(MON, "Hot"): 1, (EGO_ENT, "Behind"): 0}, slot_map)
    b = ground_pair({(EGO_ENT, "Behind"): 0, (MON, "Hot"): 1}, slot_map)
    assert a == b


def test_three_entity_scene_grounds_to_hand_checked_patterns():
    # ego observes three entities; truth values filled in by hand
    slot_map = build_slot_map(two_slot_vocab())
    scene = [
        (101, {(MON, "Hot"): 1, (EGO_ENT, "Behind"): 1}),
        (102, {(MON, "Hot"): 0, (EGO_ENT, "Behind"): 1}),
        (103, {(MON, "Hot"): 0, (EGO_ENT, "Behind"): 0}),
    ]
    items = [
        EvidenceItem(entity_id=eid, q=ground_pair(assignment, slot_map))
        for eid, assignment in scene
    ]
    assert [it.q.bits for it in items] == [0b11, 0b10, 0b00]
    assert len(distinct_q(items)) == 3


# ----------------------------------------------------------------- Q-sentences


def test_q_sentence_width_must_be_positive():
    with pytest.raises(ConfigurationError):
        QSentence(bits=0, width=0)


def test_q_sentence_bits_must_fit_width():
    with pytest.raises(ConfigurationError):
        QSentence(bits=4, width=2)
    with pytest.raises(ConfigurationError):
        QSentence(bits=-1, width=2)


def test_q_sentence_renders_fixed_width():
    assert str(QSentence(bits=0b10, width=4)) == "0010"


# ----------------------------------------------------------------- hypotheses


def test_hypothesis_needs_at_least_one_fixed_slot():
    with pytest.raises(ConfigurationError):
        Hypothesis.from_constraints(1, {}, "Stop")


def test_hypothesis_rejects_bad_slot_values():
    with pytest.raises(ConfigurationError):
        Hypothesis.from_constraints(1, {0: 2}, "Stop")
    with pytest.raises(ConfigurationError):
        Hypothesis.from_constraints(1, {-1: 1}, "Stop")


def test_hypothesis_width_validation():
    h = Hypothesis.from_constraints(3, {0: 1, 3: 0}, "Slow")
    h.validate_width(4)
    with pytest.raises(ConfigurationError):
        h.validate_width(2)


def test_compatible_pattern_count_is_two_to_unfixed_slots():
    h = Hypothesis.from_constraints(3, {0: 1, 3: 0}, "Slow")
    assert h.Z == 2
    assert h.specificity_exponent(4) == 2
    assert sorted(q.bits for q in h.compatible_qs(4)) == [0b0001, 0b0011, 0b0101, 0b0111]


def test_satisfaction_exhaustive_at_width_two():
    # every hypothesis shape against every pattern, checked against a
    # direct bit comparison
    for z, slots in [(1, [(0,), (1,)]), (2, [(0, 1)])]:
        for chosen in slots:
            for bits_choice in itertools.product((0, 1), repeat=z):
                h = Hypothesis.from_constraints(
                    9, dict(zip(chosen, bits_choice)), "Stop"
                )
                for pattern in range(4):
                    q = QSentence(bits=pattern, width=2)
                    expected = all(
                        (pattern >> s) & 1 == b for s, b in zip(chosen, bits_choice)
                    )
                    assert hypothesis_satisfied_by(q, h) is expected


@st.composite
def hypothesis_and_satisfier(draw):
    T = draw(st.integers(min_value=2, max_value=8))
    z = draw(st.integers(min_value=2, max_value=T))
    slots = draw(
        st.lists(
            st.integers(min_value=0, max_value=T - 1),
            min_size=z,
            max_size=z,
            unique=True,
        )
    )
    fixed = {s: draw(st.integers(min_value=0, max_value=1)) for s in slots}
    bits = 0
    for s in range(T):
        bits |= (fixed.get(s, draw(st.integers(min_value=0, max_value=1))) << s)
    return T, fixed, QSentence(bits=bits, width=T)


@given(hypothesis_and_satisfier())
@settings(max_examples=200)
def test_dropping_a_constraint_never_unsatisfies(case):
    T, fixed, q = case
    full = Hypothesis.from_constraints(1, fixed, "Stop")
    assert hypothesis_satisfied_by(q, full)
    for drop in fixed:
        weaker = {s: b for s, b in fixed.items() if s != drop}
        assert hypothesis_satisfied_by(q, Hypothesis.from_constraints(2, weaker, "Stop"))


# --------------------------------------------------------------- distinct_q


def test_distinct_q_collapses_repeated_patterns():
    items = [
        EvidenceItem(entity_id=1, q=QSentence(bits=0b01, width=2)),
        EvidenceItem(entity_id=2, q=QSentence(bits=0b01, width=2)),
        EvidenceItem(entity_id=3, q=QSentence(bits=0b11, width=2)),
    ]
    assert distinct_q(items) == frozenset(
        {QSentence(bits=0b01, width=2), QSentence(bits=0b11, width=2)}
    )
    assert distinct_q([]) == frozenset()


@given(
    st.lists(
        st.tuples(st.integers(min_value=0, max_value=999), st.integers(0, 15)),
        max_size=12,
        unique_by=lambda t: t[0],
    )
)
def test_distinct_q_matches_set_of_bit_patterns(pairs):
    pool = [EvidenceItem(entity_id=i, q=QSentence(bits=b, width=4)) for i, b in pairs]
    assert {q.bits for q in distinct_q(pool)} == {b for _, b in pairs}
