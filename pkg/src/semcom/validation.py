"""Empirical check of the key ordering against the exact objective.

For randomly generated instances, every pair of size-k subsets is
compared twice: by the symbolic key kappa and by the exact objective F
(sparse dyadic sign arithmetic, no approximation).  The exact value of
F depends only on the signature (K, sorted non-overlap specificity
exponents), so subsets are grouped by signature and only distinct
signatures are compared, which keeps the quadratic pair count cheap.

Agreement taxonomy per pair, with the exact-F order as the reference:

* ``agreements``      -- strict F order matched by strict kappa order,
                         or both tied.
* ``disagreements``   -- strict F order, kappa strictly reversed.
* ``key_ties_f_differs`` -- kappa tied but F strictly ordered.
* ``f_ties_key_strict``  -- F tied but kappa strictly ordered (recorded,
                         not failed: dominance collapses distinct keys
                         onto equal objective values, e.g. fully
                         witnessed subsets with different K).
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .logic import EvidenceItem, Hypothesis, QSentence
from .oracle import ClosedFormParams, HypothesisParams, exact_objective_compare
from .selection import KeyEngine


@dataclass
class DisagreementExample:
    trial: int
    T: int
    k: int
    pool_patterns: Tuple[int, ...]
    hypotheses: Tuple[Tuple[Tuple[int, int], ...], ...]
    subset_a: Tuple[int, ...]
    subset_b: Tuple[int, ...]
    key_a: Tuple[int, ...]
    key_b: Tuple[int, ...]
    f_sign: int


@dataclass
class ValidationReport:
    trials: int
    total_pairs: int = 0
    agreements: int = 0
    disagreements: int = 0
    key_ties_f_differs: int = 0
    f_ties_key_strict: int = 0
    elapsed_seconds: float = 0.0
    examples: List[DisagreementExample] = field(default_factory=list)

    def summary_lines(self) -> List[str]:
        lines = [
            "trials: %d" % self.trials,
            "subset pairs compared: %d" % self.total_pairs,
            "agreements: %d" % self.agreements,
            "disagreements: %d" % self.disagreements,
            "key ties with unequal objective: %d" % self.key_ties_f_differs,
            "objective ties with strict key order: %d" % self.f_ties_key_strict,
            "elapsed: %.2f s" % self.elapsed_seconds,
        ]
        for ex in self.examples[:5]:
            lines.append(
                "  disagreement in trial %d (T=%d, k=%d): subsets %s vs %s, "
                "keys %s vs %s, exact F sign %+d"
                % (ex.trial, ex.T, ex.k, ex.subset_a, ex.subset_b, ex.key_a, ex.key_b, ex.f_sign)
            )
        return lines


def random_instance(
    rng: random.Random,
    T_choices: Sequence[int] = (3, 4, 5),
    n_max: int = 8,
    k_max: int = 3,
    m_max: int = 6,
) -> Tuple[int, int, List[EvidenceItem], List[Hypothesis]]:
    """One random selection instance: pool plus hypothesis set."""
    T = rng.choice(list(T_choices))
    n = rng.randint(2, n_max)
    k = rng.randint(1, min(k_max, n - 1))
    pool = [EvidenceItem(i, QSentence(rng.randrange(1 << T), T)) for i in range(n)]
    hypotheses = []
    for hid in range(rng.randint(1, m_max)):
        z = rng.randint(1, T)
        slots = rng.sample(range(T), z)
        constraints = {s: rng.randint(0, 1) for s in slots}
        hypotheses.append(Hypothesis.from_constraints(hid, constraints, "a"))
    return T, k, pool, hypotheses


Signature = Tuple[int, Tuple[int, ...]]


def _signature_params(sig: Signature, T: int) -> ClosedFormParams:
    """Rebuild closed-form params from (K, non-overlap exponents)."""
    K, exps = sig
    hyps = tuple(HypothesisParams(z=T - g, overlaps=False) for g in exps)
    return ClosedFormParams(T=T, K=K, hypotheses=hyps)


def validate_key_ordering(
    trials: int,
    seed: int,
    T_choices: Sequence[int] = (3, 4, 5),
    n_max: int = 8,
    k_max: int = 3,
    max_examples: int = 10,
) -> ValidationReport:
    """Compare kappa ordering with exact-F ordering over random instances."""
    rng = random.Random(seed)
    report = ValidationReport(trials=trials)
    started = time.perf_counter()
    for trial in range(trials):
        T, k, pool, hypotheses = random_instance(rng, T_choices, n_max, k_max)
        engine = KeyEngine(hypotheses, T)
        groups: Dict[Tuple[Tuple[int, ...], Signature], List[Tuple[int, ...]]] = {}
        for combo in itertools.combinations(pool, k):
            key = engine.key_for_patterns(it.q.bits for it in combo)
            sig: Signature = (key.K, key.sorted_specificity_exponents)
            groups.setdefault((key.as_tuple(), sig), []).append(
                tuple(it.entity_id for it in combo)
            )
        # Same kappa implies the same signature, hence the same exact F:
        # only distinct group representatives need exact comparison.
        reps = list(groups.items())
        for (key_a, sig_a), members_a in reps:
            size_a = len(members_a)
            report.total_pairs += size_a * (size_a - 1) // 2
            report.agreements += size_a * (size_a - 1) // 2
        sign_cache: Dict[Tuple[Signature, Signature], int] = {}
        for i in range(len(reps)):
            (key_a, sig_a), members_a = reps[i]
            for j in range(i + 1, len(reps)):
                (key_b, sig_b), members_b = reps[j]
                pairs = len(members_a) * len(members_b)
                report.total_pairs += pairs
                key_sign = -1 if key_a < key_b else (1 if key_a > key_b else 0)
                if sig_a == sig_b:
                    f_sign = 0
                else:
                    cached = sign_cache.get((sig_a, sig_b))
                    if cached is None:
                        cached = exact_objective_compare(
                            _signature_params(sig_a, T), _signature_params(sig_b, T)
                        )
                        sign_cache[(sig_a, sig_b)] = cached
                    f_sign = cached
                if f_sign == key_sign:
                    report.agreements += pairs
                elif key_sign == 0:
                    report.key_ties_f_differs += pairs
                elif f_sign == 0:
                    report.f_ties_key_strict += pairs
                else:
                    report.disagreements += pairs
                    if len(report.examples) < max_examples:
                        report.examples.append(
                            DisagreementExample(
                                trial=trial,
                                T=T,
                                k=k,
                                pool_patterns=tuple(it.q.bits for it in pool),
                                hypotheses=tuple(h.fixed_slots for h in hypotheses),
                                subset_a=members_a[0],
                                subset_b=members_b[0],
                                key_a=key_a,
                                key_b=key_b,
                                f_sign=f_sign,
                            )
                        )
    report.elapsed_seconds = time.perf_counter() - started
    return report
