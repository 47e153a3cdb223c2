"""Episode evaluation against the full-information baseline.

One trajectory is simulated per (scenario, rule set, seed), driven by
full-information decisions.  Every (architecture, strategy, budget)
cell is then scored counterfactually on that shared trajectory, so a
semantic-vs-random difference on a seed isolates the selection strategy
rather than divergent world histories.

Truth vectors are stored as hypothesis bitmasks.  Because strategy
evidence (FOV plus downlink) is always a subset of full-information
evidence (the vicinity) and hypothesis evaluation is existential, a
strategy mask is a submask of the FI mask; mismatches are the FI bits
the strategy failed to witness.
"""

from __future__ import annotations

import csv
import itertools
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .comms import (
    MULTI_ZONE_LNA,
    RANDOM,
    SEMANTIC,
    SENSOR_GNA,
    SINGLE_ZONE_GNA,
    Architecture,
    zone_of,
)
from .errors import ConfigurationError, UndefinedMetricError
from .logic import build_slot_map
from .selection import KeyEngine
from .world import (
    CAR,
    RuleSet,
    ScenarioConfig,
    chebyshev,
    ground_entity,
    init_world,
    step,
)

CSV_HEADER = (
    "architecture",
    "rule_set",
    "strategy",
    "k",
    "seeds",
    "hdsr_mean",
    "hdsr_std",
    "adsr_mean",
    "adsr_std",
)


@dataclass(frozen=True)
class TraceRecord:
    step: int
    agent_id: int
    fi_mask: int
    fi_action: str
    strategy_mask: int
    strategy_action: str


@dataclass(frozen=True)
class EpisodeTrace:
    n_hypotheses: int
    records: Tuple[TraceRecord, ...]


@dataclass(frozen=True)
class MetricsRow:
    architecture: str
    rule_set: str
    strategy: str
    k: int
    seed: int
    hdsr: float
    adsr: float


@dataclass(frozen=True)
class AggregateRow:
    architecture: str
    rule_set: str
    strategy: str
    k: int
    seeds: int
    hdsr_mean: float
    hdsr_std: float
    adsr_mean: float
    adsr_std: float


def hypothesis_dsr(trace: EpisodeTrace) -> float:
    """Fraction of (step, agent, hypothesis) evaluations matching FI."""
    if not trace.records or trace.n_hypotheses == 0:
        raise UndefinedMetricError("H-DSR over an empty trace")
    total = len(trace.records) * trace.n_hypotheses
    mismatches = sum((r.fi_mask ^ r.strategy_mask).bit_count() for r in trace.records)
    return (total - mismatches) / total


def action_dsr(trace: EpisodeTrace) -> float:
    """Fraction of (step, agent) decisions matching FI."""
    if not trace.records:
        raise UndefinedMetricError("A-DSR over an empty trace")
    matches = sum(1 for r in trace.records if r.strategy_action == r.fi_action)
    return matches / len(trace.records)


# ---------------------------------------------------------------------------
# Trajectory precomputation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepView:
    """Everything one ego needs at one step, for any architecture."""

    fov_ids: Tuple[int, ...]
    vic_ids: Tuple[int, ...]
    qbits: Mapping[int, int]
    pools: Mapping[str, Tuple[int, ...]]
    fi_mask: int
    fi_action: str


@dataclass(frozen=True)
class Trajectory:
    scenario_name: str
    rule_set_name: str
    seed: int
    n_hypotheses: int
    views: Tuple[Mapping[int, StepView], ...]


class _ActionTable:
    """Memoized truth-mask to action resolution for one rule set."""

    def __init__(self, rules: RuleSet):
        self.rules = rules
        self._priority = tuple(rules.priority_index(h.action) for h in rules.hypotheses)
        self._actions = tuple(h.action for h in rules.hypotheses)
        self._default_idx = rules.priority_index("Normal")
        self._memo: Dict[int, str] = {}

    def action_of(self, mask: int) -> str:
        try:
            return self._memo[mask]
        except KeyError:
            best_idx, best_action = self._default_idx, "Normal"
            m = mask
            while m:
                low = m & -m
                i = low.bit_length() - 1
                if self._priority[i] < best_idx:
                    best_idx, best_action = self._priority[i], self._actions[i]
                m ^= low
            self._memo[mask] = best_action
            return best_action


def build_trajectory(
    scenario: ScenarioConfig,
    rules: RuleSet,
    seed: int,
    zones: int = 2,
    engine: Optional[KeyEngine] = None,
) -> Trajectory:
    """Simulate one episode under full-information decisions.

    Cars are the deciding egos; pedestrians advance on their scripted
    routes.  Pools are precomputed for all three architecture kinds
    using the given zone grid, so every matrix cell replays the same
    states.
    """
    slot_map = build_slot_map(scenario.vocabulary)
    T = scenario.vocabulary.T
    if engine is None:
        engine = KeyEngine(rules.hypotheses, T)
    table = _ActionTable(rules)
    obs = scenario.observation
    world = init_world(scenario, seed)
    per_step: List[Dict[int, StepView]] = []
    for _ in range(scenario.steps):
        agents = world.agents
        positions = {a.id: a.position for a in agents}
        fov_sets: Dict[int, Set[int]] = {a.id: set() for a in agents}
        vic_sets: Dict[int, Set[int]] = {a.id: set() for a in agents}
        for a, b in itertools.combinations(agents, 2):
            d = chebyshev(positions[a.id], positions[b.id])
            if d <= obs.r_vic:
                vic_sets[a.id].add(b.id)
                vic_sets[b.id].add(a.id)
                if d <= obs.r_fov:
                    fov_sets[a.id].add(b.id)
                    fov_sets[b.id].add(a.id)
        zone_by_id = {
            a.id: zone_of(positions[a.id], world.grid, zones) for a in agents
        }
        uploads_all: Set[int] = set()
        uploads_by_zone: Dict[Tuple[int, int], Set[int]] = {}
        for a in agents:
            if a.kind != CAR:
                continue
            contribution = {a.id} | fov_sets[a.id]
            uploads_all |= contribution
            uploads_by_zone.setdefault(zone_by_id[a.id], set()).update(contribution)

        views: Dict[int, StepView] = {}
        actions: Dict[int, str] = {}
        by_id = {a.id: a for a in agents}
        for ego in agents:
            if ego.kind != CAR:
                continue
            vic = sorted(vic_sets[ego.id])
            fov = sorted(fov_sets[ego.id])
            qbits = {
                ent_id: ground_entity(world, ego, by_id[ent_id], slot_map, scenario).bits
                for ent_id in vic
            }
            fi_mask = 0
            for ent_id in vic:
                fi_mask |= engine.sat_mask(qbits[ent_id])
            fi_action = table.action_of(fi_mask)
            fov_set = fov_sets[ego.id]
            sensor_pool = tuple(i for i in vic if i not in fov_set)
            single_src = uploads_all
            multi_src = uploads_by_zone.get(zone_by_id[ego.id], set())
            single_pool = tuple(
                i for i in vic if i in single_src and i not in fov_set
            )
            multi_pool = tuple(i for i in vic if i in multi_src and i not in fov_set)
            views[ego.id] = StepView(
                fov_ids=tuple(fov),
                vic_ids=tuple(vic),
                qbits=qbits,
                pools={
                    SENSOR_GNA: sensor_pool,
                    SINGLE_ZONE_GNA: single_pool,
                    MULTI_ZONE_LNA: multi_pool,
                },
                fi_mask=fi_mask,
                fi_action=fi_action,
            )
            actions[ego.id] = fi_action
        per_step.append(views)
        world = step(world, actions)
    return Trajectory(
        scenario_name=scenario.name,
        rule_set_name=rules.name,
        seed=seed,
        n_hypotheses=len(rules.hypotheses),
        views=tuple(per_step),
    )


def _record_seed(base_seed: int, step_idx: int, ego_id: int) -> int:
    return ((base_seed * 1000003 + step_idx) * 1000003 + ego_id) & 0x7FFFFFFF


def evaluate_cell(
    trajectory: Trajectory,
    rules: RuleSet,
    arch: Architecture,
    strategy: str,
    k: int,
    engine: KeyEngine,
    table: Optional[_ActionTable] = None,
) -> EpisodeTrace:
    """Score one (architecture, strategy, budget) cell on a trajectory.

    Random downlink draws are seeded per (seed, step, ego) so they are
    reproducible and shared across budgets on the same trajectory.
    """
    if table is None:
        table = _ActionTable(rules)
    records: List[TraceRecord] = []
    base_seed = trajectory.seed
    for step_idx, views in enumerate(trajectory.views):
        for ego_id in sorted(views):
            view = views[ego_id]
            pool = view.pools[arch.kind]
            if k <= 0 or not pool:
                chosen: Tuple[int, ...] = ()
            elif len(pool) <= k:
                chosen = pool
            elif strategy == SEMANTIC:
                chosen = engine.select([(i, view.qbits[i]) for i in pool], k)
            else:
                rng = random.Random(_record_seed(base_seed, step_idx, ego_id))
                chosen = tuple(rng.sample(pool, k))
            mask = 0
            for ent_id in view.fov_ids:
                mask |= engine.sat_mask(view.qbits[ent_id])
            for ent_id in chosen:
                mask |= engine.sat_mask(view.qbits[ent_id])
            records.append(
                TraceRecord(
                    step=step_idx,
                    agent_id=ego_id,
                    fi_mask=view.fi_mask,
                    fi_action=view.fi_action,
                    strategy_mask=mask,
                    strategy_action=table.action_of(mask),
                )
            )
    return EpisodeTrace(n_hypotheses=trajectory.n_hypotheses, records=tuple(records))


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def _run_task(
    args: Tuple[ScenarioConfig, RuleSet, int, Tuple[Architecture, ...], Tuple[str, ...], Tuple[int, ...]]
) -> List[MetricsRow]:
    scenario, rules, seed, architectures, strategies, ks = args
    zones = max((a.zones for a in architectures if a.kind == MULTI_ZONE_LNA), default=2)
    engine = KeyEngine(rules.hypotheses, scenario.vocabulary.T)
    table = _ActionTable(rules)
    trajectory = build_trajectory(scenario, rules, seed, zones=zones, engine=engine)
    rows = []
    for arch in architectures:
        for strategy in strategies:
            for k in ks:
                trace = evaluate_cell(trajectory, rules, arch, strategy, k, engine, table)
                rows.append(
                    MetricsRow(
                        architecture=arch.kind,
                        rule_set=rules.name,
                        strategy=strategy,
                        k=k,
                        seed=seed,
                        hdsr=hypothesis_dsr(trace),
                        adsr=action_dsr(trace),
                    )
                )
    return rows


def sweep(
    scenario: ScenarioConfig,
    rule_sets: Sequence[RuleSet],
    architectures: Sequence[Architecture],
    strategies: Sequence[str],
    ks: Sequence[int],
    seeds: Sequence[int],
    jobs: int = 1,
) -> List[MetricsRow]:
    """Per-seed metrics for the full matrix, deterministically ordered.

    Tasks are independent per (rule set, seed); with jobs > 1 they run
    in worker processes and results are merged by sorting, so the output
    does not depend on the degree of parallelism.
    """
    zone_grids = {a.zones for a in architectures if a.kind == MULTI_ZONE_LNA}
    if len(zone_grids) > 1:
        raise ConfigurationError(
            "one sweep supports a single multi-zone grid, got %s" % sorted(zone_grids)
        )
    tasks = [
        (scenario, rules, seed, tuple(architectures), tuple(strategies), tuple(ks))
        for rules in rule_sets
        for seed in seeds
    ]
    rows: List[MetricsRow] = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_run_task, tasks):
                rows.extend(chunk)
    else:
        for task in tasks:
            rows.extend(_run_task(task))
    rows.sort(key=lambda r: (r.architecture, r.rule_set, r.strategy, r.k, r.seed))
    return rows


def aggregate(rows: Iterable[MetricsRow]) -> List[AggregateRow]:
    """Mean and population std over seeds, one row per matrix cell."""
    groups: Dict[Tuple[str, str, str, int], List[MetricsRow]] = {}
    for row in rows:
        groups.setdefault(
            (row.architecture, row.rule_set, row.strategy, row.k), []
        ).append(row)
    out = []
    for key in sorted(groups):
        members = groups[key]
        hdsrs = [m.hdsr for m in members]
        adsrs = [m.adsr for m in members]
        out.append(
            AggregateRow(
                architecture=key[0],
                rule_set=key[1],
                strategy=key[2],
                k=key[3],
                seeds=len(members),
                hdsr_mean=statistics.fmean(hdsrs),
                hdsr_std=statistics.pstdev(hdsrs),
                adsr_mean=statistics.fmean(adsrs),
                adsr_std=statistics.pstdev(adsrs),
            )
        )
    return out


def write_csv(path: str, aggregates: Sequence[AggregateRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in aggregates:
            writer.writerow(
                [
                    row.architecture,
                    row.rule_set,
                    row.strategy,
                    str(row.k),
                    str(row.seeds),
                    "%.6f" % row.hdsr_mean,
                    "%.6f" % row.hdsr_std,
                    "%.6f" % row.adsr_mean,
                    "%.6f" % row.adsr_std,
                ]
            )


def per_seed_csv(path: str, rows: Sequence[MetricsRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ("architecture", "rule_set", "strategy", "k", "seed", "hdsr", "adsr")
        )
        for row in rows:
            writer.writerow(
                [
                    row.architecture,
                    row.rule_set,
                    row.strategy,
                    str(row.k),
                    str(row.seed),
                    "%.6f" % row.hdsr,
                    "%.6f" % row.adsr,
                ]
            )


def monotonicity_violations(rows: Iterable[MetricsRow]) -> List[Tuple[str, str, int, int, int]]:
    """Seeded runs where semantic A-DSR drops as k grows.

    Coverage never shrinks with budget, but a larger subset may trade a
    high-priority witness for broader coverage, so occasional dips are
    possible; they are reported, not forbidden.
    Returns (architecture, rule_set, seed, k_low, k_high) tuples.
    """
    by_cell: Dict[Tuple[str, str, int], List[MetricsRow]] = {}
    for row in rows:
        if row.strategy == SEMANTIC:
            by_cell.setdefault((row.architecture, row.rule_set, row.seed), []).append(row)
    violations = []
    for key in sorted(by_cell):
        members = sorted(by_cell[key], key=lambda r: r.k)
        for lo, hi in zip(members, members[1:]):
            if hi.adsr < lo.adsr - 1e-12:
                violations.append((key[0], key[1], key[2], lo.k, hi.k))
    return violations


# ---------------------------------------------------------------------------
# Baseline-vs-advantage correlation
# ---------------------------------------------------------------------------

def advantage_points(
    rows: Iterable[MetricsRow], advantage_k: int
) -> Tuple[float, float]:
    """(baseline, advantage) for one configuration's row set.

    Baseline is mean A-DSR at k=0; advantage is mean semantic A-DSR
    minus mean random A-DSR at the chosen budget.
    """
    baseline: List[float] = []
    semantic: List[float] = []
    rand: List[float] = []
    for row in rows:
        if row.k == 0 and row.strategy == SEMANTIC:
            baseline.append(row.adsr)
        elif row.k == advantage_k and row.strategy == SEMANTIC:
            semantic.append(row.adsr)
        elif row.k == advantage_k and row.strategy == RANDOM:
            rand.append(row.adsr)
    if not baseline or not semantic or not rand:
        raise UndefinedMetricError(
            "advantage point needs k=0 and k=%d rows for both strategies" % advantage_k
        )
    return (statistics.fmean(baseline), statistics.fmean(semantic) - statistics.fmean(rand))


def advantage_correlation(points: Sequence[Tuple[float, float]]) -> float:
    """Pearson correlation between baseline A-DSR and semantic advantage."""
    if len(points) < 3:
        raise UndefinedMetricError(
            "correlation needs at least 3 configurations, got %d" % len(points)
        )
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    try:
        return statistics.correlation(xs, ys)
    except statistics.StatisticsError as exc:
        raise UndefinedMetricError("correlation undefined: %s" % exc) from exc
