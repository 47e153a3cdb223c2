"""Communication architectures: who can tell the ego about what.

Three pool builders share one contract: the pool is the set of grounded
items an ego could receive but has not already seen itself (its own FOV
is subtracted), restricted to its vicinity ball.  The downlink then picks
at most k of them, by semantic value or uniformly at random.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Set, Tuple

from .errors import ConfigurationError
from .logic import EvidenceItem, Hypothesis, SlotMap
from .selection import DEFAULT_ENUMERATION_CAP, KeyEngine, select_random, select_semantic
from .world import (
    CAR,
    ObservationConfig,
    ScenarioConfig,
    WorldState,
    fov_entities,
    ground_entity,
    vicinity_entities,
)

SENSOR_GNA = "sensor-gna"
SINGLE_ZONE_GNA = "single-zone-gna"
MULTI_ZONE_LNA = "multi-zone-lna"

ARCHITECTURE_KINDS = (SENSOR_GNA, SINGLE_ZONE_GNA, MULTI_ZONE_LNA)

SEMANTIC = "semantic"
RANDOM = "random"

STRATEGIES = (SEMANTIC, RANDOM)


@dataclass(frozen=True)
class Architecture:
    kind: str
    zones: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ARCHITECTURE_KINDS:
            raise ConfigurationError(
                "unknown architecture %r (choose from %s)"
                % (self.kind, ", ".join(ARCHITECTURE_KINDS))
            )
        if self.zones < 1:
            raise ConfigurationError("zone grid must be at least 1x1")


def zone_of(position: Tuple[int, int], grid: int, zones: int) -> Tuple[int, int]:
    """Half-open zone rectangle containing a cell (edge cells clamp inward)."""
    x, y = position
    return (min(x * zones // grid, zones - 1), min(y * zones // grid, zones - 1))


def pool_ids(
    world: WorldState, ego_id: int, arch: Architecture, obs: ObservationConfig
) -> Tuple[int, ...]:
    """Entity ids the architecture can offer the ego, ascending.

    sensor-gna: roadside sensing covers the ego's whole vicinity.
    single-zone-gna: every car uploads its FOV contents and announces
        its own presence; the ego can receive whatever landed in its
        vicinity.  Pedestrians carry no transmitter, so one nobody sees
        stays invisible to the assistant.
    multi-zone-lna: as single-zone, but only uploads from cars in the
        ego's zone reach it.
    """
    vic = set(vicinity_entities(world, ego_id, obs))
    fov = set(fov_entities(world, ego_id, obs))
    if arch.kind == SENSOR_GNA:
        candidates = vic
    else:
        if arch.kind == MULTI_ZONE_LNA:
            ego_zone = zone_of(world.agent(ego_id).position, world.grid, arch.zones)
            uploaders = [
                a for a in world.agents
                if a.kind == CAR
                and zone_of(a.position, world.grid, arch.zones) == ego_zone
            ]
        else:
            uploaders = [a for a in world.agents if a.kind == CAR]
        uploaded: Set[int] = set()
        for a in uploaders:
            uploaded.add(a.id)
            uploaded.update(fov_entities(world, a.id, obs))
        candidates = uploaded & vic
    return tuple(sorted(candidates - fov - {ego_id}))


def build_pool(
    world: WorldState,
    ego_id: int,
    arch: Architecture,
    obs: ObservationConfig,
    slot_map: SlotMap,
    scenario: ScenarioConfig,
) -> Tuple[EvidenceItem, ...]:
    """Grounded candidate items, one per pool id, ascending by id."""
    ego = world.agent(ego_id)
    return tuple(
        EvidenceItem(ent_id, ground_entity(world, ego, world.agent(ent_id), slot_map, scenario))
        for ent_id in pool_ids(world, ego_id, arch, obs)
    )


def downlink(
    pool: Tuple[EvidenceItem, ...],
    hypotheses: Tuple[Hypothesis, ...],
    k: int,
    strategy: str,
    T: int,
    rng_seed: int = 0,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    engine: KeyEngine = None,
) -> FrozenSet[EvidenceItem]:
    """Select at most k pool items to transmit.  k=0 sends nothing."""
    if k < 0:
        raise ConfigurationError("k must be non-negative")
    if k == 0 or not pool:
        return frozenset()
    if strategy == SEMANTIC:
        return select_semantic(
            pool, hypotheses, k, T, enumeration_cap=enumeration_cap, engine=engine
        )
    if strategy == RANDOM:
        return select_random(pool, k, rng_seed)
    raise ConfigurationError("unknown strategy %r" % strategy)
