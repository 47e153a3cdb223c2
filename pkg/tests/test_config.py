"""YAML loading for vocabularies, rule sets, scenarios, and runs."""

from pathlib import Path

import pytest

from semcom.comms import MULTI_ZONE_LNA, SENSOR_GNA
from semcom.config import (
    SHIPPED_RULE_SETS,
    load_rule_set,
    load_run_config,
    load_scenario,
    rule_set_from_config,
    scenario_from_config,
    vocabulary_from_config,
)
from semcom.errors import ConfigurationError
from semcom.world import default_vocabulary

VOCAB = default_vocabulary()


SCENARIO_DOC = {
    "name": "mini",
    "grid": 40,
    "roads": [10, 30],
    "cars": 4,
    "pedestrians": 2,
    "r_fov": 4,
    "r_vic": 12,
    "steps": 6,
}


# -------------------------------------------------------------- vocabulary


def test_default_vocabulary_spellings():
    assert vocabulary_from_config(None).T == 10
    assert vocabulary_from_config("default") == VOCAB


def test_custom_vocabulary_subset():
    doc = [
        {"name": "IsPedestrian", "category": "monadic-on-entity"},
        {"name": "Close", "category": "dyadic-ego-entity"},
    ]
    vocab = vocabulary_from_config(doc)
    assert vocab.T == 2
    assert vocab.slot_of("Close") == 1
    wrapped = vocabulary_from_config({"predicates": doc})
    assert wrapped == vocab


def test_vocabulary_category_must_be_known():
    with pytest.raises(ConfigurationError):
        vocabulary_from_config([{"name": "X", "category": "triadic"}])
    with pytest.raises(ConfigurationError):
        vocabulary_from_config([{"name": "X"}])


# --------------------------------------------------------------- rule sets


def test_all_shipped_rule_sets_load():
    sizes = {}
    for name in SHIPPED_RULE_SETS:
        rules = load_rule_set(name, VOCAB)
        assert rules.name == name
        assert all(h.action in rules.action_priority for h in rules.hypotheses)
        sizes[name] = len(rules.hypotheses)
    assert sizes == {"core": 12, "extended": 48, "spatial": 30, "discriminative": 30}


def test_unknown_rule_set_name():
    with pytest.raises(ConfigurationError):
        load_rule_set("imaginary", VOCAB)


def test_rule_set_from_mapping():
    doc = {
        "name": "toy",
        "action_priority": ["Stop", "Slow", "Fast", "Normal"],
        "hypotheses": [
            {"id": 1, "action": "Stop", "when": {"IsPedestrian": True, "Close": True}},
            {"id": 2, "action": "Slow", "when": {"IsCar": True, "Near": False}},
        ],
    }
    rules = rule_set_from_config(doc, VOCAB)
    assert [h.id for h in rules.hypotheses] == [1, 2]
    by_id = {h.id: dict(h.fixed_slots) for h in rules.hypotheses}
    assert by_id[1] == {VOCAB.slot_of("IsPedestrian"): 1, VOCAB.slot_of("Close"): 1}
    assert by_id[2] == {VOCAB.slot_of("IsCar"): 1, VOCAB.slot_of("Near"): 0}


def test_rule_set_rejects_unknown_predicate_and_non_bool():
    base = {
        "name": "bad",
        "action_priority": ["Stop", "Normal"],
        "hypotheses": [{"id": 1, "action": "Stop", "when": {"Wings": True}}],
    }
    with pytest.raises(ConfigurationError):
        rule_set_from_config(base, VOCAB)
    base["hypotheses"] = [{"id": 1, "action": "Stop", "when": {"Close": "yes"}}]
    with pytest.raises(ConfigurationError):
        rule_set_from_config(base, VOCAB)


def test_rule_set_file_roundtrip(tmp_path):
    path = tmp_path / "local_rules.yaml"
    path.write_text(
        "name: local\n"
        "action_priority: [Stop, Normal]\n"
        "hypotheses:\n"
        "  - id: 7\n"
        "    action: Stop\n"
        "    when: {IsPedestrian: true}\n"
    )
    rules = load_rule_set(str(path), VOCAB)
    assert rules.name == "local"
    assert rules.hypotheses[0].id == 7


# --------------------------------------------------------------- scenarios


def test_scenario_from_mapping_defaults():
    cfg = scenario_from_config(dict(SCENARIO_DOC))
    assert cfg.name == "mini"
    assert cfg.close_radius == 2 and cfg.near_radius == 6
    assert cfg.observation.r_fov == 4 and cfg.observation.r_vic == 12
    assert cfg.vocabulary == VOCAB


def test_scenario_rejects_unknown_and_missing_keys():
    doc = dict(SCENARIO_DOC, weather="rain")
    with pytest.raises(ConfigurationError):
        scenario_from_config(doc)
    doc = dict(SCENARIO_DOC)
    del doc["r_vic"]
    with pytest.raises(ConfigurationError):
        scenario_from_config(doc)


def test_scenario_type_checks():
    with pytest.raises(ConfigurationError):
        scenario_from_config(dict(SCENARIO_DOC, cars=True))
    with pytest.raises(ConfigurationError):
        scenario_from_config(dict(SCENARIO_DOC, roads="10,30"))


def test_scenario_file(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(
        "name: filecase\ngrid: 40\nroads: [10, 30]\ncars: 3\npedestrians: 1\n"
        "r_fov: 4\nr_vic: 12\nsteps: 5\n"
    )
    assert load_scenario(str(path)).name == "filecase"


# -------------------------------------------------------------------- runs


def run_doc(**overrides):
    doc = {
        "scenario": dict(SCENARIO_DOC),
        "rule_sets": ["core"],
        "architectures": [
            {"kind": "sensor-gna"},
            {"kind": "multi-zone-lna", "zones": 2},
        ],
        "strategies": ["semantic", "random"],
        "k": [0, 1, 2],
        "seeds": [1, 2],
    }
    doc.update(overrides)
    return doc


def write_run(tmp_path, doc):
    import yaml

    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def test_run_config_loads(tmp_path):
    run = load_run_config(write_run(tmp_path, run_doc()))
    assert [s.name for s in run.scenarios] == ["mini"]
    assert [r.name for r in run.rule_sets] == ["core"]
    assert {a.kind for a in run.architectures} == {SENSOR_GNA, MULTI_ZONE_LNA}
    assert run.ks == (0, 1, 2)
    assert run.seeds == (1, 2)
    assert run.advantage_k == 3


def test_run_defaults(tmp_path):
    doc = {"scenario": dict(SCENARIO_DOC)}
    run = load_run_config(write_run(tmp_path, doc))
    assert [r.name for r in run.rule_sets] == ["core"]
    assert len(run.architectures) == 3
    assert run.ks == (0, 1, 2, 3, 4, 5)
    assert run.seeds == (1,)


def test_seeds_override(tmp_path):
    run = load_run_config(write_run(tmp_path, run_doc()), seeds_override=(7, 8, 9))
    assert run.seeds == (7, 8, 9)


def test_run_rejects_both_scenario_forms(tmp_path):
    doc = run_doc()
    doc["scenarios"] = [dict(SCENARIO_DOC, name="b")]
    with pytest.raises(ConfigurationError):
        load_run_config(write_run(tmp_path, doc))


def test_run_rejects_bad_strategy_and_budgets(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config(write_run(tmp_path, run_doc(strategies=["psychic"])))
    with pytest.raises(ConfigurationError):
        load_run_config(write_run(tmp_path, run_doc(k=[-1])))
    with pytest.raises(ConfigurationError):
        load_run_config(write_run(tmp_path, run_doc(seeds=[1, 1])))


def test_multi_scenario_runs_share_a_vocabulary(tmp_path):
    doc = run_doc()
    del doc["scenario"]
    custom = [{"name": "IsPedestrian", "category": "monadic-on-entity"}]
    doc["scenarios"] = [
        dict(SCENARIO_DOC, name="a"),
        dict(SCENARIO_DOC, name="b", vocabulary=custom),
    ]
    with pytest.raises(ConfigurationError):
        load_run_config(write_run(tmp_path, doc))


def test_shipped_run_configs_parse():
    configs = Path(__file__).resolve().parents[1] / "configs"
    for name, n_scenarios in (("desk.yaml", 1), ("density_suite.yaml", 8), ("smoke.yaml", 1)):
        run = load_run_config(str(configs / name))
        assert len(run.scenarios) == n_scenarios
