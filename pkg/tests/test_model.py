import itertools
import json
import random

import pytest

from tarakit import (
    DanglingReferenceError,
    DuplicateIdError,
    Gate,
    ModelFormatError,
    enumerate_attack_paths,
    expand_paths,
    iter_nodes,
    load_model,
    serialize_model,
    validate_model,
)
from tarakit.model import NodeLevel

from conftest import goal, leaf, method, objective, random_tree


# --- loading ---------------------------------------------------------------

def test_load_rsl_fixture(rsl_model):
    assert rsl_model.item.name == "road-speed-limit"
    assert len(rsl_model.attack_trees) == 2
    evita_tree = rsl_model.attack_trees[0]
    assert evita_tree.id == "manipulate-speed-limits"
    assert evita_tree.level is NodeLevel.GOAL
    assert [n.id for n in evita_tree.children] == ["slow-down-vehicles", "increase-enforced-speed"]
    assert len(evita_tree.children[0].children) == 3


def test_load_empty_document_is_a_parse_error():
    with pytest.raises(ModelFormatError) as excinfo:
        load_model("")
    assert excinfo.value.line == 1
    assert "parse error" in str(excinfo.value)


def test_load_reports_line_and_column():
    with pytest.raises(ModelFormatError) as excinfo:
        load_model('{\n  "item": {\n}')
    assert excinfo.value.line is not None
    assert excinfo.value.column is not None


def test_load_rejects_unknown_keys():
    with pytest.raises(ModelFormatError, match="unknown keys"):
        load_model(json.dumps({"item": {"name": "x"}, "surprise": 1}))


def test_dangling_threat_reference_names_the_missing_id():
    document = {
        "item": {"name": "x"},
        "threat_scenarios": [
            {"id": "t1", "description": "d", "damage_refs": ["no-such-damage"]}
        ],
    }
    with pytest.raises(DanglingReferenceError, match="no-such-damage"):
        load_model(json.dumps(document))


def test_duplicate_asset_id_rejected():
    document = {
        "item": {"name": "x"},
        "assets": [
            {"id": "a", "name": "a", "kind": "device", "properties": ["integrity"]},
            {"id": "a", "name": "b", "kind": "device", "properties": ["integrity"]},
        ],
    }
    with pytest.raises(DuplicateIdError, match="duplicate asset id"):
        load_model(json.dumps(document))


def test_bad_enum_value_is_a_format_error():
    document = {
        "item": {"name": "x"},
        "assets": [{"id": "a", "name": "a", "kind": "gadget", "properties": ["integrity"]}],
    }
    with pytest.raises(ModelFormatError, match="assets\\[0\\].kind"):
        load_model(json.dumps(document))


# --- validation ------------------------------------------------------------

def test_rsl_fixture_validates_clean(rsl_model):
    assert validate_model(rsl_model) == []


def _wrap_tree(root) -> str:
    return json.dumps({"item": {"name": "x"}, "attack_trees": [json.loads(_node_json(root))]})


def _node_json(node) -> str:
    out = {"id": node.id, "label": node.label, "level": node.level.value}
    if node.gate is not None:
        out["gate"] = node.gate.value
    if not node.in_scope:
        out["in_scope"] = False
    if node.children:
        out["children"] = [json.loads(_node_json(c)) for c in node.children]
    return json.dumps(out)


def test_asset_attack_with_children_is_one_violation():
    bad_leaf = leaf("x").__class__(
        id="x", label="x", level=NodeLevel.ASSET_ATTACK, gate=Gate.OR, children=(leaf("y"),)
    )
    root = goal("g", Gate.OR, [objective("o", Gate.OR, [method("m", Gate.OR, [bad_leaf])])])
    model = load_model(_wrap_tree(root))
    violations = validate_model(model)
    assert [v.where for v in violations] == ["x"]
    assert "leaves" in violations[0].message


def test_scored_tree_requires_profiles_on_in_scope_leaves(rsl_document):
    document = json.loads(rsl_document)
    tree = document["attack_trees"][0]
    del tree["children"][0]["children"][0]["children"][0]["potential_profile"]
    model = load_model(json.dumps(document))
    violations = validate_model(model)
    assert [v.where for v in violations] == ["replay-speed-limit-message"]
    assert "potential profile" in violations[0].message


def test_goal_root_required():
    lone = method("m", Gate.OR, [leaf("a")])
    model = load_model(_wrap_tree(lone))
    assert any("root must be a goal" in v.message for v in validate_model(model))


def test_missing_gate_and_stray_gate_flagged():
    document = {
        "item": {"name": "x"},
        "attack_trees": [
            {
                "id": "g", "label": "g", "level": "goal",
                "children": [
                    {
                        "id": "o", "label": "o", "level": "objective", "gate": "or",
                        "children": [
                            {
                                "id": "m", "label": "m", "level": "method", "gate": "or",
                                "children": [{"id": "a", "label": "a", "level": "asset-attack", "gate": "and"}],
                            }
                        ],
                    }
                ],
            }
        ],
    }
    violations = validate_model(load_model(json.dumps(document)))
    messages = {v.where: v.message for v in violations}
    assert "needs an AND/OR gate" in messages["g"]
    assert "carry no gate" in messages["a"]


def test_dfd_endpoint_kind_rules():
    document = {
        "item": {"name": "x"},
        "dfd": {
            "elements": [
                {"id": "p", "kind": "process", "name": "p"},
                {"id": "b", "kind": "trust-boundary", "name": "b"},
                {"id": "f1", "kind": "data-flow", "name": "f1", "endpoints": ["p", "b"]},
                {"id": "f2", "kind": "data-flow", "name": "f2", "endpoints": ["p", "p"], "crosses": ["b"]},
                {"id": "f3", "kind": "data-flow", "name": "f3", "endpoints": ["p", "p"], "crosses": ["p"]},
            ]
        },
    }
    violations = validate_model(load_model(json.dumps(document)))
    by_where = {}
    for violation in violations:
        by_where.setdefault(violation.where, []).append(violation.message)
    assert any("must be a process" in m for m in by_where["f1"])
    assert any("not a trust boundary" in m for m in by_where["f3"])
    assert "f2" not in by_where


# --- attack paths ----------------------------------------------------------

def test_or_over_leaf_and_conjunct():
    node = method("m", Gate.OR, [leaf("a"), method("inner", Gate.AND, [leaf("b"), leaf("c")])])
    # method-in-method is structurally invalid for a model file but exercises
    # the general expansion used by nested gates
    assert expand_paths(node) == [frozenset({"a"}), frozenset({"b", "c"})]


def test_single_leaf_identity():
    node = method("m", Gate.OR, [leaf("a")])
    paths = enumerate_attack_paths(node)
    assert [p.leaf_ids for p in paths] == [frozenset({"a"})]
    assert paths[0].method_id == "m"


def test_enumerate_rejects_non_method_nodes():
    with pytest.raises(ValueError, match="expected a method"):
        enumerate_attack_paths(leaf("a"))


def test_out_of_scope_leaf_dropped_from_or():
    node = method("m", Gate.OR, [leaf("a", in_scope=False), leaf("b")])
    assert expand_paths(node) == [frozenset({"b"})]


def test_out_of_scope_leaf_poisons_and_conjunct():
    node = method("m", Gate.AND, [leaf("a", in_scope=False), leaf("b")])
    assert expand_paths(node) == []


def test_rsl_lower_speed_tree_has_four_paths(rsl_model):
    tree = next(t for t in rsl_model.attack_trees if t.id == "lower-speed")
    per_method = [
        enumerate_attack_paths(node)
        for node in iter_nodes(tree)
        if node.level is NodeLevel.METHOD
    ]
    assert sum(len(paths) for paths in per_method) == 4
    assert len(expand_paths(tree)) == 4


# Oracle: evaluate the gate expression over an achieved-leaf set, then find
# minimal satisfying sets by enumerating every subset.

def _evaluate(node, achieved: frozenset) -> bool:
    if not node.in_scope:
        return False
    if not node.children:
        return node.id in achieved
    results = [_evaluate(child, achieved) for child in node.children]
    return all(results) if node.gate is Gate.AND else any(results)


def _brute_force_minimal_sets(root, leaf_ids):
    satisfying = []
    for size in range(len(leaf_ids) + 1):
        for combo in itertools.combinations(leaf_ids, size):
            achieved = frozenset(combo)
            if _evaluate(root, achieved):
                satisfying.append(achieved)
    return {s for s in satisfying if not any(t < s for t in satisfying)}


def test_expansion_matches_brute_force_on_random_trees():
    rng = random.Random(2034)
    for _ in range(100):
        root, leaf_ids = random_tree(rng, max_leaves=12)
        expanded = expand_paths(root)
        assert len(set(expanded)) == len(expanded)
        assert set(expanded) == _brute_force_minimal_sets(root, leaf_ids)


def test_every_path_is_minimal_and_satisfying():
    rng = random.Random(77)
    for _ in range(60):
        root, _ = random_tree(rng, max_leaves=10)
        for leaf_set in expand_paths(root):
            assert _evaluate(root, leaf_set)
            for dropped in leaf_set:
                assert not _evaluate(root, leaf_set - {dropped})


# --- loader robustness -------------------------------------------------------

_JUNK = [None, True, False, 0, -3, 3.5, "", "zzz", [], {}, [1, 2], {"x": 1}, "or"]


def _walk_paths(node, prefix=()):
    yield prefix
    if isinstance(node, dict):
        for key, value in node.items():
            yield from _walk_paths(value, prefix + (key,))
    elif isinstance(node, list):
        for index, value in enumerate(node):
            yield from _walk_paths(value, prefix + (index,))


def test_loader_never_crashes_on_mutated_documents(rsl_document):
    """Structural mutations must yield a typed model error or a clean load,
    never an unhandled exception."""
    from tarakit.errors import ModelError

    base = json.loads(rsl_document)
    rng = random.Random(555)
    for _ in range(300):
        document = json.loads(json.dumps(base))
        for _ in range(rng.randint(1, 3)):
            path = rng.choice([p for p in _walk_paths(document) if p])
            parent = document
            reachable = True
            for step in path[:-1]:
                try:
                    parent = parent[step]
                except (TypeError, KeyError, IndexError):
                    reachable = False
                    break
            if not reachable or not isinstance(parent, (dict, list)):
                continue
            key = path[-1]
            roll = rng.random()
            try:
                if roll < 0.45:
                    parent[key] = rng.choice(_JUNK)
                elif roll < 0.75 and isinstance(parent, dict):
                    del parent[key]
                elif isinstance(parent, dict):
                    parent[f"injected_{rng.randint(0, 9)}"] = rng.choice(_JUNK)
                elif isinstance(parent, list):
                    parent.append(rng.choice(_JUNK))
            except (KeyError, IndexError, TypeError):
                continue
        try:
            load_model(json.dumps(document))
        except ModelError:
            pass


# --- round trip ------------------------------------------------------------

def test_serialize_load_round_trip(rsl_document):
    first = load_model(rsl_document)
    second = load_model(serialize_model(first))
    assert first == second
    assert serialize_model(first) == serialize_model(second)


def test_round_trip_with_matrix_overrides(rsl_document):
    document = json.loads(rsl_document)
    document["matrices"] = {"impact_weights": {"privacy": 2.5}, "evita_bands": [8, 12, 18, 25]}
    first = load_model(json.dumps(document))
    second = load_model(serialize_model(first))
    assert first == second
    assert second.matrices.defaulted() == first.matrices.defaulted()
