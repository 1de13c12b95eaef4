import random

import pytest

from tarakit import AttackNode, Gate, NodeLevel, load_model
from tarakit.fixtures import rsl_path


@pytest.fixture(scope="session")
def rsl_document() -> str:
    return rsl_path().read_text(encoding="utf-8")


@pytest.fixture()
def rsl_model(rsl_document):
    return load_model(rsl_document)


def leaf(node_id: str, in_scope: bool = True, **kwargs) -> AttackNode:
    return AttackNode(id=node_id, label=node_id, level=NodeLevel.ASSET_ATTACK, in_scope=in_scope, **kwargs)


def method(node_id: str, gate: Gate, children, in_scope: bool = True) -> AttackNode:
    return AttackNode(
        id=node_id, label=node_id, level=NodeLevel.METHOD, gate=gate, children=tuple(children), in_scope=in_scope
    )


def objective(node_id: str, gate: Gate, children, in_scope: bool = True, **kwargs) -> AttackNode:
    return AttackNode(
        id=node_id,
        label=node_id,
        level=NodeLevel.OBJECTIVE,
        gate=gate,
        children=tuple(children),
        in_scope=in_scope,
        **kwargs,
    )


def goal(node_id: str, gate: Gate, children, in_scope: bool = True) -> AttackNode:
    return AttackNode(
        id=node_id, label=node_id, level=NodeLevel.GOAL, gate=gate, children=tuple(children), in_scope=in_scope
    )


def random_tree(rng: random.Random, max_leaves: int = 12, out_of_scope_rate: float = 0.15):
    """A random goal/objective/method/asset-attack tree with random gates.

    Returns (root, leaf ids). The total leaf count stays within max_leaves
    and at least one leaf is generated.
    """
    leaf_ids: list[str] = []
    counter = {"n": 0}

    def next_id(prefix: str) -> str:
        counter["n"] += 1
        return f"{prefix}{counter['n']}"

    def make_leaves(budget: int) -> list[AttackNode]:
        count = rng.randint(1, max(1, min(3, budget)))
        nodes = []
        for _ in range(count):
            node_id = next_id("leaf")
            leaf_ids.append(node_id)
            nodes.append(leaf(node_id, in_scope=rng.random() > out_of_scope_rate))
        return nodes

    def gate_choice() -> Gate:
        return rng.choice((Gate.AND, Gate.OR))

    objectives = []
    remaining = max_leaves
    for _ in range(rng.randint(1, 3)):
        if remaining <= 0:
            break
        methods = []
        for _ in range(rng.randint(1, 3)):
            if remaining <= 0:
                break
            leaves = make_leaves(remaining)
            remaining -= len(leaves)
            methods.append(method(next_id("method"), gate_choice(), leaves))
        if methods:
            objectives.append(objective(next_id("objective"), gate_choice(), methods))
    return goal(next_id("goal"), gate_choice(), objectives), leaf_ids
