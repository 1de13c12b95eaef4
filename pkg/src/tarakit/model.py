"""Domain model of a target of evaluation and its ingestion.

A model bundles the item definition, assets, damage and threat scenarios, an
optional data-flow diagram, the attack trees, and the matrix configuration.
Models are immutable once loaded; every operation over them is a pure
function, so independent trees can be evaluated concurrently without
coordination.

Attack trees follow a four-level grammar: a goal roots the tree, objectives
sit under the goal, methods under each objective, and asset attacks form the
leaves. Non-leaf nodes carry an AND/OR gate. A leaf flagged out of scope
drops out of OR expansions; inside an AND group it takes the whole conjunct
(and, when no alternative remains, the method) out of scope.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Mapping

from .errors import DanglingReferenceError, DuplicateIdError, ModelFormatError, Violation
from .feasibility import (
    AccessMeans,
    ElapsedTime,
    Equipment,
    Expertise,
    Exposure,
    Knowledge,
    PotentialProfile,
    PotentialProfileEvita,
    PotentialProfileHeavens,
    WindowInputs,
    WindowOpportunity,
)
from .impact import ImpactEntry, ImpactVector, SeverityVector
from .matrices import MatrixConfig
from .risk import Controllability, EvitaSeverity
from .stride import CybersecurityProperty, DfdElement, DfdGraph, DfdKind, StrideCategory


class AssetKind(str, Enum):
    DEVICE = "device"
    APPLICATION = "application"
    COMMUNICATION_DATA = "communication-data"
    KEY_MATERIAL = "key-material"
    INFRASTRUCTURE = "infrastructure"


class NodeLevel(str, Enum):
    GOAL = "goal"
    OBJECTIVE = "objective"
    METHOD = "method"
    ASSET_ATTACK = "asset-attack"


class Gate(str, Enum):
    AND = "and"
    OR = "or"


_CHILD_LEVEL = {
    NodeLevel.GOAL: NodeLevel.OBJECTIVE,
    NodeLevel.OBJECTIVE: NodeLevel.METHOD,
    NodeLevel.METHOD: NodeLevel.ASSET_ATTACK,
}


@dataclass(frozen=True)
class Architecture:
    components: tuple[str, ...] = ()
    connections: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ItemDefinition:
    name: str
    boundary: str = ""
    functions: tuple[str, ...] = ()
    preliminary_architecture: Architecture = field(default_factory=Architecture)
    assumptions: tuple[str, ...] = ()


@dataclass(frozen=True)
class Asset:
    id: str
    name: str
    kind: AssetKind
    properties: frozenset[CybersecurityProperty]


@dataclass(frozen=True)
class DamageScenario:
    id: str
    description: str
    asset_refs: tuple[str, ...]
    violated_properties: frozenset[CybersecurityProperty] = frozenset()


@dataclass(frozen=True)
class ThreatScenario:
    id: str
    description: str
    damage_refs: tuple[str, ...] = ()
    stride_category: StrideCategory | None = None


@dataclass(frozen=True)
class AttackNode:
    """One attack-tree node.

    Objectives may carry an EVITA severity and/or a HEAVENS impact vector;
    asset attacks may carry a potential profile. Which annotations are
    present decides which backends can score the tree.
    """

    id: str
    label: str
    level: NodeLevel
    gate: Gate | None = None
    children: tuple["AttackNode", ...] = ()
    in_scope: bool = True
    potential_profile: PotentialProfile | None = None
    severity: EvitaSeverity | None = None
    impact: ImpactVector | None = None


@dataclass(frozen=True)
class AttackPath:
    """A minimal set of asset attacks that achieves one attack method."""

    leaf_ids: frozenset[str]
    method_id: str


@dataclass(frozen=True)
class Model:
    item: ItemDefinition
    assets: tuple[Asset, ...] = ()
    damage_scenarios: tuple[DamageScenario, ...] = ()
    threat_scenarios: tuple[ThreatScenario, ...] = ()
    dfd: DfdGraph | None = None
    attack_trees: tuple[AttackNode, ...] = ()
    matrices: MatrixConfig = field(default_factory=MatrixConfig)


def iter_nodes(node: AttackNode) -> Iterator[AttackNode]:
    """The node and all descendants, document order."""
    yield node
    for child in node.children:
        yield from iter_nodes(child)


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

_TOP_LEVEL_KEYS = {
    "item",
    "assets",
    "damage_scenarios",
    "threat_scenarios",
    "dfd",
    "attack_trees",
    "matrices",
}


def load_model(document: str) -> Model:
    """Load a model from its JSON document.

    Raises :class:`ModelFormatError` (with line and column) when the document
    cannot be parsed or is structurally malformed,
    :class:`DuplicateIdError` when two entities of one kind share an id, and
    :class:`DanglingReferenceError` when a reference names a missing id.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from None
    return model_from_dict(data)


def model_from_dict(data: Any) -> Model:
    """Build a model from already-parsed JSON data."""
    obj = _expect_object(data, "document")
    unknown = sorted(set(obj) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ModelFormatError(f"document: unknown keys {', '.join(unknown)}")
    if "item" not in obj:
        raise ModelFormatError("document: missing required key item")

    matrices = MatrixConfig.from_dict(obj.get("matrices"))
    item = _parse_item(obj["item"])
    assets = tuple(
        _parse_asset(entry, f"assets[{i}]") for i, entry in enumerate(_expect_list(obj.get("assets", []), "assets"))
    )
    damage = tuple(
        _parse_damage(entry, f"damage_scenarios[{i}]")
        for i, entry in enumerate(_expect_list(obj.get("damage_scenarios", []), "damage_scenarios"))
    )
    threats = tuple(
        _parse_threat(entry, f"threat_scenarios[{i}]")
        for i, entry in enumerate(_expect_list(obj.get("threat_scenarios", []), "threat_scenarios"))
    )
    dfd = _parse_dfd(obj["dfd"]) if obj.get("dfd") is not None else None
    trees = tuple(
        _parse_node(entry, f"attack_trees[{i}]", matrices)
        for i, entry in enumerate(_expect_list(obj.get("attack_trees", []), "attack_trees"))
    )
    model = Model(
        item=item,
        assets=assets,
        damage_scenarios=damage,
        threat_scenarios=threats,
        dfd=dfd,
        attack_trees=trees,
        matrices=matrices,
    )
    _raise_on_broken_references(model)
    return model


def _expect_object(value: Any, where: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ModelFormatError(f"{where}: expected an object")
    return value


def _expect_list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise ModelFormatError(f"{where}: expected a list")
    return value


def _check_keys(obj: Mapping[str, Any], allowed: set[str], required: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ModelFormatError(f"{where}: unknown keys {', '.join(unknown)}")
    missing = sorted(required - set(obj))
    if missing:
        raise ModelFormatError(f"{where}: missing required keys {', '.join(missing)}")


def _string(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise ModelFormatError(f"{where}: expected a string")
    return value


def _string_list(value: Any, where: str) -> tuple[str, ...]:
    return tuple(_string(entry, f"{where}[{i}]") for i, entry in enumerate(_expect_list(value, where)))


def _int(value: Any, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ModelFormatError(f"{where}: expected an integer")
    return value


def _enum(cls, value: Any, where: str):
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(member.value for member in cls)
        raise ModelFormatError(f"{where}: expected one of {allowed}, got {value!r}") from None


def _parse_item(data: Any) -> ItemDefinition:
    obj = _expect_object(data, "item")
    _check_keys(
        obj,
        {"name", "boundary", "functions", "preliminary_architecture", "assumptions"},
        {"name"},
        "item",
    )
    architecture = Architecture()
    if "preliminary_architecture" in obj:
        arch = _expect_object(obj["preliminary_architecture"], "item.preliminary_architecture")
        _check_keys(arch, {"components", "connections"}, set(), "item.preliminary_architecture")
        components = _string_list(arch.get("components", []), "item.preliminary_architecture.components")
        connections = []
        for i, raw in enumerate(_expect_list(arch.get("connections", []), "item.preliminary_architecture.connections")):
            pair = _string_list(raw, f"item.preliminary_architecture.connections[{i}]")
            if len(pair) != 2:
                raise ModelFormatError(
                    f"item.preliminary_architecture.connections[{i}]: expected exactly two component names"
                )
            connections.append((pair[0], pair[1]))
        architecture = Architecture(components=components, connections=tuple(connections))
    return ItemDefinition(
        name=_string(obj["name"], "item.name"),
        boundary=_string(obj.get("boundary", ""), "item.boundary"),
        functions=_string_list(obj.get("functions", []), "item.functions"),
        preliminary_architecture=architecture,
        assumptions=_string_list(obj.get("assumptions", []), "item.assumptions"),
    )


def _parse_asset(data: Any, where: str) -> Asset:
    obj = _expect_object(data, where)
    _check_keys(obj, {"id", "name", "kind", "properties"}, {"id", "name", "kind", "properties"}, where)
    return Asset(
        id=_string(obj["id"], f"{where}.id"),
        name=_string(obj["name"], f"{where}.name"),
        kind=_enum(AssetKind, obj["kind"], f"{where}.kind"),
        properties=frozenset(
            _enum(CybersecurityProperty, raw, f"{where}.properties[{i}]")
            for i, raw in enumerate(_expect_list(obj["properties"], f"{where}.properties"))
        ),
    )


def _parse_damage(data: Any, where: str) -> DamageScenario:
    obj = _expect_object(data, where)
    _check_keys(obj, {"id", "description", "asset_refs", "violated_properties"}, {"id", "description", "asset_refs"}, where)
    return DamageScenario(
        id=_string(obj["id"], f"{where}.id"),
        description=_string(obj["description"], f"{where}.description"),
        asset_refs=_string_list(obj["asset_refs"], f"{where}.asset_refs"),
        violated_properties=frozenset(
            _enum(CybersecurityProperty, raw, f"{where}.violated_properties[{i}]")
            for i, raw in enumerate(_expect_list(obj.get("violated_properties", []), f"{where}.violated_properties"))
        ),
    )


def _parse_threat(data: Any, where: str) -> ThreatScenario:
    obj = _expect_object(data, where)
    _check_keys(obj, {"id", "description", "damage_refs", "stride_category"}, {"id", "description"}, where)
    category = None
    if obj.get("stride_category") is not None:
        category = _enum(StrideCategory, obj["stride_category"], f"{where}.stride_category")
    return ThreatScenario(
        id=_string(obj["id"], f"{where}.id"),
        description=_string(obj["description"], f"{where}.description"),
        damage_refs=_string_list(obj.get("damage_refs", []), f"{where}.damage_refs"),
        stride_category=category,
    )


def _parse_dfd(data: Any) -> DfdGraph:
    obj = _expect_object(data, "dfd")
    _check_keys(obj, {"elements"}, {"elements"}, "dfd")
    elements = []
    for i, raw in enumerate(_expect_list(obj["elements"], "dfd.elements")):
        where = f"dfd.elements[{i}]"
        entry = _expect_object(raw, where)
        _check_keys(entry, {"id", "kind", "name", "endpoints", "crosses"}, {"id", "kind", "name"}, where)
        endpoints = None
        if "endpoints" in entry:
            pair = _string_list(entry["endpoints"], f"{where}.endpoints")
            if len(pair) != 2:
                raise ModelFormatError(f"{where}.endpoints: expected exactly two element ids")
            endpoints = (pair[0], pair[1])
        elements.append(
            DfdElement(
                id=_string(entry["id"], f"{where}.id"),
                kind=_enum(DfdKind, entry["kind"], f"{where}.kind"),
                name=_string(entry["name"], f"{where}.name"),
                endpoints=endpoints,
                crosses=_string_list(entry.get("crosses", []), f"{where}.crosses"),
            )
        )
    return DfdGraph(elements=tuple(elements))


def _parse_severity(data: Any, where: str) -> EvitaSeverity:
    obj = _expect_object(data, where)
    _check_keys(obj, {"safety", "financial", "operational", "privacy", "controllability"}, set(), where)
    try:
        vector = SeverityVector(
            safety=_int(obj.get("safety", 0), f"{where}.safety"),
            financial=_int(obj.get("financial", 0), f"{where}.financial"),
            operational=_int(obj.get("operational", 0), f"{where}.operational"),
            privacy=_int(obj.get("privacy", 0), f"{where}.privacy"),
        )
    except ModelFormatError:
        raise
    except ValueError as exc:
        raise ModelFormatError(f"{where}: {exc}") from None
    controllability = None
    if obj.get("controllability") is not None:
        controllability = _enum(Controllability, obj["controllability"], f"{where}.controllability")
    return EvitaSeverity(vector=vector, controllability=controllability)


def _parse_impact(data: Any, where: str, matrices: MatrixConfig) -> ImpactVector:
    obj = _expect_object(data, where)
    try:
        if "entries" in obj:
            _check_keys(obj, {"entries"}, {"entries"}, where)
            entries = []
            for i, raw in enumerate(_expect_list(obj["entries"], f"{where}.entries")):
                entry = _expect_object(raw, f"{where}.entries[{i}]")
                _check_keys(entry, {"category", "value", "weight"}, {"category", "value", "weight"}, f"{where}.entries[{i}]")
                weight = entry["weight"]
                if isinstance(weight, bool) or not isinstance(weight, (int, float)):
                    raise ModelFormatError(f"{where}.entries[{i}].weight: expected a number")
                entries.append(
                    ImpactEntry(
                        category=_string(entry["category"], f"{where}.entries[{i}].category"),
                        value=_int(entry["value"], f"{where}.entries[{i}].value"),
                        weight=float(weight),
                    )
                )
            return ImpactVector(entries=tuple(entries))
        _check_keys(obj, {"safety", "financial", "operational", "privacy"}, set(), where)
        return ImpactVector.standard(
            safety=_int(obj.get("safety", 0), f"{where}.safety"),
            financial=_int(obj.get("financial", 0), f"{where}.financial"),
            operational=_int(obj.get("operational", 0), f"{where}.operational"),
            privacy=_int(obj.get("privacy", 0), f"{where}.privacy"),
            weights=dict(matrices.impact_weights),
        )
    except ModelFormatError:
        raise
    except ValueError as exc:
        raise ModelFormatError(f"{where}: {exc}") from None


def _parse_profile(data: Any, where: str) -> PotentialProfile:
    obj = _expect_object(data, where)
    _check_keys(obj, {"evita", "heavens", "window_inputs", "access_means"}, set(), where)
    evita = None
    if "evita" in obj:
        entry = _expect_object(obj["evita"], f"{where}.evita")
        keys = {"elapsed_time", "expertise", "knowledge", "window", "equipment"}
        _check_keys(entry, keys, keys, f"{where}.evita")
        evita = PotentialProfileEvita(
            elapsed_time=_enum(ElapsedTime, entry["elapsed_time"], f"{where}.evita.elapsed_time"),
            expertise=_enum(Expertise, entry["expertise"], f"{where}.evita.expertise"),
            knowledge=_enum(Knowledge, entry["knowledge"], f"{where}.evita.knowledge"),
            window=_enum(WindowOpportunity, entry["window"], f"{where}.evita.window"),
            equipment=_enum(Equipment, entry["equipment"], f"{where}.evita.equipment"),
        )
    heavens = None
    if "heavens" in obj:
        entry = _expect_object(obj["heavens"], f"{where}.heavens")
        _check_keys(
            entry,
            {"expertise", "knowledge", "window", "equipment"},
            {"expertise", "knowledge", "equipment"},
            f"{where}.heavens",
        )
        try:
            heavens = PotentialProfileHeavens(
                expertise=_int(entry["expertise"], f"{where}.heavens.expertise"),
                knowledge=_int(entry["knowledge"], f"{where}.heavens.knowledge"),
                window=_int(entry["window"], f"{where}.heavens.window") if entry.get("window") is not None else None,
                equipment=_int(entry["equipment"], f"{where}.heavens.equipment"),
            )
        except ModelFormatError:
            raise
        except ValueError as exc:
            raise ModelFormatError(f"{where}.heavens: {exc}") from None
    window_inputs = None
    if "window_inputs" in obj:
        entry = _expect_object(obj["window_inputs"], f"{where}.window_inputs")
        _check_keys(entry, {"access_means", "exposure"}, {"access_means", "exposure"}, f"{where}.window_inputs")
        window_inputs = WindowInputs(
            access_means=_enum(AccessMeans, entry["access_means"], f"{where}.window_inputs.access_means"),
            exposure=_enum(Exposure, entry["exposure"], f"{where}.window_inputs.exposure"),
        )
    access_means = None
    if obj.get("access_means") is not None:
        access_means = _enum(AccessMeans, obj["access_means"], f"{where}.access_means")
    return PotentialProfile(evita=evita, heavens=heavens, window_inputs=window_inputs, access_means=access_means)


_NODE_KEYS = {"id", "label", "level", "gate", "children", "in_scope", "potential_profile", "severity", "impact"}


def _parse_node(data: Any, where: str, matrices: MatrixConfig) -> AttackNode:
    obj = _expect_object(data, where)
    _check_keys(obj, _NODE_KEYS, {"id", "label", "level"}, where)
    gate = None
    if obj.get("gate") is not None:
        gate = _enum(Gate, obj["gate"], f"{where}.gate")
    in_scope = obj.get("in_scope", True)
    if not isinstance(in_scope, bool):
        raise ModelFormatError(f"{where}.in_scope: expected a boolean")
    children = tuple(
        _parse_node(raw, f"{where}.children[{i}]", matrices)
        for i, raw in enumerate(_expect_list(obj.get("children", []), f"{where}.children"))
    )
    profile = None
    if obj.get("potential_profile") is not None:
        profile = _parse_profile(obj["potential_profile"], f"{where}.potential_profile")
    severity = None
    if obj.get("severity") is not None:
        severity = _parse_severity(obj["severity"], f"{where}.severity")
    impact = None
    if obj.get("impact") is not None:
        impact = _parse_impact(obj["impact"], f"{where}.impact", matrices)
    return AttackNode(
        id=_string(obj["id"], f"{where}.id"),
        label=_string(obj["label"], f"{where}.label"),
        level=_enum(NodeLevel, obj["level"], f"{where}.level"),
        gate=gate,
        children=children,
        in_scope=in_scope,
        potential_profile=profile,
        severity=severity,
        impact=impact,
    )


def _raise_on_broken_references(model: Model) -> None:
    for violation in _id_violations(model):
        raise DuplicateIdError(str(violation))
    for violation in _reference_violations(model):
        raise DanglingReferenceError(str(violation))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _id_violations(model: Model) -> list[Violation]:
    violations = []
    groups: list[tuple[str, list[str]]] = [
        ("asset", [a.id for a in model.assets]),
        ("damage scenario", [d.id for d in model.damage_scenarios]),
        ("threat scenario", [t.id for t in model.threat_scenarios]),
        ("dfd element", [e.id for e in model.dfd.elements] if model.dfd else []),
        ("attack node", [n.id for root in model.attack_trees for n in iter_nodes(root)]),
    ]
    for kind, ids in groups:
        seen = set()
        for entry in ids:
            if entry in seen:
                violations.append(Violation(entry, f"duplicate {kind} id"))
            seen.add(entry)
    return violations


def _reference_violations(model: Model) -> list[Violation]:
    violations = []
    asset_ids = {a.id for a in model.assets}
    damage_ids = {d.id for d in model.damage_scenarios}
    for scenario in model.damage_scenarios:
        for ref in scenario.asset_refs:
            if ref not in asset_ids:
                violations.append(Violation(scenario.id, f"references unknown asset id {ref}"))
    for threat in model.threat_scenarios:
        for ref in threat.damage_refs:
            if ref not in damage_ids:
                violations.append(Violation(threat.id, f"references unknown damage scenario id {ref}"))
    if model.dfd is not None:
        element_ids = {e.id for e in model.dfd.elements}
        for element in model.dfd.elements:
            if element.endpoints is not None:
                for ref in element.endpoints:
                    if ref not in element_ids:
                        violations.append(Violation(element.id, f"references unknown dfd element id {ref}"))
            for ref in element.crosses:
                if ref not in element_ids:
                    violations.append(Violation(element.id, f"references unknown trust boundary id {ref}"))
    return violations


def validate_model(model: Model) -> list[Violation]:
    """Every invariant violation in the model; empty means well formed.

    Violations are data, not failures: a model that loads can still be
    structurally unsound, and callers decide what to do about it.
    """
    violations: list[Violation] = []
    if not model.item.name:
        violations.append(Violation("item", "name must not be empty"))
    components = set(model.item.preliminary_architecture.components)
    for a, b in model.item.preliminary_architecture.connections:
        for end in (a, b):
            if end not in components:
                violations.append(Violation("item", f"connection references undeclared component {end}"))
    violations.extend(_id_violations(model))
    for asset in model.assets:
        if not asset.properties:
            violations.append(Violation(asset.id, "asset must name at least one cybersecurity property"))
    for scenario in model.damage_scenarios:
        if not scenario.asset_refs:
            violations.append(Violation(scenario.id, "damage scenario must reference at least one asset"))
    violations.extend(_reference_violations(model))
    if model.dfd is not None:
        violations.extend(_dfd_violations(model.dfd))
    for root in model.attack_trees:
        violations.extend(_tree_violations(root))
    return violations


def _dfd_violations(dfd: DfdGraph) -> list[Violation]:
    violations = []
    by_id = {e.id: e for e in dfd.elements}
    for element in dfd.elements:
        if element.kind is DfdKind.DATA_FLOW:
            if element.endpoints is None:
                violations.append(Violation(element.id, "data flow must name its two endpoints"))
            else:
                for ref in element.endpoints:
                    target = by_id.get(ref)
                    if target is not None and target.kind in (DfdKind.DATA_FLOW, DfdKind.TRUST_BOUNDARY):
                        violations.append(
                            Violation(element.id, f"endpoint {ref} must be a process, entity, or store")
                        )
        else:
            if element.endpoints is not None:
                violations.append(Violation(element.id, "only data flows carry endpoints"))
            if element.crosses:
                violations.append(Violation(element.id, "only data flows cross trust boundaries"))
        for ref in element.crosses:
            target = by_id.get(ref)
            if target is not None and target.kind is not DfdKind.TRUST_BOUNDARY:
                violations.append(Violation(element.id, f"crossed element {ref} is not a trust boundary"))
    return violations


def _tree_violations(root: AttackNode) -> list[Violation]:
    violations = []
    if root.level is not NodeLevel.GOAL:
        violations.append(Violation(root.id, "attack tree root must be a goal node"))
    scored = any(node.severity is not None or node.impact is not None for node in iter_nodes(root))
    for node in iter_nodes(root):
        expected_child = _CHILD_LEVEL.get(node.level)
        if node.level is NodeLevel.ASSET_ATTACK and node.children:
            violations.append(Violation(node.id, "asset-attack nodes are leaves and cannot have children"))
        elif expected_child is not None:
            for child in node.children:
                if child.level is not expected_child:
                    violations.append(
                        Violation(
                            child.id,
                            f"{node.level.value} nodes may only have {expected_child.value} children, got {child.level.value}",
                        )
                    )
        if node.children and node.gate is None:
            violations.append(Violation(node.id, "non-leaf node needs an AND/OR gate"))
        if not node.children and node.gate is not None:
            violations.append(Violation(node.id, "leaf nodes carry no gate"))
        if node.severity is not None and node.level is not NodeLevel.OBJECTIVE:
            violations.append(Violation(node.id, "severity vectors attach to objectives only"))
        if node.impact is not None and node.level is not NodeLevel.OBJECTIVE:
            violations.append(Violation(node.id, "impact vectors attach to objectives only"))
        if node.potential_profile is not None and node.level is not NodeLevel.ASSET_ATTACK:
            violations.append(Violation(node.id, "potential profiles attach to asset attacks only"))
        if node.severity is not None and node.severity.vector.safety > 0 and node.severity.controllability is None:
            violations.append(Violation(node.id, "nonzero safety severity requires a controllability level"))
        if (
            scored
            and node.level is NodeLevel.ASSET_ATTACK
            and node.in_scope
            and node.potential_profile is None
        ):
            violations.append(Violation(node.id, "in-scope asset attack in a scored tree needs a potential profile"))
    return violations


# ---------------------------------------------------------------------------
# Attack path expansion
# ---------------------------------------------------------------------------

def expand_paths(node: AttackNode) -> list[frozenset[str]]:
    """All minimal in-scope leaf sets that achieve the node, document order.

    Out-of-scope leaves vanish from OR alternatives; an AND conjunct with an
    out-of-scope member contributes nothing. An empty result means the node
    is effectively out of scope.
    """
    raw = _expand(node)
    minimal: list[frozenset[str]] = []
    for candidate in raw:
        if any(other < candidate for other in raw):
            continue
        if candidate not in minimal:
            minimal.append(candidate)
    return minimal


def _expand(node: AttackNode) -> list[frozenset[str]]:
    if not node.in_scope:
        return []
    if not node.children:
        return [frozenset({node.id})]
    if node.gate is None:
        raise ModelFormatError(f"node {node.id}: non-leaf node without AND/OR gate")
    expansions = [_expand(child) for child in node.children]
    if node.gate is Gate.OR:
        return [leaf_set for expansion in expansions for leaf_set in expansion]
    if any(not expansion for expansion in expansions):
        return []
    return [frozenset().union(*combo) for combo in itertools.product(*expansions)]


def enumerate_attack_paths(method: AttackNode) -> list[AttackPath]:
    """Attack paths of one method: minimal satisfying leaf sets of its gate."""
    if method.level is not NodeLevel.METHOD:
        raise ValueError(f"node {method.id} is a {method.level.value} node, expected a method")
    return [AttackPath(leaf_ids=leaf_set, method_id=method.id) for leaf_set in expand_paths(method)]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_model(model: Model) -> str:
    """Canonical JSON document for a model; loading it back yields an equal
    model, including which matrix defaults were in effect."""
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def model_to_dict(model: Model) -> dict[str, Any]:
    doc: dict[str, Any] = {"item": _item_to_dict(model.item)}
    doc["assets"] = [
        {
            "id": a.id,
            "name": a.name,
            "kind": a.kind.value,
            "properties": sorted(p.value for p in a.properties),
        }
        for a in model.assets
    ]
    doc["damage_scenarios"] = [
        {
            "id": d.id,
            "description": d.description,
            "asset_refs": list(d.asset_refs),
            "violated_properties": sorted(p.value for p in d.violated_properties),
        }
        for d in model.damage_scenarios
    ]
    doc["threat_scenarios"] = [
        {
            "id": t.id,
            "description": t.description,
            "damage_refs": list(t.damage_refs),
            **({"stride_category": t.stride_category.value} if t.stride_category else {}),
        }
        for t in model.threat_scenarios
    ]
    if model.dfd is not None:
        doc["dfd"] = {
            "elements": [
                {
                    "id": e.id,
                    "kind": e.kind.value,
                    "name": e.name,
                    **({"endpoints": list(e.endpoints)} if e.endpoints else {}),
                    **({"crosses": list(e.crosses)} if e.crosses else {}),
                }
                for e in model.dfd.elements
            ]
        }
    doc["attack_trees"] = [_node_to_dict(root) for root in model.attack_trees]
    doc["matrices"] = model.matrices.to_dict()
    return doc


def _item_to_dict(item: ItemDefinition) -> dict[str, Any]:
    return {
        "name": item.name,
        "boundary": item.boundary,
        "functions": list(item.functions),
        "preliminary_architecture": {
            "components": list(item.preliminary_architecture.components),
            "connections": [list(pair) for pair in item.preliminary_architecture.connections],
        },
        "assumptions": list(item.assumptions),
    }


def _node_to_dict(node: AttackNode) -> dict[str, Any]:
    out: dict[str, Any] = {"id": node.id, "label": node.label, "level": node.level.value}
    if node.gate is not None:
        out["gate"] = node.gate.value
    if not node.in_scope:
        out["in_scope"] = False
    if node.severity is not None:
        severity = dict(node.severity.vector.as_dict())
        if node.severity.controllability is not None:
            severity["controllability"] = node.severity.controllability.value
        out["severity"] = severity
    if node.impact is not None:
        out["impact"] = {
            "entries": [
                {"category": e.category, "value": e.value, "weight": e.weight} for e in node.impact.entries
            ]
        }
    if node.potential_profile is not None:
        out["potential_profile"] = _profile_to_dict(node.potential_profile)
    if node.children:
        out["children"] = [_node_to_dict(child) for child in node.children]
    return out


def _profile_to_dict(profile: PotentialProfile) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if profile.evita is not None:
        out["evita"] = {
            "elapsed_time": profile.evita.elapsed_time.value,
            "expertise": profile.evita.expertise.value,
            "knowledge": profile.evita.knowledge.value,
            "window": profile.evita.window.value,
            "equipment": profile.evita.equipment.value,
        }
    if profile.heavens is not None:
        heavens: dict[str, Any] = {
            "expertise": profile.heavens.expertise,
            "knowledge": profile.heavens.knowledge,
            "equipment": profile.heavens.equipment,
        }
        if profile.heavens.window is not None:
            heavens["window"] = profile.heavens.window
        out["heavens"] = heavens
    if profile.window_inputs is not None:
        out["window_inputs"] = {
            "access_means": profile.window_inputs.access_means.value,
            "exposure": profile.window_inputs.exposure.value,
        }
    if profile.access_means is not None:
        out["access_means"] = profile.access_means.value
    return out
