"""End-to-end assessment of a model and report rendering.

A tree is selected for a backend when at least one of its objectives carries
that backend's severity annotation (an EVITA severity vector or a HEAVENS
impact vector); trees without any matching annotation are skipped with a
warning rather than failed, so one model can hold trees modeled for
different frameworks side by side.

Leaf ratings are derived from each in-scope asset attack's potential
profile. The EVITA backend needs the five-parameter profile. The HEAVENS
backend prefers the four-parameter reversed profile (deriving an unset
window of opportunity from the window inputs) and falls back to the
attack-vector proximity shortcut when only access means are recorded.

Reports are deterministic: identical model bytes and flags produce identical
report bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .feasibility import (
    FeasibilityClass,
    Rating,
    attack_vector_rating,
    evita_feasibility_rating,
    evita_potential_sum,
    heavens_feasibility,
    heavens_window,
)
from .impact import ImpactVector
from .model import AttackNode, Model, NodeLevel, expand_paths, iter_nodes
from .risk import (
    SKIP_NO_IN_SCOPE_ATTACKS,
    Backend,
    EvitaMethodResult,
    EvitaSeverity,
    HeavensMethodResult,
    MethodResult,
    assess_tree,
)


class IncompleteInputError(ValueError):
    """Ratings or severities required for the assessment are missing.

    ``node_ids`` lists every node that lacks input, so an analyst can fix
    the whole model in one pass.
    """

    def __init__(self, node_ids: list[str]):
        super().__init__("missing ratings or severities for: " + ", ".join(node_ids))
        self.node_ids = tuple(node_ids)


@dataclass(frozen=True)
class ReportWarning:
    """A non-fatal finding; ``subject`` is a node id or a config key."""

    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.subject}: {self.message}"


@dataclass(frozen=True)
class ReportRow:
    result: MethodResult
    attack_paths: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Report:
    model_name: str
    backend: Backend
    rows: tuple[ReportRow, ...]
    warnings: tuple[ReportWarning, ...]


_BACKEND_TABLE_KEYS = {
    Backend.EVITA: ("evita_risk",),
    Backend.HEAVENS: ("heavens_risk", "window"),
}


def _tree_supports(root: AttackNode, backend: Backend) -> bool:
    for node in iter_nodes(root):
        if node.level is not NodeLevel.OBJECTIVE:
            continue
        if backend is Backend.EVITA and node.severity is not None:
            return True
        if backend is Backend.HEAVENS and node.impact is not None:
            return True
    return False


def _leaf_rating(node: AttackNode, backend: Backend, model: Model) -> Rating | None:
    """Rating for one in-scope leaf, or None when its profile cannot serve
    the backend."""
    profile = node.potential_profile
    if profile is None:
        return None
    if backend is Backend.EVITA:
        if profile.evita is None:
            return None
        return evita_feasibility_rating(
            evita_potential_sum(profile.evita), model.matrices.evita_bands
        )
    if profile.heavens is not None:
        heavens = profile.heavens
        if heavens.window is None:
            if profile.window_inputs is None:
                return None
            window = heavens_window(profile.window_inputs, model.matrices.window)
            return heavens_feasibility((heavens.expertise, heavens.knowledge, window, heavens.equipment))
        return heavens_feasibility(heavens)
    means = profile.access_means
    if means is None and profile.window_inputs is not None:
        means = profile.window_inputs.access_means
    if means is not None:
        return attack_vector_rating(means)
    return None


def _collect_severities(root: AttackNode, backend: Backend) -> tuple[dict, list[str]]:
    """Severities of in-scope, reachable objectives; ids of those that need
    one but have none."""
    severities: dict[str, Union[EvitaSeverity, ImpactVector]] = {}
    missing: list[str] = []

    def walk(node: AttackNode) -> None:
        if not node.in_scope:
            return
        if node.level is NodeLevel.OBJECTIVE:
            annotation = node.severity if backend is Backend.EVITA else node.impact
            if annotation is not None:
                severities[node.id] = annotation
            elif any(child.in_scope for child in node.children):
                missing.append(node.id)
            return
        for child in node.children:
            walk(child)

    walk(root)
    return severities, missing


def build_report(model: Model, backend: Backend | str) -> Report:
    """Assess every tree annotated for the backend and assemble the report.

    Raises :class:`IncompleteInputError` listing every objective without a
    severity and every in-scope leaf without a usable rating in the selected
    trees.
    """
    backend = Backend(backend)
    warnings: list[ReportWarning] = []
    for key in _BACKEND_TABLE_KEYS[backend]:
        if key in model.matrices.defaulted():
            warnings.append(ReportWarning(f"matrices.{key}", "non-normative default table in effect"))

    missing: list[str] = []
    selected: dict[str, tuple[dict, dict]] = {}
    for root in model.attack_trees:
        if not _tree_supports(root, backend):
            continue
        severities, missing_severities = _collect_severities(root, backend)
        missing.extend(missing_severities)
        ratings: dict[str, Rating] = {}
        for node in iter_nodes(root):
            if node.level is NodeLevel.ASSET_ATTACK and node.in_scope and _reachable_in_scope(root, node):
                rating = _leaf_rating(node, backend, model)
                if rating is None:
                    missing.append(node.id)
                else:
                    ratings[node.id] = rating
        selected[root.id] = (ratings, severities)

    if missing:
        raise IncompleteInputError(missing)

    rows: list[ReportRow] = []
    for root in model.attack_trees:
        if root.id not in selected:
            warnings.append(
                ReportWarning(root.id, f"tree skipped: no {backend.value} severity on any objective")
            )
            continue
        for node in iter_nodes(root):
            if not node.in_scope:
                warnings.append(ReportWarning(node.id, "node is out of scope"))
        ratings, severities = selected[root.id]
        assessment = assess_tree(root, ratings, severities, backend, model.matrices)
        for node_id, reason in assessment.skipped:
            if reason == SKIP_NO_IN_SCOPE_ATTACKS:
                warnings.append(ReportWarning(node_id, reason))
        methods_by_id = {node.id: node for node in iter_nodes(root)}
        for result in assessment.methods:
            method = methods_by_id[result.method_id]
            paths = tuple(_ordered_leaves(method, leaf_set) for leaf_set in expand_paths(method))
            rows.append(ReportRow(result=result, attack_paths=paths))

    return Report(
        model_name=model.item.name,
        backend=backend,
        rows=tuple(rows),
        warnings=tuple(warnings),
    )


def _reachable_in_scope(root: AttackNode, target: AttackNode) -> bool:
    """True when no ancestor of the target is flagged out of scope."""
    def walk(node: AttackNode) -> bool:
        if not node.in_scope:
            return False
        if node is target:
            return True
        return any(walk(child) for child in node.children)

    return walk(root)


def _ordered_leaves(method: AttackNode, leaf_set: frozenset[str]) -> tuple[str, ...]:
    order = [node.id for node in iter_nodes(method)]
    return tuple(node_id for node_id in order if node_id in leaf_set)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_json(report: Report) -> str:
    """Machine-readable report; byte-identical for identical inputs."""
    doc = {
        "model": report.model_name,
        "backend": report.backend.value,
        "rows": [_row_to_dict(row) for row in report.rows],
        "warnings": [{"subject": w.subject, "message": w.message} for w in report.warnings],
    }
    return json.dumps(doc, indent=2) + "\n"


def _row_to_dict(row: ReportRow) -> dict:
    result = row.result
    base = {
        "objective": result.objective_id,
        "method": result.method_id,
        "label": result.label,
    }
    if isinstance(result, EvitaMethodResult):
        severity = result.severity.vector.as_dict()
        base["feasibility"] = {"rating": result.rating}
        base["risk"] = {name: str(level) for name, level in result.risks.as_dict().items()}
        base["not_applicable"] = [name for name, value in severity.items() if value == 0]
    else:
        base["feasibility"] = {
            "class": result.feasibility_class.value,
            "value": result.feasibility_value,
        }
        base["impact"] = {"value": result.impact_value, "class": result.impact_class.value}
        base["risk"] = result.risk
    base["attack_paths"] = [list(path) for path in row.attack_paths]
    return base


def render_text(report: Report) -> str:
    lines = [f"Model: {report.model_name}", f"Backend: {report.backend.value.upper()}", ""]
    if report.backend is Backend.EVITA:
        lines.extend(_render_evita_rows(report))
    else:
        lines.extend(_render_heavens_rows(report))
    if report.warnings:
        lines.append("Warnings:")
        for warning in report.warnings:
            lines.append(f"  - {warning}")
    return "\n".join(lines).rstrip("\n") + "\n"


def _render_evita_rows(report: Report) -> list[str]:
    lines: list[str] = []
    current_objective = None
    for row in report.rows:
        result = row.result
        assert isinstance(result, EvitaMethodResult)
        if result.objective_id != current_objective:
            current_objective = result.objective_id
            severity = result.severity
            parts = [f"{name[0].upper()}={value}" for name, value in severity.vector.as_dict().items()]
            if severity.controllability is not None:
                parts.append(severity.controllability.value)
            lines.append(f"Objective {result.objective_id} (severity {' '.join(parts)})")
        risk_parts = []
        for name, level in result.risks.as_dict().items():
            suffix = " (n/a)" if getattr(result.severity.vector, name) == 0 else ""
            risk_parts.append(f"R_{name[0].upper()}={level}{suffix}")
        lines.append(f"  Method {result.method_id} [{result.label}]")
        lines.append(f"    combined feasibility rating: A={result.rating}")
        lines.append(f"    risk levels: {', '.join(risk_parts)}")
        for path in row.attack_paths:
            lines.append(f"    attack path: {' + '.join(path)}")
        lines.append("")
    return lines


def _render_heavens_rows(report: Report) -> list[str]:
    header = ("Threat scenario", "Attack feasibility rating", "Impact rating", "Risk value")
    table = [header]
    for row in report.rows:
        result = row.result
        assert isinstance(result, HeavensMethodResult)
        feasibility = result.feasibility_class.label
        if result.feasibility_value is not None:
            feasibility += f" ({result.feasibility_value:.4f})"
        table.append(
            (
                result.label,
                feasibility,
                f"{result.impact_class.label} ({result.impact_value:.4f})",
                str(result.risk),
            )
        )
    widths = [max(len(line[i]) for line in table) for i in range(4)]
    lines = []
    for index, entry in enumerate(table):
        lines.append("  ".join(entry[i].ljust(widths[i]) for i in range(4)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * widths[i] for i in range(4)))
    lines.append("")
    return lines
