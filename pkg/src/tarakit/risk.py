"""Risk determination for both backends.

EVITA attaches a per-category risk level R0..R7+ to each attack method,
combining the method's feasibility rating with the objective's severity
vector and, for the safety category, the driver's controllability. HEAVENS
attaches a single 1-5 risk value looked up from an impact-class x
feasibility-class matrix.

The closed-form EVITA default, ``clamp(rating + severity - 3)`` shifted by
``controllability index - 1`` for the safety category, reproduces every
published worked data point of the road-speed-limit analysis; the official
EVITA risk graphs can be swapped in as explicit lookup tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Sequence, Union

from .feasibility import (
    DEFAULT_FEASIBILITY_THRESHOLDS,
    FeasibilityClass,
    Rating,
    classify_feasibility,
    fold_feasibility,
)
from .impact import (
    DEFAULT_IMPACT_THRESHOLDS,
    ImpactClass,
    ImpactVector,
    SeverityVector,
    classify_impact,
    heavens_impact_level,
)

if TYPE_CHECKING:
    from .matrices import MatrixConfig
    from .model import AttackNode


class Backend(str, Enum):
    EVITA = "evita"
    HEAVENS = "heavens"


class Controllability(str, Enum):
    """Driver's potential to avert the safety outcome.

    C1: an average human response avoids the accident; C2: a sensible human
    response avoids it; C3: avoidance is very difficult but an experienced
    response under the right circumstances can manage it; C4: the accident
    cannot be avoided.
    """

    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"

    @property
    def index(self) -> int:
        return int(self.value[1])


class MissingSeverityError(LookupError):
    """An objective that should be scored has no severity for the backend."""

    def __init__(self, node_id: str, message: str | None = None):
        super().__init__(message or f"objective {node_id} has no severity for the selected backend")
        self.node_id = node_id


@dataclass(frozen=True)
class EvitaRiskLevel:
    """One R0..R7 level; the top safety level renders as ``R7+``."""

    level: int
    saturated: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.level <= 7:
            raise ValueError(f"risk level must be in 0..7, got {self.level!r}")
        if self.saturated and self.level != 7:
            raise ValueError("only level 7 can be flagged as saturated")

    def __str__(self) -> str:
        return "R7+" if self.saturated else f"R{self.level}"


@dataclass(frozen=True)
class EvitaSeverity:
    """Severity vector plus the controllability the safety category needs."""

    vector: SeverityVector
    controllability: Controllability | None = None


@dataclass(frozen=True)
class EvitaRiskTables:
    """Optional explicit lookup tables replacing the closed-form default.

    ``nonsafety`` is indexed [severity 1..4][rating 1..5]; ``safety`` adds a
    trailing [controllability C1..C4] axis. Zero severity always yields R0
    and is not part of the tables.
    """

    nonsafety: tuple[tuple[int, ...], ...] | None = None
    safety: tuple[tuple[tuple[int, ...], ...], ...] | None = None


#: Default HEAVENS risk matrix, rows negligible..severe, columns
#: very-low..high, monotone along both axes with corner values 1 and 5.
DEFAULT_HEAVENS_RISK_MATRIX: tuple[tuple[int, ...], ...] = (
    (1, 1, 2, 3),
    (1, 2, 3, 4),
    (2, 3, 4, 5),
    (3, 4, 5, 5),
)


def _clamp(value: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, value))


def evita_risk_component(
    severity: int,
    rating: int,
    controllability: Controllability | None = None,
    tables: EvitaRiskTables | None = None,
) -> EvitaRiskLevel:
    """Risk level for one severity component.

    Pass ``controllability`` for the safety category only; its index shifts
    the level upward (C1 adds nothing, C4 adds three). Zero severity yields
    R0 regardless of feasibility.
    """
    if severity not in range(0, 5):
        raise ValueError(f"severity component must be in 0..4, got {severity!r}")
    if rating not in range(1, 6):
        raise ValueError(f"feasibility rating must be in 1..5, got {rating!r}")
    if severity == 0:
        return EvitaRiskLevel(0)
    if controllability is None:
        if tables is not None and tables.nonsafety is not None:
            level = tables.nonsafety[severity - 1][rating - 1]
        else:
            level = _clamp(rating + severity - 3, 0, 7)
        return EvitaRiskLevel(level)
    shift = Controllability(controllability).index - 1
    if tables is not None and tables.safety is not None:
        level = tables.safety[severity - 1][rating - 1][shift]
    else:
        level = _clamp(rating + severity + shift - 3, 0, 7)
    return EvitaRiskLevel(level, saturated=level == 7)


@dataclass(frozen=True)
class EvitaRiskVector:
    """Per-category risk levels for one attack method."""

    safety: EvitaRiskLevel
    financial: EvitaRiskLevel
    operational: EvitaRiskLevel
    privacy: EvitaRiskLevel

    def as_dict(self) -> dict[str, EvitaRiskLevel]:
        return {
            "safety": self.safety,
            "financial": self.financial,
            "operational": self.operational,
            "privacy": self.privacy,
        }


def evita_risk_vector(
    severity: SeverityVector,
    rating: int,
    controllability: Controllability | None = None,
    tables: EvitaRiskTables | None = None,
) -> EvitaRiskVector:
    """Apply :func:`evita_risk_component` to every severity category.

    Controllability is required whenever the safety component is nonzero;
    zero-severity categories come out as R0 and are reported not applicable.
    """
    if severity.safety > 0 and controllability is None:
        raise ValueError("controllability is required when the safety severity component is nonzero")
    return EvitaRiskVector(
        safety=evita_risk_component(
            severity.safety, rating, controllability if severity.safety > 0 else None, tables
        ),
        financial=evita_risk_component(severity.financial, rating, None, tables),
        operational=evita_risk_component(severity.operational, rating, None, tables),
        privacy=evita_risk_component(severity.privacy, rating, None, tables),
    )


def heavens_risk(
    impact: ImpactClass,
    feasibility: FeasibilityClass,
    matrix: Sequence[Sequence[int]] | None = None,
) -> int:
    """Risk value 1-5 from the impact x feasibility matrix."""
    table = DEFAULT_HEAVENS_RISK_MATRIX if matrix is None else matrix
    return table[ImpactClass(impact).rank][FeasibilityClass(feasibility).rank]


# ---------------------------------------------------------------------------
# Tree assessment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvitaMethodResult:
    objective_id: str
    method_id: str
    label: str
    rating: int
    severity: EvitaSeverity
    risks: EvitaRiskVector


@dataclass(frozen=True)
class HeavensMethodResult:
    objective_id: str
    method_id: str
    label: str
    feasibility_value: float | None
    feasibility_class: FeasibilityClass
    impact_value: float
    impact_class: ImpactClass
    risk: int


MethodResult = Union[EvitaMethodResult, HeavensMethodResult]


@dataclass(frozen=True)
class TreeAssessment:
    root_id: str
    methods: tuple[MethodResult, ...]
    skipped: tuple[tuple[str, str], ...]  # (node id, reason)


#: Skip reason for methods whose asset attacks are all out of scope.
SKIP_NO_IN_SCOPE_ATTACKS = "method is out of scope (no in-scope asset attacks)"


def assess_tree(
    root: "AttackNode",
    ratings: Mapping[str, Rating],
    severities: Mapping[str, EvitaSeverity | ImpactVector],
    backend: Backend,
    matrices: "MatrixConfig | None" = None,
) -> TreeAssessment:
    """Assess every in-scope method of one attack tree.

    ``ratings`` maps leaf ids to backend ratings; ``severities`` maps
    objective ids to an :class:`EvitaSeverity` or an :class:`ImpactVector`
    matching the backend. Results come back in document order; out-of-scope
    objectives and methods are reported in ``skipped`` rather than assessed.
    """
    backend = Backend(backend)
    methods: list[MethodResult] = []
    skipped: list[tuple[str, str]] = []
    if not root.in_scope:
        return TreeAssessment(root_id=root.id, methods=(), skipped=((root.id, "tree root is out of scope"),))
    for objective in root.children:
        if not objective.in_scope:
            skipped.append((objective.id, "objective is out of scope"))
            continue
        in_scope_methods = [m for m in objective.children if m.in_scope]
        for method in objective.children:
            if not method.in_scope:
                skipped.append((method.id, "method is out of scope"))
        if not in_scope_methods:
            continue
        severity = severities.get(objective.id)
        if severity is None:
            raise MissingSeverityError(objective.id)
        for method in in_scope_methods:
            combined = fold_feasibility(method, ratings)
            if combined is None:
                skipped.append((method.id, SKIP_NO_IN_SCOPE_ATTACKS))
                continue
            if backend is Backend.EVITA:
                methods.append(_assess_evita(objective, method, combined, severity, matrices))
            else:
                methods.append(_assess_heavens(objective, method, combined, severity, matrices))
    return TreeAssessment(root_id=root.id, methods=tuple(methods), skipped=tuple(skipped))


def _assess_evita(objective, method, combined, severity, matrices) -> EvitaMethodResult:
    if not isinstance(severity, EvitaSeverity):
        raise MissingSeverityError(
            objective.id, f"objective {objective.id} carries no EVITA severity vector"
        )
    if not isinstance(combined, int) or isinstance(combined, bool):
        raise ValueError(
            f"method {method.id}: EVITA assessment needs 1..5 integer ratings, got {combined!r}"
        )
    if severity.vector.safety > 0 and severity.controllability is None:
        raise MissingSeverityError(
            objective.id,
            f"objective {objective.id} has a nonzero safety severity but no controllability",
        )
    tables = matrices.evita_risk if matrices is not None else None
    risks = evita_risk_vector(severity.vector, combined, severity.controllability, tables)
    return EvitaMethodResult(
        objective_id=objective.id,
        method_id=method.id,
        label=method.label,
        rating=combined,
        severity=severity,
        risks=risks,
    )


def _assess_heavens(objective, method, combined, severity, matrices) -> HeavensMethodResult:
    if not isinstance(severity, ImpactVector):
        raise MissingSeverityError(
            objective.id, f"objective {objective.id} carries no HEAVENS impact vector"
        )
    impact_thresholds = (
        matrices.impact_thresholds if matrices is not None else DEFAULT_IMPACT_THRESHOLDS
    )
    feasibility_thresholds = (
        matrices.feasibility_thresholds if matrices is not None else DEFAULT_FEASIBILITY_THRESHOLDS
    )
    risk_matrix = matrices.heavens_risk if matrices is not None else None
    impact_value = heavens_impact_level(severity)
    impact_class = classify_impact(impact_value, impact_thresholds)
    if isinstance(combined, FeasibilityClass):
        feasibility_value = None
        feasibility_class = combined
    elif isinstance(combined, float):
        feasibility_value = combined
        feasibility_class = classify_feasibility(combined, feasibility_thresholds)
    else:
        raise ValueError(
            f"method {method.id}: HEAVENS assessment needs [0, 1] values or feasibility classes, got {combined!r}"
        )
    return HeavensMethodResult(
        objective_id=objective.id,
        method_id=method.id,
        label=method.label,
        feasibility_value=feasibility_value,
        feasibility_class=feasibility_class,
        impact_value=impact_value,
        impact_class=impact_class,
        risk=heavens_risk(impact_class, feasibility_class, risk_matrix),
    )
