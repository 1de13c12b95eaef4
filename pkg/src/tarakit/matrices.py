"""The matrix configuration bundle carried by every model.

Every table the pipeline consults lives here with a documented default:
the HEAVENS risk matrix, the optional explicit EVITA risk tables, the
window-of-opportunity matrix, the per-element STRIDE mapping, HEAVENS impact
weights, the EVITA-to-impact-class bridge, and the class/band thresholds.
A model file overrides any subset under its top-level ``matrices`` key;
everything left out keeps its default and is tracked so reports can warn
that a non-normative default is in effect.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import ModelFormatError
from .feasibility import (
    DEFAULT_EVITA_BANDS,
    DEFAULT_FEASIBILITY_THRESHOLDS,
    DEFAULT_WINDOW_MATRIX,
)
from .impact import (
    DEFAULT_EVITA_ISO_BRIDGE,
    DEFAULT_IMPACT_THRESHOLDS,
    DEFAULT_IMPACT_WEIGHTS,
    ImpactClass,
)
from .risk import DEFAULT_HEAVENS_RISK_MATRIX, EvitaRiskTables
from .stride import DEFAULT_STRIDE_PER_ELEMENT, DfdKind, StrideCategory, STRIDE_ORDER

#: Override keys accepted under ``matrices`` in the model file.
CONFIG_KEYS = (
    "heavens_risk",
    "evita_risk",
    "window",
    "stride_per_element",
    "impact_weights",
    "evita_iso_bridge",
    "impact_thresholds",
    "feasibility_thresholds",
    "evita_bands",
)


@dataclass(frozen=True)
class MatrixConfig:
    heavens_risk: tuple[tuple[int, ...], ...] = DEFAULT_HEAVENS_RISK_MATRIX
    evita_risk: EvitaRiskTables | None = None
    window: tuple[tuple[int, ...], ...] = DEFAULT_WINDOW_MATRIX
    stride_per_element: Mapping[DfdKind, frozenset[StrideCategory]] = field(
        default_factory=lambda: dict(DEFAULT_STRIDE_PER_ELEMENT)
    )
    impact_weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_IMPACT_WEIGHTS))
    evita_iso_bridge: tuple[ImpactClass, ...] = DEFAULT_EVITA_ISO_BRIDGE
    impact_thresholds: tuple[float, float, float] = DEFAULT_IMPACT_THRESHOLDS
    feasibility_thresholds: tuple[float, float, float] = DEFAULT_FEASIBILITY_THRESHOLDS
    evita_bands: tuple[int, int, int, int] = DEFAULT_EVITA_BANDS
    overridden: frozenset[str] = frozenset()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def defaulted(self) -> tuple[str, ...]:
        """Config keys still carrying their shipped default, stable order."""
        return tuple(key for key in CONFIG_KEYS if key not in self.overridden)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any] | None) -> "MatrixConfig":
        if data is None:
            return cls()
        if not isinstance(data, Mapping):
            raise ModelFormatError("matrices: expected an object")
        unknown = sorted(set(data) - set(CONFIG_KEYS))
        if unknown:
            raise ModelFormatError(f"matrices: unknown keys {', '.join(unknown)}")
        kwargs: dict[str, Any] = {"overridden": frozenset(data)}
        if "heavens_risk" in data:
            kwargs["heavens_risk"] = _parse_heavens_risk(data["heavens_risk"])
        if "evita_risk" in data:
            kwargs["evita_risk"] = _parse_evita_risk(data["evita_risk"])
        if "window" in data:
            kwargs["window"] = _parse_int_grid(data["window"], "matrices.window", 5, 4, 0, 3)
        if "stride_per_element" in data:
            kwargs["stride_per_element"] = _parse_stride_map(data["stride_per_element"])
        if "impact_weights" in data:
            kwargs["impact_weights"] = _parse_weights(data["impact_weights"])
        if "evita_iso_bridge" in data:
            kwargs["evita_iso_bridge"] = _parse_bridge(data["evita_iso_bridge"])
        if "impact_thresholds" in data:
            kwargs["impact_thresholds"] = _parse_thresholds(data["impact_thresholds"], "matrices.impact_thresholds")
        if "feasibility_thresholds" in data:
            kwargs["feasibility_thresholds"] = _parse_thresholds(
                data["feasibility_thresholds"], "matrices.feasibility_thresholds"
            )
        if "evita_bands" in data:
            kwargs["evita_bands"] = _parse_bands(data["evita_bands"])
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        """Overridden keys only, so a round trip preserves default tracking."""
        out: dict[str, Any] = {}
        for key in CONFIG_KEYS:
            if key not in self.overridden:
                continue
            if key == "heavens_risk":
                out[key] = [list(row) for row in self.heavens_risk]
            elif key == "evita_risk":
                tables = self.evita_risk or EvitaRiskTables()
                out[key] = {
                    "nonsafety": None
                    if tables.nonsafety is None
                    else [list(row) for row in tables.nonsafety],
                    "safety": None
                    if tables.safety is None
                    else [[list(cell) for cell in row] for row in tables.safety],
                }
            elif key == "window":
                out[key] = [list(row) for row in self.window]
            elif key == "stride_per_element":
                out[key] = {
                    kind.value: [c.value for c in STRIDE_ORDER if c in categories]
                    for kind, categories in self.stride_per_element.items()
                }
            elif key == "impact_weights":
                out[key] = dict(self.impact_weights)
            elif key == "evita_iso_bridge":
                out[key] = [c.value for c in self.evita_iso_bridge]
            else:
                out[key] = list(getattr(self, key))
        return out


def _parse_int_grid(value: Any, where: str, rows: int, cols: int, lo: int, hi: int) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list) or len(value) != rows:
        raise ModelFormatError(f"{where}: expected {rows} rows")
    grid = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise ModelFormatError(f"{where}[{i}]: expected {cols} columns")
        for j, cell in enumerate(row):
            if not isinstance(cell, int) or isinstance(cell, bool) or not lo <= cell <= hi:
                raise ModelFormatError(f"{where}[{i}][{j}]: expected an integer in {lo}..{hi}, got {cell!r}")
        grid.append(tuple(row))
    return tuple(grid)


def _parse_heavens_risk(value: Any) -> tuple[tuple[int, ...], ...]:
    grid = _parse_int_grid(value, "matrices.heavens_risk", 4, 4, 1, 5)
    for i in range(4):
        for j in range(4):
            if j > 0 and grid[i][j] < grid[i][j - 1]:
                raise ModelFormatError("matrices.heavens_risk: rows must be monotone nondecreasing")
            if i > 0 and grid[i][j] < grid[i - 1][j]:
                raise ModelFormatError("matrices.heavens_risk: columns must be monotone nondecreasing")
    return grid


def _parse_evita_risk(value: Any) -> EvitaRiskTables:
    if not isinstance(value, Mapping):
        raise ModelFormatError("matrices.evita_risk: expected an object with nonsafety/safety tables")
    unknown = sorted(set(value) - {"nonsafety", "safety"})
    if unknown:
        raise ModelFormatError(f"matrices.evita_risk: unknown keys {', '.join(unknown)}")
    nonsafety = value.get("nonsafety")
    safety = value.get("safety")
    parsed_nonsafety = None
    if nonsafety is not None:
        parsed_nonsafety = _parse_int_grid(nonsafety, "matrices.evita_risk.nonsafety", 4, 5, 0, 7)
    parsed_safety = None
    if safety is not None:
        if not isinstance(safety, list) or len(safety) != 4:
            raise ModelFormatError("matrices.evita_risk.safety: expected 4 severity rows")
        rows = []
        for i, row in enumerate(safety):
            rows.append(_parse_int_grid(row, f"matrices.evita_risk.safety[{i}]", 5, 4, 0, 7))
        parsed_safety = tuple(rows)
    return EvitaRiskTables(nonsafety=parsed_nonsafety, safety=parsed_safety)


def _parse_stride_map(value: Any) -> dict[DfdKind, frozenset[StrideCategory]]:
    if not isinstance(value, Mapping):
        raise ModelFormatError("matrices.stride_per_element: expected an object keyed by element kind")
    mapping = dict(DEFAULT_STRIDE_PER_ELEMENT)
    for raw_kind, raw_categories in value.items():
        try:
            kind = DfdKind(raw_kind)
        except ValueError:
            raise ModelFormatError(f"matrices.stride_per_element: unknown element kind {raw_kind!r}") from None
        if kind is DfdKind.TRUST_BOUNDARY:
            raise ModelFormatError("matrices.stride_per_element: trust boundaries host no threats")
        if not isinstance(raw_categories, list):
            raise ModelFormatError(f"matrices.stride_per_element.{raw_kind}: expected a list of categories")
        categories = set()
        for raw in raw_categories:
            try:
                categories.add(StrideCategory(raw))
            except ValueError:
                raise ModelFormatError(
                    f"matrices.stride_per_element.{raw_kind}: unknown category {raw!r}"
                ) from None
        mapping[kind] = frozenset(categories)
    return mapping


def _parse_weights(value: Any) -> dict[str, float]:
    if not isinstance(value, Mapping):
        raise ModelFormatError("matrices.impact_weights: expected an object keyed by category")
    weights = dict(DEFAULT_IMPACT_WEIGHTS)
    for category, weight in value.items():
        if category not in DEFAULT_IMPACT_WEIGHTS:
            raise ModelFormatError(f"matrices.impact_weights: unknown category {category!r}")
        if isinstance(weight, bool) or not isinstance(weight, (int, float)) or not weight > 0:
            raise ModelFormatError(f"matrices.impact_weights.{category}: expected a positive number")
        weights[category] = float(weight)
    return weights


def _parse_bridge(value: Any) -> tuple[ImpactClass, ...]:
    if not isinstance(value, list) or len(value) != 5:
        raise ModelFormatError("matrices.evita_iso_bridge: expected 5 impact classes, one per severity 0..4")
    bridge = []
    for raw in value:
        try:
            bridge.append(ImpactClass(raw))
        except ValueError:
            raise ModelFormatError(f"matrices.evita_iso_bridge: unknown impact class {raw!r}") from None
    for previous, current in zip(bridge, bridge[1:]):
        if current.rank < previous.rank:
            raise ModelFormatError("matrices.evita_iso_bridge: mapping must be monotone nondecreasing")
    return tuple(bridge)


def _parse_thresholds(value: Any, where: str) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ModelFormatError(f"{where}: expected 3 ascending boundaries")
    numbers = []
    for raw in value:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not 0.0 < raw < 1.0:
            raise ModelFormatError(f"{where}: boundaries must be numbers strictly between 0 and 1")
        numbers.append(float(raw))
    if not numbers[0] < numbers[1] < numbers[2]:
        raise ModelFormatError(f"{where}: boundaries must be strictly ascending")
    return (numbers[0], numbers[1], numbers[2])


def _parse_bands(value: Any) -> tuple[int, int, int, int]:
    if not isinstance(value, list) or len(value) != 4:
        raise ModelFormatError("matrices.evita_bands: expected 4 ascending band upper bounds")
    numbers = []
    for raw in value:
        if not isinstance(raw, int) or isinstance(raw, bool) or raw < 0:
            raise ModelFormatError("matrices.evita_bands: bounds must be nonnegative integers")
        numbers.append(raw)
    if not numbers[0] < numbers[1] < numbers[2] < numbers[3]:
        raise ModelFormatError("matrices.evita_bands: bounds must be strictly ascending")
    return (numbers[0], numbers[1], numbers[2], numbers[3])
