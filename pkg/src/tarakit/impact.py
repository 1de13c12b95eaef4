"""Impact rating under both backends.

EVITA keeps a per-category severity vector on a 0-4 scale and never collapses
it to a scalar. HEAVENS rates each category on the logarithmic {0, 1, 10, 100}
scale, weights the categories (safety and financial carry weight 10, the
others 1 by default) and normalizes the weighted sum into [0, 1], which keeps
the class thresholds stable when extra categories are added.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

_SEVERITY_RANGE = range(0, 5)
_IMPACT_VALUES = (0, 1, 10, 100)

#: Default category weights for the four standard impact categories.
DEFAULT_IMPACT_WEIGHTS: dict[str, float] = {
    "safety": 10.0,
    "financial": 10.0,
    "operational": 1.0,
    "privacy": 1.0,
}

#: Class boundaries: below the first value is negligible, then moderate,
#: then major; at or above the last value is severe. Intervals are half open
#: with the lower bound included.
DEFAULT_IMPACT_THRESHOLDS: tuple[float, float, float] = (0.01, 0.05, 0.45)


class ImpactClass(str, Enum):
    NEGLIGIBLE = "negligible"
    MODERATE = "moderate"
    MAJOR = "major"
    SEVERE = "severe"

    @property
    def rank(self) -> int:
        return _IMPACT_CLASS_ORDER.index(self)

    @property
    def label(self) -> str:
        return self.value.capitalize()


_IMPACT_CLASS_ORDER = (
    ImpactClass.NEGLIGIBLE,
    ImpactClass.MODERATE,
    ImpactClass.MAJOR,
    ImpactClass.SEVERE,
)

#: Default bridge from the EVITA 0-4 severity scale onto the four impact
#: classes. Non-normative convenience; both endpoints are pinned and the
#: mapping is monotone.
DEFAULT_EVITA_ISO_BRIDGE: tuple[ImpactClass, ...] = (
    ImpactClass.NEGLIGIBLE,
    ImpactClass.MODERATE,
    ImpactClass.MAJOR,
    ImpactClass.SEVERE,
    ImpactClass.SEVERE,
)


@dataclass(frozen=True)
class SeverityVector:
    """EVITA per-category severity, each component in 0..4."""

    safety: int = 0
    financial: int = 0
    operational: int = 0
    privacy: int = 0

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not isinstance(value, int) or isinstance(value, bool) or value not in _SEVERITY_RANGE:
                raise ValueError(f"severity component {name} must be an integer in 0..4, got {value!r}")

    def as_dict(self) -> dict[str, int]:
        return {
            "safety": self.safety,
            "financial": self.financial,
            "operational": self.operational,
            "privacy": self.privacy,
        }


@dataclass(frozen=True)
class ImpactEntry:
    """One weighted HEAVENS impact category."""

    category: str
    value: int
    weight: float

    def __post_init__(self) -> None:
        if self.value not in _IMPACT_VALUES:
            raise ValueError(f"impact value for {self.category} must be one of {_IMPACT_VALUES}, got {self.value!r}")
        if not self.weight > 0:
            raise ValueError(f"impact weight for {self.category} must be positive, got {self.weight!r}")


@dataclass(frozen=True)
class ImpactVector:
    entries: tuple[ImpactEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("impact vector needs at least one entry")

    @classmethod
    def standard(
        cls,
        safety: int = 0,
        financial: int = 0,
        operational: int = 0,
        privacy: int = 0,
        weights: dict[str, float] | None = None,
        extra: Sequence[ImpactEntry] = (),
    ) -> "ImpactVector":
        """Vector over the four standard categories plus optional extras."""
        w = dict(DEFAULT_IMPACT_WEIGHTS)
        if weights:
            w.update(weights)
        values = {"safety": safety, "financial": financial, "operational": operational, "privacy": privacy}
        entries = tuple(ImpactEntry(name, values[name], w[name]) for name in values)
        return cls(entries + tuple(extra))


def heavens_impact_level(vector: ImpactVector) -> float:
    """Weighted, normalized impact level in [0, 1].

    Sum of weight * value over all entries, divided by 100 times the weight
    sum; 100 is the per-category maximum, so an all-maximum vector yields
    exactly 1 regardless of the weights in play.
    """
    if not vector.entries:
        raise ValueError("impact vector needs at least one entry")
    weight_sum = sum(entry.weight for entry in vector.entries)
    weighted = sum(entry.weight * entry.value for entry in vector.entries)
    # the exact ratio is always within [0, 1]; clamp away float overshoot so
    # an all-maximum vector classifies instead of tripping the range check
    return min(1.0, max(0.0, weighted / (100.0 * weight_sum)))


def classify_impact(
    level: float,
    thresholds: Sequence[float] = DEFAULT_IMPACT_THRESHOLDS,
) -> ImpactClass:
    """Map an impact level in [0, 1] onto the four impact classes."""
    if not 0.0 <= level <= 1.0:
        raise ValueError(f"impact level must be within [0, 1], got {level!r}")
    low, mid, high = thresholds
    if level < low:
        return ImpactClass.NEGLIGIBLE
    if level < mid:
        return ImpactClass.MODERATE
    if level < high:
        return ImpactClass.MAJOR
    return ImpactClass.SEVERE


def iso_impact_class_from_evita(
    component: int,
    bridge: Sequence[ImpactClass] = DEFAULT_EVITA_ISO_BRIDGE,
) -> ImpactClass:
    """Convenience bridge from one EVITA severity component (0..4) to an
    impact class. EVITA itself never collapses its vector; this exists only
    so EVITA-rated scenarios can be placed on four-class reporting scales."""
    if component not in _SEVERITY_RANGE:
        raise ValueError(f"severity component must be in 0..4, got {component!r}")
    return bridge[component]
