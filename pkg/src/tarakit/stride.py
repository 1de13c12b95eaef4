"""STRIDE categorization, the category-to-property mapping, and DFD-driven
threat scenario generation.

The six STRIDE categories each violate exactly one of the six security
properties (the AINCAA set). Which categories apply to a DFD element depends
on the element kind; the shipped default follows the per-element convention
popularized with the Microsoft Threat Modeling Tool and can be overridden in
the model file (``matrices.stride_per_element``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Mapping

if TYPE_CHECKING:
    from .model import ThreatScenario


class CybersecurityProperty(str, Enum):
    """The six security goals: authenticity, integrity, non-repudiation,
    confidentiality, availability, authorization."""

    CONFIDENTIALITY = "confidentiality"
    INTEGRITY = "integrity"
    AVAILABILITY = "availability"
    NON_REPUDIATION = "non-repudiation"
    AUTHENTICITY = "authenticity"
    AUTHORIZATION = "authorization"


class StrideCategory(str, Enum):
    SPOOFING = "spoofing"
    TAMPERING = "tampering"
    REPUDIATION = "repudiation"
    INFORMATION_DISCLOSURE = "information-disclosure"
    DENIAL_OF_SERVICE = "denial-of-service"
    ELEVATION_OF_PRIVILEGE = "elevation-of-privilege"


#: Canonical S-T-R-I-D-E ordering, used wherever deterministic output matters.
STRIDE_ORDER: tuple[StrideCategory, ...] = (
    StrideCategory.SPOOFING,
    StrideCategory.TAMPERING,
    StrideCategory.REPUDIATION,
    StrideCategory.INFORMATION_DISCLOSURE,
    StrideCategory.DENIAL_OF_SERVICE,
    StrideCategory.ELEVATION_OF_PRIVILEGE,
)

_VIOLATED_PROPERTY: dict[StrideCategory, CybersecurityProperty] = {
    StrideCategory.SPOOFING: CybersecurityProperty.AUTHENTICITY,
    StrideCategory.TAMPERING: CybersecurityProperty.INTEGRITY,
    StrideCategory.REPUDIATION: CybersecurityProperty.NON_REPUDIATION,
    StrideCategory.INFORMATION_DISCLOSURE: CybersecurityProperty.CONFIDENTIALITY,
    StrideCategory.DENIAL_OF_SERVICE: CybersecurityProperty.AVAILABILITY,
    StrideCategory.ELEVATION_OF_PRIVILEGE: CybersecurityProperty.AUTHORIZATION,
}


def violated_property(category: StrideCategory) -> CybersecurityProperty:
    """Security property violated by a STRIDE category (total over all six)."""
    return _VIOLATED_PROPERTY[StrideCategory(category)]


class DfdKind(str, Enum):
    PROCESS = "process"
    EXTERNAL_ENTITY = "external-entity"
    DATA_STORE = "data-store"
    DATA_FLOW = "data-flow"
    TRUST_BOUNDARY = "trust-boundary"


@dataclass(frozen=True)
class DfdElement:
    """One element of a data-flow diagram.

    ``endpoints`` is set on data flows only and names the two connected
    non-flow, non-boundary elements. ``crosses`` lists the trust boundaries
    a data flow passes through.
    """

    id: str
    kind: DfdKind
    name: str
    endpoints: tuple[str, str] | None = None
    crosses: tuple[str, ...] = ()


@dataclass(frozen=True)
class DfdGraph:
    elements: tuple[DfdElement, ...] = ()


#: Default applicable-threat mapping per DFD element kind. Trust boundaries
#: host no threats themselves and are intentionally absent.
DEFAULT_STRIDE_PER_ELEMENT: dict[DfdKind, frozenset[StrideCategory]] = {
    DfdKind.PROCESS: frozenset(STRIDE_ORDER),
    DfdKind.DATA_FLOW: frozenset(
        {
            StrideCategory.TAMPERING,
            StrideCategory.INFORMATION_DISCLOSURE,
            StrideCategory.DENIAL_OF_SERVICE,
        }
    ),
    DfdKind.DATA_STORE: frozenset(
        {
            StrideCategory.TAMPERING,
            StrideCategory.REPUDIATION,
            StrideCategory.INFORMATION_DISCLOSURE,
            StrideCategory.DENIAL_OF_SERVICE,
        }
    ),
    DfdKind.EXTERNAL_ENTITY: frozenset(
        {StrideCategory.SPOOFING, StrideCategory.REPUDIATION}
    ),
}


def applicable_threats(
    kind: DfdKind,
    mapping: Mapping[DfdKind, frozenset[StrideCategory]] | None = None,
) -> frozenset[StrideCategory]:
    """STRIDE categories applicable to a DFD element kind.

    Raises ValueError for trust boundaries: boundaries mark where threats
    become interesting, they are not threatened themselves.
    """
    kind = DfdKind(kind)
    if kind is DfdKind.TRUST_BOUNDARY:
        raise ValueError("trust boundaries host no threats themselves")
    table = DEFAULT_STRIDE_PER_ELEMENT if mapping is None else mapping
    return frozenset(table.get(kind, frozenset()))


def generate_threat_scenarios(
    graph: DfdGraph,
    mapping: Mapping[DfdKind, frozenset[StrideCategory]] | None = None,
) -> list["ThreatScenario"]:
    """One generated threat scenario per (element, applicable category) pair.

    Output is deterministic: elements in document order, categories in
    S-T-R-I-D-E order. Descriptions follow the template
    ``"<category> of <element name>"`` and are meant to be edited by analysts.
    """
    from .model import ThreatScenario  # deferred: model depends on this module

    scenarios: list[ThreatScenario] = []
    for element in graph.elements:
        if element.kind is DfdKind.TRUST_BOUNDARY:
            continue
        applicable = applicable_threats(element.kind, mapping)
        for category in STRIDE_ORDER:
            if category not in applicable:
                continue
            scenarios.append(
                ThreatScenario(
                    id=f"ts-{element.id}-{category.value}",
                    description=f"{category.value} of {element.name}",
                    damage_refs=(),
                    stride_category=category,
                )
            )
    return scenarios
