"""Threat analysis and risk assessment over declarative models.

The pipeline covers asset and scenario modeling, STRIDE-driven threat
generation over data-flow diagrams, AND/OR attack-tree evaluation, two
interchangeable scoring backends (EVITA per-category risk levels and
HEAVENS matrix risk values), and a 23-category taxonomy for recording
attacks.
"""

from .errors import (
    DanglingReferenceError,
    DuplicateIdError,
    ModelError,
    ModelFormatError,
    Violation,
)
from .feasibility import (
    AccessMeans,
    CvssExploitabilityInputs,
    ElapsedTime,
    Equipment,
    Expertise,
    Exposure,
    FeasibilityClass,
    Knowledge,
    MixedBackendError,
    MissingRatingError,
    OutOfScopeError,
    PotentialProfile,
    PotentialProfileEvita,
    PotentialProfileHeavens,
    WindowInputs,
    WindowOpportunity,
    attack_vector_rating,
    classify_feasibility,
    combine_feasibility,
    cvss_exploitability,
    evita_feasibility_rating,
    evita_potential_sum,
    fold_feasibility,
    heavens_feasibility,
    heavens_window,
)
from .impact import (
    ImpactClass,
    ImpactEntry,
    ImpactVector,
    SeverityVector,
    classify_impact,
    heavens_impact_level,
    iso_impact_class_from_evita,
)
from .matrices import MatrixConfig
from .model import (
    Architecture,
    Asset,
    AssetKind,
    AttackNode,
    AttackPath,
    DamageScenario,
    Gate,
    ItemDefinition,
    Model,
    NodeLevel,
    ThreatScenario,
    enumerate_attack_paths,
    expand_paths,
    iter_nodes,
    load_model,
    model_from_dict,
    serialize_model,
    validate_model,
)
from .report import IncompleteInputError, Report, ReportRow, ReportWarning, build_report, render_json, render_text
from .risk import (
    Backend,
    Controllability,
    EvitaMethodResult,
    EvitaRiskLevel,
    EvitaRiskTables,
    EvitaRiskVector,
    EvitaSeverity,
    HeavensMethodResult,
    MissingSeverityError,
    TreeAssessment,
    assess_tree,
    evita_risk_component,
    evita_risk_vector,
    heavens_risk,
)
from .stride import (
    CybersecurityProperty,
    DfdElement,
    DfdGraph,
    DfdKind,
    StrideCategory,
    applicable_threats,
    generate_threat_scenarios,
    violated_property,
)
from .taxonomy import (
    AttackRecord,
    CveClient,
    CveLookupError,
    CveRef,
    FixtureCveClient,
    MalformedCveIdError,
    RecordStore,
    StoreError,
    lookup_cve,
    parse_record,
    record_from_dict,
    record_to_dict,
    serialize_record,
    validate_record,
)

__version__ = "0.1.0"


def rsl_fixture_path():
    """Path of the bundled road-speed-limit model fixture."""
    from .fixtures import rsl_path

    return rsl_path()
