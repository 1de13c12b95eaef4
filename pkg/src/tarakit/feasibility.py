"""Attack feasibility: the three rating approaches and the AND/OR
combination rules over attack trees.

Approaches:

* attack potential (EVITA flavor): five effort parameters are summed and the
  sum is banded into a 1-5 rating, 5 meaning the cheapest attack;
* attack potential (HEAVENS flavor): four parameters on a reversed 0-3 scale
  (3 is easiest for the attacker, elapsed time intentionally absent) are
  normalized into [0, 1] and classified into four named classes;
* attack vector: a proximity shortcut that rates purely by required access,
  the more remote the higher the rating;
* CVSS exploitability: the product formula over the four exploitability
  metrics (no base/temporal/environmental scoring).

Combination over a tree follows the OR rule (highest child rating) and the
AND rule (lowest child rating). Out-of-scope children are skipped under OR;
under AND they render the whole conjunct out of scope, so an out-of-scope
attack can never silently win a minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Sequence, Union

if TYPE_CHECKING:
    from .model import AttackNode


class FeasibilityError(ValueError):
    """Base class for feasibility evaluation errors."""


class MixedBackendError(FeasibilityError):
    """EVITA 1-5 ratings and HEAVENS values were mixed in one combination."""


class OutOfScopeError(FeasibilityError):
    """The node being combined has no in-scope contribution at all."""


class MissingRatingError(LookupError):
    """An in-scope leaf has no rating."""

    def __init__(self, node_id: str):
        super().__init__(f"in-scope leaf {node_id} has no feasibility rating")
        self.node_id = node_id


# ---------------------------------------------------------------------------
# EVITA attack potential
# ---------------------------------------------------------------------------

class ElapsedTime(str, Enum):
    ONE_DAY = "<=1d"
    ONE_WEEK = "<=1w"
    ONE_MONTH = "<=1m"
    SIX_MONTHS = "<=6m"
    OVER_SIX_MONTHS = ">6m"


class Expertise(str, Enum):
    LAYMAN = "layman"
    PROFICIENT = "proficient"
    EXPERT = "expert"
    MULTIPLE_EXPERTS = "multiple-experts"


class Knowledge(str, Enum):
    PUBLIC = "public"
    RESTRICTED = "restricted"
    SENSITIVE = "sensitive"
    CRITICAL = "critical"


class WindowOpportunity(str, Enum):
    """Window-of-opportunity levels, named here by increasing difficulty.

    The underlying conditions: ``unlimited`` means highly available access
    with no time limit; ``easy`` up to one day of access over at most 10
    targets; ``moderate`` up to one month over at most 100 targets;
    ``difficult`` more than a month over more than 100 targets.
    """

    UNLIMITED = "unlimited"
    EASY = "easy"
    MODERATE = "moderate"
    DIFFICULT = "difficult"


class Equipment(str, Enum):
    STANDARD = "standard"
    SPECIALIZED = "specialized"
    BESPOKE = "bespoke"
    MULTIPLE_BESPOKE = "multiple-bespoke"


EVITA_TIME_POINTS = {
    ElapsedTime.ONE_DAY: 0,
    ElapsedTime.ONE_WEEK: 1,
    ElapsedTime.ONE_MONTH: 4,
    ElapsedTime.SIX_MONTHS: 10,
    ElapsedTime.OVER_SIX_MONTHS: 19,
}
EVITA_EXPERTISE_POINTS = {
    Expertise.LAYMAN: 0,
    Expertise.PROFICIENT: 3,
    Expertise.EXPERT: 6,
    Expertise.MULTIPLE_EXPERTS: 8,
}
EVITA_KNOWLEDGE_POINTS = {
    Knowledge.PUBLIC: 0,
    Knowledge.RESTRICTED: 3,
    Knowledge.SENSITIVE: 7,
    Knowledge.CRITICAL: 11,
}
EVITA_WINDOW_POINTS = {
    WindowOpportunity.UNLIMITED: 0,
    WindowOpportunity.EASY: 1,
    WindowOpportunity.MODERATE: 4,
    WindowOpportunity.DIFFICULT: 10,
}
EVITA_EQUIPMENT_POINTS = {
    Equipment.STANDARD: 0,
    Equipment.SPECIALIZED: 4,
    Equipment.BESPOKE: 7,
    Equipment.MULTIPLE_BESPOKE: 9,
}

#: Upper potential-sum bound per rating band, most feasible first:
#: 0-9 rates 5, 10-13 rates 4, 14-19 rates 3, 20-24 rates 2, 25+ rates 1.
DEFAULT_EVITA_BANDS: tuple[int, int, int, int] = (9, 13, 19, 24)


@dataclass(frozen=True)
class PotentialProfileEvita:
    """The five EVITA attacker-effort parameters."""

    elapsed_time: ElapsedTime
    expertise: Expertise
    knowledge: Knowledge
    window: WindowOpportunity
    equipment: Equipment


def evita_potential_sum(profile: PotentialProfileEvita) -> int:
    """Total attack potential: the sum of the five parameter values (0..57)."""
    return (
        EVITA_TIME_POINTS[profile.elapsed_time]
        + EVITA_EXPERTISE_POINTS[profile.expertise]
        + EVITA_KNOWLEDGE_POINTS[profile.knowledge]
        + EVITA_WINDOW_POINTS[profile.window]
        + EVITA_EQUIPMENT_POINTS[profile.equipment]
    )


def evita_feasibility_rating(
    potential_sum: int,
    bands: Sequence[int] = DEFAULT_EVITA_BANDS,
) -> int:
    """Band an attack-potential sum into the 1-5 rating, 5 most feasible.

    The lower the effort needed, the more feasible the attack, so the rating
    falls as the sum grows.
    """
    if potential_sum < 0:
        raise ValueError(f"attack potential sum cannot be negative, got {potential_sum}")
    for rating, upper in zip((5, 4, 3, 2), bands):
        if potential_sum <= upper:
            return rating
    return 1


# ---------------------------------------------------------------------------
# HEAVENS attack potential
# ---------------------------------------------------------------------------

class AccessMeans(str, Enum):
    """Required access, from deepest physical intrusion to fully remote.

    physical-1 needs electronic tools to disassemble components, physical-2
    needs physical tools, physical-3 needs no disassembly; remote-1 needs
    access to the local vehicle network, remote-2 works over the internet
    or telecommunications.
    """

    PHYSICAL_1 = "physical-1"
    PHYSICAL_2 = "physical-2"
    PHYSICAL_3 = "physical-3"
    REMOTE_1 = "remote-1"
    REMOTE_2 = "remote-2"


class Exposure(str, Enum):
    """Asset exposure time available to the attacker."""

    RARE = "rare"
    SPORADIC = "sporadic"
    FREQUENT = "frequent"
    UNLIMITED = "unlimited"


_ACCESS_ORDER = tuple(AccessMeans)
_EXPOSURE_ORDER = tuple(Exposure)

#: Default window-of-opportunity matrix (access means x exposure -> 0..3),
#: monotone along both axes. Non-normative default; override it in the model
#: file when an official matrix is available.
DEFAULT_WINDOW_MATRIX: tuple[tuple[int, ...], ...] = (
    (0, 0, 1, 1),  # physical-1
    (0, 1, 1, 2),  # physical-2
    (1, 1, 2, 2),  # physical-3
    (1, 2, 2, 3),  # remote-1
    (1, 2, 3, 3),  # remote-2
)


@dataclass(frozen=True)
class WindowInputs:
    """The two sub-parameters the window of opportunity is derived from."""

    access_means: AccessMeans
    exposure: Exposure


def heavens_window(
    inputs: WindowInputs,
    matrix: Sequence[Sequence[int]] | None = None,
) -> int:
    """Window-of-opportunity value (0..3) from access means and exposure."""
    table = DEFAULT_WINDOW_MATRIX if matrix is None else matrix
    row = _ACCESS_ORDER.index(AccessMeans(inputs.access_means))
    col = _EXPOSURE_ORDER.index(Exposure(inputs.exposure))
    return table[row][col]


@dataclass(frozen=True)
class PotentialProfileHeavens:
    """The four HEAVENS parameters on the reversed 0-3 scale.

    3 is easiest for the attacker (layman, public knowledge, unlimited
    window, standard equipment); 0 is hardest. Elapsed time is intentionally
    absent: it is not a first-order parameter and tracks the other four.
    ``window`` may be left unset and derived later from :class:`WindowInputs`.
    """

    expertise: int
    knowledge: int
    window: int | None
    equipment: int

    def __post_init__(self) -> None:
        for name in ("expertise", "knowledge", "window", "equipment"):
            value = getattr(self, name)
            if name == "window" and value is None:
                continue
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 3:
                raise ValueError(f"{name} must be an integer in 0..3, got {value!r}")

    def values(self) -> tuple[int, int, int, int]:
        if self.window is None:
            raise ValueError("window of opportunity is unresolved; derive it from window inputs first")
        return (self.expertise, self.knowledge, self.window, self.equipment)


def heavens_feasibility(profile: PotentialProfileHeavens | Sequence[int]) -> float:
    """Normalized attack feasibility in [0, 1]: parameter sum over 3n.

    Accepts the standard four-parameter profile or any non-empty sequence of
    0-3 values, so extra parameters can be mixed in without redefining the
    class thresholds.
    """
    if isinstance(profile, PotentialProfileHeavens):
        params: Sequence[int] = profile.values()
    else:
        params = tuple(profile)
    if not params:
        raise ValueError("at least one attack potential parameter is required")
    for value in params:
        if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 3:
            raise ValueError(f"attack potential parameters must be integers in 0..3, got {value!r}")
    return sum(params) / (3.0 * len(params))


# ---------------------------------------------------------------------------
# Classification and the attack-vector shortcut
# ---------------------------------------------------------------------------

class FeasibilityClass(str, Enum):
    VERY_LOW = "very-low"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return _FEASIBILITY_ORDER.index(self)

    @property
    def label(self) -> str:
        return self.value.replace("-", " ").capitalize()


_FEASIBILITY_ORDER = (
    FeasibilityClass.VERY_LOW,
    FeasibilityClass.LOW,
    FeasibilityClass.MEDIUM,
    FeasibilityClass.HIGH,
)

#: Class boundaries for the normalized feasibility value, half open with the
#: lower bound included.
DEFAULT_FEASIBILITY_THRESHOLDS: tuple[float, float, float] = (0.30, 0.60, 0.80)


def classify_feasibility(
    value: float,
    thresholds: Sequence[float] = DEFAULT_FEASIBILITY_THRESHOLDS,
) -> FeasibilityClass:
    """Map a normalized feasibility value in [0, 1] onto the four classes."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"feasibility value must be within [0, 1], got {value!r}")
    low, mid, high = thresholds
    if value < low:
        return FeasibilityClass.VERY_LOW
    if value < mid:
        return FeasibilityClass.LOW
    if value < high:
        return FeasibilityClass.MEDIUM
    return FeasibilityClass.HIGH


def attack_vector_rating(means: AccessMeans) -> FeasibilityClass:
    """Proximity shortcut: rate feasibility purely by required access.

    The more remote the attack, the higher the rating: internet-reachable
    attacks rate high, local-network attacks medium, anything needing
    physical access low. When an attack works both remotely and physically,
    pass the remote means. Deliberately coarse; it exists to dismiss or
    prioritize scenarios before a full attack-potential work-up.
    """
    means = AccessMeans(means)
    if means is AccessMeans.REMOTE_2:
        return FeasibilityClass.HIGH
    if means is AccessMeans.REMOTE_1:
        return FeasibilityClass.MEDIUM
    return FeasibilityClass.LOW


# ---------------------------------------------------------------------------
# CVSS exploitability
# ---------------------------------------------------------------------------

_CVSS_RANGES = {
    "attack_vector": (0.2, 0.75),
    "attack_complexity": (0.44, 0.77),
    "privileges_required": (0.27, 0.85),
    "user_interaction": (0.62, 0.85),
}


@dataclass(frozen=True)
class CvssExploitabilityInputs:
    """The four CVSS exploitability metrics, each within its numeric range."""

    attack_vector: float
    attack_complexity: float
    privileges_required: float
    user_interaction: float

    def __post_init__(self) -> None:
        for name, (lo, hi) in _CVSS_RANGES.items():
            value = getattr(self, name)
            if not lo <= value <= hi:
                raise ValueError(f"{name} must be within [{lo}, {hi}], got {value!r}")


def cvss_exploitability(inputs: CvssExploitabilityInputs) -> float:
    """Exploitability metric: 8.22 times the product of the four inputs."""
    return (
        8.22
        * inputs.attack_complexity
        * inputs.attack_vector
        * inputs.privileges_required
        * inputs.user_interaction
    )


# ---------------------------------------------------------------------------
# Per-leaf profiles and tree combination
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialProfile:
    """Everything an analyst recorded about one asset attack's effort.

    Which parts are present decides how the leaf gets rated: the EVITA
    backend needs ``evita``; the HEAVENS backend prefers ``heavens``
    (resolving an unset window through ``window_inputs``) and falls back to
    the proximity shortcut through ``access_means`` or
    ``window_inputs.access_means``.
    """

    evita: PotentialProfileEvita | None = None
    heavens: PotentialProfileHeavens | None = None
    window_inputs: WindowInputs | None = None
    access_means: AccessMeans | None = None


#: A leaf rating: an EVITA 1-5 integer, a HEAVENS value in [0, 1], or a
#: feasibility class produced by the proximity shortcut.
Rating = Union[int, float, FeasibilityClass]


def _rating_kind(rating: Rating, node_id: str) -> str:
    if isinstance(rating, FeasibilityClass):
        return "heavens-class"
    if isinstance(rating, bool):
        raise FeasibilityError(f"leaf {node_id}: rating must be a number, not a boolean")
    if isinstance(rating, int):
        if not 1 <= rating <= 5:
            raise FeasibilityError(f"leaf {node_id}: EVITA rating must be in 1..5, got {rating}")
        return "evita"
    if isinstance(rating, float):
        if not 0.0 <= rating <= 1.0:
            raise FeasibilityError(f"leaf {node_id}: HEAVENS value must be within [0, 1], got {rating}")
        return "heavens-value"
    raise FeasibilityError(f"leaf {node_id}: unsupported rating type {type(rating).__name__}")


def _check_backends(node: "AttackNode", ratings: Mapping[str, Rating]) -> None:
    kinds = set()
    stack = [node]
    while stack:
        current = stack.pop()
        if not current.in_scope:
            continue
        if current.children:
            stack.extend(current.children)
        elif current.id in ratings:
            kinds.add(_rating_kind(ratings[current.id], current.id))
    if len(kinds) > 1:
        raise MixedBackendError(
            "ratings mix backends under node "
            f"{node.id}: {', '.join(sorted(kinds))}; rate every leaf of a tree on one scale"
        )


def fold_feasibility(node: "AttackNode", ratings: Mapping[str, Rating]) -> Rating | None:
    """Combined feasibility of a subtree, or None when it is out of scope.

    OR nodes take the best (highest) in-scope child, AND nodes the worst
    (lowest) child; any out-of-scope child under an AND takes the whole
    conjunct out of scope.
    """
    _check_backends(node, ratings)
    return _fold(node, ratings)


def _fold(node: "AttackNode", ratings: Mapping[str, Rating]) -> Rating | None:
    if not node.in_scope:
        return None
    if not node.children:
        if node.id not in ratings:
            raise MissingRatingError(node.id)
        return ratings[node.id]
    if node.gate is None:
        raise FeasibilityError(f"node {node.id}: non-leaf node without AND/OR gate")
    results = [_fold(child, ratings) for child in node.children]
    if node.gate.value == "and":
        if any(result is None for result in results):
            return None
        pick = min
    else:
        results = [result for result in results if result is not None]
        if not results:
            return None
        pick = max
    if isinstance(results[0], FeasibilityClass):
        return pick(results, key=lambda c: c.rank)
    return pick(results)


def combine_feasibility(node: "AttackNode", leaf_ratings: Mapping[str, Rating]) -> Rating:
    """Combined feasibility rating of a node per the OR/AND rules.

    Every in-scope leaf under the node must be rated, and all ratings must
    come from one backend. Raises :class:`OutOfScopeError` when nothing under
    the node is in scope.
    """
    result = fold_feasibility(node, leaf_ratings)
    if result is None:
        raise OutOfScopeError(f"node {node.id} has no in-scope asset attacks to combine")
    return result
