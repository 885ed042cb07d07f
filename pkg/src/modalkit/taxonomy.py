"""Hierarchical modal-sense taxonomy and label projections.

The sense inventory is a two-branch hierarchy::

    modality
    ├── priority      : rules_norms, desires_wishes, plans_goals
    └── plausibility  : knowledge, world, agent

Label strings are canonical ASCII identifiers (``rules_norms``,
``intentions``, ``priority``, ...) as they appear in tag columns and
metric reports; :data:`DISPLAY_NAMES` maps them to human-readable forms.
"""

from __future__ import annotations

from enum import Enum


class FineSense(str, Enum):
    """Leaf senses of the taxonomy (six values)."""

    RULES_NORMS = "rules_norms"
    DESIRES_WISHES = "desires_wishes"
    PLANS_GOALS = "plans_goals"
    KNOWLEDGE = "knowledge"
    WORLD = "world"
    AGENT = "agent"


class ConflatedSense(str, Enum):
    """Leaf senses with desires_wishes and plans_goals merged into intentions."""

    RULES_NORMS = "rules_norms"
    INTENTIONS = "intentions"
    KNOWLEDGE = "knowledge"
    WORLD = "world"
    AGENT = "agent"


class CoarseSense(str, Enum):
    """Top-level branches of the taxonomy."""

    PRIORITY = "priority"
    PLAUSIBILITY = "plausibility"


class LegacySense(str, Enum):
    """Three-way deontic/dynamic/epistemic label set used by earlier corpora."""

    DEONTIC = "deontic"
    DYNAMIC = "dynamic"
    EPISTEMIC = "epistemic"


class Granularity(str, Enum):
    """Projection levels, ordered from coarsest to finest."""

    BINARY = "binary"
    COARSE = "coarse"
    FINE_CONFLATED = "fine_conflated"
    FINE_FULL = "fine_full"


# Coarsest first; projection is only ever downward (toward index 0).
_GRANULARITY_ORDER = (
    Granularity.BINARY,
    Granularity.COARSE,
    Granularity.FINE_CONFLATED,
    Granularity.FINE_FULL,
)

DISPLAY_NAMES = {
    "rules_norms": "Rules & Norms",
    "desires_wishes": "Desires & Wishes",
    "plans_goals": "Plans & Goals",
    "intentions": "Intentions",
    "knowledge": "Knowledge",
    "world": "World",
    "agent": "Agent",
    "priority": "Priority",
    "plausibility": "Plausibility",
    "deontic": "Deontic",
    "dynamic": "Dynamic",
    "epistemic": "Epistemic",
}

_PRIORITY_BRANCH = frozenset(
    {FineSense.RULES_NORMS, FineSense.DESIRES_WISHES, FineSense.PLANS_GOALS}
)

_CONFLATION = {
    FineSense.RULES_NORMS: ConflatedSense.RULES_NORMS,
    FineSense.DESIRES_WISHES: ConflatedSense.INTENTIONS,
    FineSense.PLANS_GOALS: ConflatedSense.INTENTIONS,
    FineSense.KNOWLEDGE: ConflatedSense.KNOWLEDGE,
    FineSense.WORLD: ConflatedSense.WORLD,
    FineSense.AGENT: ConflatedSense.AGENT,
}

_CONFLATED_BRANCH = {
    ConflatedSense.RULES_NORMS: CoarseSense.PRIORITY,
    ConflatedSense.INTENTIONS: CoarseSense.PRIORITY,
    ConflatedSense.KNOWLEDGE: CoarseSense.PLAUSIBILITY,
    ConflatedSense.WORLD: CoarseSense.PLAUSIBILITY,
    ConflatedSense.AGENT: CoarseSense.PLAUSIBILITY,
}

_LEGACY = {
    CoarseSense.PRIORITY.value: LegacySense.DEONTIC,
    FineSense.AGENT.value: LegacySense.DYNAMIC,
    FineSense.KNOWLEDGE.value: LegacySense.EPISTEMIC,
    FineSense.WORLD.value: None,
}


class TaxonomyError(ValueError):
    """Raised for labels or projections outside the taxonomy."""


def coarsen(sense: FineSense) -> CoarseSense:
    """Map a leaf sense to its branch (priority or plausibility)."""
    if FineSense(sense) in _PRIORITY_BRANCH:
        return CoarseSense.PRIORITY
    return CoarseSense.PLAUSIBILITY


def conflate(sense: FineSense) -> ConflatedSense:
    """Merge desires_wishes and plans_goals into intentions; identity elsewhere."""
    return _CONFLATION[FineSense(sense)]


def map_legacy(sense: CoarseSense | FineSense | str) -> LegacySense | None:
    """Map to the legacy deontic/dynamic/epistemic label set.

    Accepts priority, agent, knowledge, or world. world maps to None
    (such instances are excluded from legacy comparisons). Fine
    priority-branch labels must be projected to priority by the caller
    first; passing them raises TaxonomyError.
    """
    label = sense.value if isinstance(sense, Enum) else str(sense)
    if label in {s.value for s in _PRIORITY_BRANCH}:
        raise TaxonomyError(
            f"fine priority-branch label {label!r} must be projected to "
            f"'priority' before the legacy mapping"
        )
    if label not in _LEGACY:
        raise TaxonomyError(f"no legacy mapping for label {label!r}")
    return _LEGACY[label]


def labels_at(granularity: Granularity) -> tuple[str, ...]:
    """Canonical sense labels available at a granularity (empty for binary)."""
    g = Granularity(granularity)
    if g is Granularity.BINARY:
        return ()
    if g is Granularity.COARSE:
        return tuple(s.value for s in CoarseSense)
    if g is Granularity.FINE_CONFLATED:
        return tuple(s.value for s in ConflatedSense)
    return tuple(s.value for s in FineSense)


def sense_granularity(label: str) -> Granularity:
    """The finest granularity at which ``label`` is a valid sense."""
    if label in {s.value for s in FineSense}:
        return Granularity.FINE_FULL
    if label == ConflatedSense.INTENTIONS.value:
        return Granularity.FINE_CONFLATED
    if label in {s.value for s in CoarseSense}:
        return Granularity.COARSE
    raise TaxonomyError(f"unknown sense label {label!r}")


def project_sense(label: str, granularity: Granularity) -> str | None:
    """Project a sense label down the hierarchy.

    Returns None at binary granularity (the sense is stripped). Raises
    TaxonomyError for unknown labels or upward projections (a coarse
    label cannot be refined).
    """
    g = Granularity(granularity)
    source = sense_granularity(label)
    if _GRANULARITY_ORDER.index(g) > _GRANULARITY_ORDER.index(source):
        raise TaxonomyError(
            f"cannot project {label!r} ({source.value}) up to {g.value}"
        )
    if g is Granularity.BINARY:
        return None
    if g is source:
        return label
    if source is Granularity.FINE_FULL:
        conflated = conflate(FineSense(label))
        if g is Granularity.FINE_CONFLATED:
            return conflated.value
        return _CONFLATED_BRANCH[conflated].value
    if source is Granularity.FINE_CONFLATED:
        return _CONFLATED_BRANCH[ConflatedSense(label)].value
    return label  # coarse -> coarse handled above; unreachable otherwise


def project(tag: str, granularity: Granularity) -> str:
    """Rewrite the sense component of a tag string to a coarser granularity.

    Works on any tag whose final ``-``-separated component is a sense
    label (``S-plans_goals``, ``B-T-knowledge``); tags without a sense
    component (``O``, ``H``, ``I-E``, bare ``S``) are fixed points.
    At binary granularity the sense component is dropped entirely.
    """
    parts = tag.split("-")
    try:
        sense_granularity(parts[-1])
    except TaxonomyError:
        return tag
    if len(parts) == 1:
        # A bare sense label is not a tag; leave it to project_sense callers.
        return tag
    projected = project_sense(parts[-1], granularity)
    if projected is None:
        return "-".join(parts[:-1])
    return "-".join(parts[:-1] + [projected])
