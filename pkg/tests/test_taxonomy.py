import pytest
from hypothesis import given
from hypothesis import strategies as st

from modalkit.taxonomy import (
    CoarseSense,
    ConflatedSense,
    FineSense,
    Granularity,
    LegacySense,
    TaxonomyError,
    coarsen,
    conflate,
    labels_at,
    map_legacy,
    project,
    project_sense,
    sense_granularity,
)

PRIORITY_LEAVES = {FineSense.RULES_NORMS, FineSense.DESIRES_WISHES, FineSense.PLANS_GOALS}
GRANULARITIES = list(Granularity)


def test_exactly_six_fine_senses_in_two_branches():
    assert len(FineSense) == 6
    for sense in FineSense:
        assert coarsen(sense) in (CoarseSense.PRIORITY, CoarseSense.PLAUSIBILITY)
    assert {s for s in FineSense if coarsen(s) is CoarseSense.PRIORITY} == PRIORITY_LEAVES


def test_coarsen_examples():
    assert coarsen(FineSense.RULES_NORMS) is CoarseSense.PRIORITY
    assert coarsen(FineSense.KNOWLEDGE) is CoarseSense.PLAUSIBILITY
    assert coarsen(FineSense.AGENT) is CoarseSense.PLAUSIBILITY


def test_coarsen_preimage_sizes_are_three_and_three():
    priority = [s for s in FineSense if coarsen(s) is CoarseSense.PRIORITY]
    plausibility = [s for s in FineSense if coarsen(s) is CoarseSense.PLAUSIBILITY]
    assert len(priority) == 3 and len(plausibility) == 3


def test_conflate_examples():
    assert conflate(FineSense.DESIRES_WISHES) is ConflatedSense.INTENTIONS
    assert conflate(FineSense.PLANS_GOALS) is ConflatedSense.INTENTIONS
    assert conflate(FineSense.KNOWLEDGE) is ConflatedSense.KNOWLEDGE


def test_intentions_preimage_is_exactly_desires_and_plans():
    preimage = {s for s in FineSense if conflate(s) is ConflatedSense.INTENTIONS}
    assert preimage == {FineSense.DESIRES_WISHES, FineSense.PLANS_GOALS}


def test_conflation_respects_branches():
    # conflate then coarsen equals coarsen directly
    for sense in FineSense:
        via_conflated = project_sense(conflate(sense).value, Granularity.COARSE)
        assert via_conflated == coarsen(sense).value


def test_map_legacy():
    assert map_legacy(CoarseSense.PRIORITY) is LegacySense.DEONTIC
    assert map_legacy(FineSense.AGENT) is LegacySense.DYNAMIC
    assert map_legacy(FineSense.KNOWLEDGE) is LegacySense.EPISTEMIC
    assert map_legacy(FineSense.WORLD) is None
    assert map_legacy("world") is None


@pytest.mark.parametrize("sense", sorted(s.value for s in PRIORITY_LEAVES))
def test_map_legacy_rejects_unprojected_priority_leaves(sense):
    with pytest.raises(TaxonomyError):
        map_legacy(sense)


def test_map_legacy_rejects_unknown():
    with pytest.raises(TaxonomyError):
        map_legacy("plausibility")


def test_labels_at():
    assert labels_at(Granularity.BINARY) == ()
    assert set(labels_at(Granularity.COARSE)) == {"priority", "plausibility"}
    assert len(labels_at(Granularity.FINE_CONFLATED)) == 5
    assert len(labels_at(Granularity.FINE_FULL)) == 6


def test_project_examples():
    assert project("S-plans_goals", Granularity.COARSE) == "S-priority"
    assert project("B-desires_wishes", Granularity.FINE_CONFLATED) == "B-intentions"
    assert project("O", Granularity.BINARY) == "O"
    assert project("O", Granularity.COARSE) == "O"
    assert project("S-knowledge", Granularity.BINARY) == "S"
    assert project("B-T-plans_goals", Granularity.COARSE) == "B-T-priority"
    assert project("I-E", Granularity.BINARY) == "I-E"
    assert project("H", Granularity.COARSE) == "H"


def test_project_sense_rejects_upward():
    with pytest.raises(TaxonomyError):
        project_sense("priority", Granularity.FINE_FULL)
    with pytest.raises(TaxonomyError):
        project_sense("intentions", Granularity.FINE_FULL)
    with pytest.raises(TaxonomyError):
        project_sense("nonsense", Granularity.COARSE)


@st.composite
def sense_tags(draw):
    prefix = draw(st.sampled_from(["S", "B", "I", "E"]))
    sense = draw(st.sampled_from([s.value for s in FineSense]))
    return f"{prefix}-{sense}"


@given(sense_tags(), st.sampled_from(GRANULARITIES))
def test_project_idempotent(tag, granularity):
    once = project(tag, granularity)
    assert project(once, granularity) == once


@given(sense_tags())
def test_project_composes_through_coarse(tag):
    assert project(project(tag, Granularity.COARSE), Granularity.BINARY) == project(
        tag, Granularity.BINARY
    )
    assert project(
        project(tag, Granularity.FINE_CONFLATED), Granularity.COARSE
    ) == project(tag, Granularity.COARSE)


@given(sense_tags(), st.sampled_from(GRANULARITIES))
def test_project_never_crosses_the_modal_boundary(tag, granularity):
    # a modal tag stays modal; O stays O
    assert project(tag, granularity) != "O"
    assert project("O", granularity) == "O"


def test_enum_values_are_canonical_ascii():
    for enum in (FineSense, ConflatedSense, CoarseSense, LegacySense):
        for member in enum:
            assert member.value == member.value.lower()
            assert " " not in member.value


def test_sense_granularity_levels():
    assert sense_granularity("plans_goals") is Granularity.FINE_FULL
    assert sense_granularity("intentions") is Granularity.FINE_CONFLATED
    assert sense_granularity("priority") is Granularity.COARSE
