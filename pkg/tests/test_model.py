import pytest
from hypothesis import given, strategies as st

from gsnkit import Case, FlagSet, Predicate, edge_type_allowed
from gsnkit.errors import (
    DuplicateIdentifier,
    DuplicateTriple,
    EmptyStatement,
    UnknownEndpoint,
    UnknownPredicate,
)
from gsnkit.model import (
    EDGE_TYPING,
    ElementKind,
    ContainerKind,
    Multiplicity,
    Severity,
    vocabulary_names,
)


def test_add_element_stores_record():
    case = Case("AC1")
    case.add_element("Goal", "G1", "Launch system is acceptably safe")
    assert case.elements["G1"].statement == "Launch system is acceptably safe"
    assert case.elements["G1"].flags == FlagSet()


def test_add_element_rejects_empty_statement():
    case = Case("AC1")
    with pytest.raises(EmptyStatement):
        case.add_element("Goal", "G1", "")


def test_add_element_rejects_duplicate_id():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    with pytest.raises(DuplicateIdentifier):
        case.add_element("Goal", "G1", "another claim")


def test_add_edge_creates_addressable_relationship():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    case.add_element("Solution", "S1", "evidence")
    rid = case.add_edge("supportedBy", "G1", "S1")
    rel = case.relationships[rid]
    assert (rel.subject, rel.predicate, rel.object) == ("G1", Predicate.SUPPORTED_BY, "S1")


def test_challenges_may_target_a_relationship():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    case.add_element("Solution", "S1", "evidence")
    rid = case.add_edge("supportedBy", "G1", "S1")
    case.add_element("Goal", "D1", "counterevidence")
    cid = case.add_edge("challenges", "D1", rid)
    assert case.relationships[cid].object == rid


def test_add_edge_rejections():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    case.add_element("Solution", "S1", "evidence")
    case.add_edge("supportedBy", "G1", "S1")
    with pytest.raises(DuplicateTriple):
        case.add_edge("supportedBy", "G1", "S1")
    with pytest.raises(UnknownEndpoint):
        case.add_edge("supportedBy", "G1", "S9")
    with pytest.raises(UnknownPredicate):
        case.add_edge("begets", "G1", "S1")


@pytest.mark.parametrize(
    "predicate,subject,obj,allowed",
    [
        ("inContextOf", "Goal", "Context", True),
        ("supportedBy", "Solution", "Goal", False),
        ("supportedBy", "Goal", "Strategy", True),
        ("supportedBy", "Strategy", "Goal", True),
        ("supportedBy", "Strategy", "Solution", False),
        ("challenges", "Goal", "Relationship", True),
        ("challenges", "Context", "Goal", False),
        ("references", "Solution", "Artefact", True),
        ("references", "Goal", "Artefact", False),
        ("contains", "AssuranceCase", "Argument", True),
        ("contains", "Catalogue", "Pattern", True),
        ("conflictsWith", "Context", "Context", True),
        ("conflictsWith", "Context", "Artefact", False),
        ("associatedWith", "Relationship", "Argument", True),
        ("instantiates", "Argument", "Pattern", True),
        ("instantiates", "Goal", "Goal", True),
        ("instantiates", "Goal", "Solution", False),
        ("attachedTo", "Template", "InstantiationDataReference", True),
    ],
)
def test_edge_typing_table_cells(predicate, subject, obj, allowed):
    assert edge_type_allowed(predicate, subject, obj) is allowed


def test_edge_typing_total_over_kind_domain():
    kinds = (
        [k.value for k in ElementKind]
        + [k.value for k in ContainerKind]
        + ["Relationship"]
    )
    for predicate in Predicate:
        for s in kinds:
            for o in kinds:
                verdict = edge_type_allowed(predicate, s, o)
                assert verdict is (((s, o)) in EDGE_TYPING[predicate])


def test_flagset_defeated_implies_in_doubt():
    assert FlagSet(defeated=True).in_doubt is True
    assert FlagSet().set("defeated", True).in_doubt is True


def test_flagset_tri_state_round_trip():
    flags = FlagSet(valid=False, truth=True, public=True)
    assert FlagSet.from_dict(flags.as_dict()) == flags
    assert "inDoubt" not in flags.as_dict()


def test_multiplicity_invariants():
    with pytest.raises(ValueError):
        Multiplicity("optional", 1, 2)
    with pytest.raises(ValueError):
        Multiplicity("multiple", 3, 1)
    with pytest.raises(ValueError):
        Multiplicity("choice", 1, 1)  # missing group
    m = Multiplicity("multiple", 1, None)
    assert m.max_count is None


def test_completeness_check_empty_argument():
    case = Case("AC1")
    case.add_container("Argument", "A1", "claims", in_case=True)
    warnings = [d for d in case.completeness_check() if d.subjects == ("A1",)]
    assert len(warnings) == 1
    assert warnings[0].message == "A1 lacks a Goal; lacks an ArtefactReference"
    assert warnings[0].severity is Severity.WARNING


def test_completeness_check_solution_counts_as_artefact_reference():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    case.add_element("Solution", "S1", "evidence")
    case.add_container("Argument", "A1", "claims", members=["G1", "S1"], in_case=True)
    assert not [d for d in case.completeness_check() if d.subjects == ("A1",)]


def test_completeness_check_case_without_artefact():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    case.add_element("Solution", "S1", "evidence")
    case.add_container("Argument", "A1", "claims", members=["G1", "S1"], in_case=True)
    warnings = [d for d in case.completeness_check() if d.subjects == ("AC1",)]
    assert len(warnings) == 1 and "lacks an Artefact" in warnings[0].message


def test_vocabulary_registry_coverage():
    assert len(vocabulary_names("class")) >= 15
    assert len(vocabulary_names("predicate")) >= 11
    assert len(vocabulary_names("flag")) >= 9


_IDS = st.text(alphabet="abcdefgh", min_size=1, max_size=3)


@given(st.lists(_IDS, min_size=1, max_size=30))
def test_identifier_uniqueness_property(ids):
    case = Case("AC1")
    accepted: set[str] = set()
    for i in ids:
        if i in accepted or i == "AC1":
            with pytest.raises(DuplicateIdentifier):
                case.add_element("Goal", i, "claim")
        else:
            case.add_element("Goal", i, "claim")
            accepted.add(i)
    assert set(case.elements) == accepted


_NODES = st.sampled_from("abcdefgh")


@given(st.lists(st.tuples(_NODES, _NODES), max_size=40))
def test_reification_totality_property(pairs):
    case = Case("AC1")
    for node in "abcdefgh":
        case.add_element("Goal", node, "claim " + node)
    accepted = 0
    seen: set[tuple[str, str]] = set()
    for s, o in pairs:
        if (s, o) in seen:
            with pytest.raises(DuplicateTriple):
                case.add_edge("supportedBy", s, o)
        else:
            case.add_edge("supportedBy", s, o)
            seen.add((s, o))
            accepted += 1
    assert len(case.relationships) == accepted
