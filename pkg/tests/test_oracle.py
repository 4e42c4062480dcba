import pytest

from gencases import random_snapshot
from gsnkit import Case, Snapshot, naive_oracle, run_fixpoint
from gsnkit.errors import OracleSizeExceeded
from gsnkit.model import Container, ContainerKind, Element, ElementKind


def test_empty_case_yields_empty_assignment():
    snap = Snapshot.from_case(Case("AC-empty"))
    assignment = naive_oracle(snap)
    assert set(assignment) == {"AC-empty"}


def test_oracle_equals_engine_small_fixtures(llm_snapshot, car_snapshot, pattern_snapshot):
    for snap in (llm_snapshot, car_snapshot, pattern_snapshot):
        assert naive_oracle(snap) == run_fixpoint(snap).assignment


def test_shuffled_rule_application_is_deterministic():
    snap = random_snapshot(11)
    reference = naive_oracle(snap, seed=0)
    for seed in range(1, 50):
        assert naive_oracle(snap, seed=seed) == reference


def test_size_guard():
    elements = [
        Element(id=f"G{i}", kind=ElementKind.GOAL, statement=f"claim {i}") for i in range(1001)
    ]
    snap = Snapshot.from_records(
        case=Container(id="AC", kind=ContainerKind.ASSURANCE_CASE), elements=elements
    )
    with pytest.raises(OracleSizeExceeded):
        naive_oracle(snap)
