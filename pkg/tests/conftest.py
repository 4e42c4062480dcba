import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gsnkit import Case, Snapshot
from gsnkit.fixtures import build_car_roofload, build_llm_robustness, build_pattern_choice


@pytest.fixture
def llm_snapshot() -> Snapshot:
    return Snapshot.from_case(build_llm_robustness())


@pytest.fixture
def car_snapshot() -> Snapshot:
    return Snapshot.from_case(build_car_roofload())


@pytest.fixture
def pattern_snapshot() -> Snapshot:
    return Snapshot.from_case(build_pattern_choice())


@pytest.fixture
def tiny_case() -> Case:
    case = Case("AC1", "tiny")
    case.add_container("Artefact", "A1", "evidence file", flags={"valid": True}, in_case=True)
    case.add_element("Goal", "G1", "the system is safe")
    case.add_element("Solution", "Sn1", "test evidence")
    case.add_edge("supportedBy", "G1", "Sn1", rel_id="R1")
    case.add_edge("references", "Sn1", "A1", rel_id="R2")
    return case
