import pytest

from gencases import random_snapshot
from gsnkit import (
    Case,
    InferenceConfig,
    Multiplicity,
    Snapshot,
    apply_result,
    explain,
    naive_oracle,
    run_fixpoint,
)
from gsnkit.errors import DiagnosticsAsErrors, NonTermination, NotDerived
from gsnkit.model import Container, ContainerKind, Element, ElementKind, FlagSet, Predicate, Relationship
from gsnkit.store import Snapshot as Snap


def _snap(case: Case) -> Snapshot:
    return Snapshot.from_case(case)


def _check_oracle(snap: Snapshot, result) -> None:
    assert naive_oracle(snap) == result.assignment


def test_single_goal_is_top_level_and_undeveloped():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    res = run_fixpoint(_snap(case))
    assert res.assignment["G1"]["topLevel"] is True
    assert res.assignment["G1"]["undeveloped"] is True
    _check_oracle(_snap(case), res)


def test_truth_flows_from_valid_artefact(tiny_case):
    snap = _snap(tiny_case)
    res = run_fixpoint(snap)
    assert res.assignment["Sn1"]["truth"] is True
    assert res.assignment["G1"]["truth"] is True
    _check_oracle(snap, res)


def test_true_defeater_defeats_target():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    case.add_element("Goal", "D1", "counterclaim", flags={"truth": True})
    case.add_edge("challenges", "D1", "G1", rel_id="RC")
    snap = _snap(case)
    res = run_fixpoint(snap)
    got = res.assignment["G1"]
    assert got["defeated"] is True and got["inDoubt"] is True and got["truth"] is False
    _check_oracle(snap, res)


def test_unsettled_defeater_only_casts_doubt():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim", flags={"truth": True})
    case.add_element("Goal", "D1", "counterclaim")
    case.add_edge("challenges", "D1", "G1")
    snap = _snap(case)
    res = run_fixpoint(snap)
    got = res.assignment["G1"]
    assert got["defeated"] is False and got["inDoubt"] is True and got["truth"] is True
    _check_oracle(snap, res)


def test_invalid_assumption_closure():
    case = Case("AC1")
    case.add_element("Assumption", "As1", "assumption", flags={"valid": False})
    case.add_element("Goal", "G1", "claim")
    case.add_element("Goal", "G2", "subclaim")
    case.add_edge("inContextOf", "G1", "As1")
    case.add_edge("supportedBy", "G1", "G2")
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["G1"]["valid"] is False
    assert res.assignment["G2"]["valid"] is False
    _check_oracle(snap, res)


def test_support_cycle_invalidates_edges_with_diagnostic():
    case = Case("AC1")
    case.add_element("Goal", "G1", "a")
    case.add_element("Goal", "G2", "b")
    case.add_edge("supportedBy", "G1", "G2", rel_id="R1")
    case.add_edge("supportedBy", "G2", "G1", rel_id="R2")
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["R1"]["valid"] is False
    assert res.assignment["R2"]["valid"] is False
    assert {"R1", "R2"} <= set(res.invalidated_relationships)
    assert any(d.rule == "R4" for d in res.diagnostics)
    _check_oracle(snap, res)


def test_acyclicity_after_structural_stratum():
    snap = random_snapshot(7)
    res = run_fixpoint(snap)
    live = [
        r
        for r in snap.relationship_list
        if r.predicate is Predicate.SUPPORTED_BY and res.assignment[r.id]["valid"] is not False
    ]
    # the remaining supportedBy graph admits a topological order
    adj: dict[str, set[str]] = {}
    indeg: dict[str, int] = {}
    for r in live:
        adj.setdefault(r.subject, set()).add(r.object)
        indeg[r.object] = indeg.get(r.object, 0) + 1
        indeg.setdefault(r.subject, indeg.get(r.subject, 0))
    queue = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for succ in adj.get(node, ()):
            indeg[succ] -= 1
            if indeg[succ] == 0:
                queue.append(succ)
    assert seen == len(indeg)


def test_typing_violation_flagged():
    case = Case("AC1")
    case.add_element("Solution", "S1", "evidence")
    case.add_element("Goal", "G1", "claim")
    case.add_edge("supportedBy", "S1", "G1", rel_id="RX")  # solutions are leaves
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["RX"]["valid"] is False
    assert any(d.rule == "R3" for d in res.diagnostics)
    _check_oracle(snap, res)


def test_duplicate_identifiers_diagnosed():
    snap = Snap.from_records(
        case=Container(id="AC", kind=ContainerKind.ASSURANCE_CASE),
        elements=[
            Element(id="G1", kind=ElementKind.GOAL, statement="one"),
            Element(id="G1", kind=ElementKind.GOAL, statement="two"),
            Element(id="G2", kind=ElementKind.GOAL, statement="three"),
        ],
        relationships=[
            Relationship(id="R1", subject="G2", predicate=Predicate.SUPPORTED_BY, object="G1")
        ],
        strict=False,
    )
    res = run_fixpoint(snap)
    assert any(d.rule == "R11" and d.subjects == ("G1",) for d in res.diagnostics)
    assert res.assignment["R1"]["valid"] is False
    assert naive_oracle(snap) == res.assignment


def test_away_reference_to_non_public_element():
    case = Case("AC1")
    case.add_container("Module", "M1", "module one")
    case.add_container("Module", "M2", "module two")
    case.add_element("Goal", "G-remote", "remote claim", module="M2")  # not public
    case.add_element("Goal", "G-away", "away claim", module="M1", away_target=("G-remote", "M2"))
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["G-away"]["valid"] is False
    assert any(d.rule == "R11" and "public" in d.message for d in res.diagnostics)
    _check_oracle(snap, res)


def test_away_reference_to_public_element_is_clean():
    case = Case("AC1")
    case.add_container("Module", "M1", "module one")
    case.add_container("Module", "M2", "module two")
    case.add_element("Goal", "G-remote", "remote claim", module="M2", flags={"public": True})
    case.add_element("Goal", "G-away", "away claim", module="M1", away_target=("G-remote", "M2"))
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["G-away"]["valid"] is None
    assert not [d for d in res.diagnostics if d.rule == "R11"]


def test_conflicting_contexts_detach():
    case = Case("AC1")
    case.add_element("Goal", "G1", "top")
    case.add_element("Goal", "G2", "left")
    case.add_element("Goal", "G3", "right")
    case.add_edge("supportedBy", "G1", "G2")
    case.add_edge("supportedBy", "G1", "G3")
    case.add_element("Context", "C1", "nominal load")
    case.add_element("Context", "C2", "overload")
    case.add_edge("inContextOf", "G2", "C1", rel_id="RA1")
    case.add_edge("inContextOf", "G3", "C2", rel_id="RA2")
    case.add_edge("conflictsWith", "C1", "C2")
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["RA1"]["valid"] is False
    assert res.assignment["RA2"]["valid"] is False
    assert any(d.rule == "R6" for d in res.diagnostics)
    _check_oracle(snap, res)


def test_conflicting_contexts_in_disjoint_closures_are_fine():
    case = Case("AC1")
    case.add_element("Goal", "G2", "left root")
    case.add_element("Goal", "G3", "right root")
    case.add_element("Context", "C1", "nominal load")
    case.add_element("Context", "C2", "overload")
    case.add_edge("inContextOf", "G2", "C1", rel_id="RA1")
    case.add_edge("inContextOf", "G3", "C2", rel_id="RA2")
    case.add_edge("conflictsWith", "C1", "C2")
    res = run_fixpoint(_snap(case))
    assert res.assignment["RA1"]["valid"] is None
    assert res.assignment["RA2"]["valid"] is None


def test_challenge_cycle_degrades_to_doubt():
    case = Case("AC1")
    case.add_element("Goal", "D1", "first counter", flags={"truth": True})
    case.add_element("Goal", "D2", "second counter", flags={"truth": True})
    case.add_edge("challenges", "D1", "D2")
    case.add_edge("challenges", "D2", "D1")
    snap = _snap(case)
    res = run_fixpoint(snap)
    for eid in ("D1", "D2"):
        assert res.assignment[eid]["defeated"] is False
        assert res.assignment[eid]["inDoubt"] is True
    _check_oracle(snap, res)


def test_challenge_on_relationship_discounts_support():
    case = Case("AC1")
    case.add_container("Artefact", "A1", "evidence", flags={"valid": True})
    case.add_element("Goal", "G1", "claim")
    case.add_element("Solution", "Sn1", "proof")
    case.add_edge("supportedBy", "G1", "Sn1", rel_id="RS")
    case.add_edge("references", "Sn1", "A1")
    case.add_element("Goal", "D1", "edge is unsound", flags={"truth": True})
    case.add_edge("challenges", "D1", "RS")
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["RS"]["inDoubt"] is True
    assert res.assignment["Sn1"]["truth"] is True  # the evidence itself stands
    assert res.assignment["G1"]["truth"] is None  # but no longer supports the goal
    _check_oracle(snap, res)


def test_defeated_defeater_challenges_weakly():
    case = Case("AC1")
    case.add_container("Artefact", "A1", "evidence", flags={"valid": True})
    case.add_element("Goal", "G1", "claim")
    case.add_element("Goal", "D1", "counter", )
    case.add_element("Solution", "Sn-d", "counter evidence")
    case.add_edge("supportedBy", "D1", "Sn-d")
    case.add_edge("references", "Sn-d", "A1")
    case.add_element("Goal", "D0", "counter-counter", flags={"truth": True})
    case.add_edge("challenges", "D0", "D1")
    case.add_edge("challenges", "D1", "G1")
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["D1"]["defeated"] is True
    # D1's truth was revoked before its own challenge was weighed
    assert res.assignment["G1"]["defeated"] is False
    assert res.assignment["G1"]["inDoubt"] is True
    _check_oracle(snap, res)


def test_pattern_choice_bounds(pattern_snapshot):
    res = run_fixpoint(pattern_snapshot)
    assert res.assignment["Arg-bad"]["uninstantiated"] is True
    assert res.assignment["Arg-good"]["uninstantiated"] is False
    assert res.assignment["Arg-good"]["final"] is True
    assert any(d.rule == "R12" and "Arg-bad" in d.subjects for d in res.diagnostics)
    assert naive_oracle(pattern_snapshot) == res.assignment


def test_confidence_argument_failure_casts_doubt():
    case = Case("AC1")
    case.add_element("Goal", "G1", "risk claim")
    case.add_element("Solution", "Sn1", "risk evidence")
    case.add_element("Goal", "G-conf", "confidence claim")
    case.add_container("Argument", "Arg-c", "confidence argument", members=["G-conf"], in_case=True)
    case.add_edge(
        "supportedBy", "G1", "Sn1", rel_id="RS", acp="ACP-1", confidence_argument="Arg-c"
    )
    case.add_element("Goal", "D1", "confidence breaker", flags={"truth": True})
    case.add_edge("challenges", "D1", "G-conf")
    snap = _snap(case)
    res = run_fixpoint(snap)
    assert res.assignment["G-conf"]["defeated"] is True
    assert res.assignment["RS"]["inDoubt"] is True
    _check_oracle(snap, res)


def test_intact_confidence_argument_is_silent(llm_snapshot):
    res = run_fixpoint(llm_snapshot)
    assert res.assignment["R-perturb-suite"]["inDoubt"] is False


def test_monotonicity_single_delta_per_flag():
    for seed in range(30):
        res = run_fixpoint(random_snapshot(seed))
        keys = [(d.record_id, d.flag) for d in res.deltas]
        assert len(keys) == len(set(keys))


def test_defeat_dominance_property():
    for seed in range(60):
        res = run_fixpoint(random_snapshot(seed))
        for flags in res.assignment.values():
            if flags.get("defeated") is True:
                assert flags.get("truth") is not True


def test_idempotence_of_apply_then_rerun():
    for seed in range(40):
        snap = random_snapshot(seed)
        res = run_fixpoint(snap)
        settled = apply_result(snap, res)
        assert not run_fixpoint(settled).deltas


def test_iteration_guard_raises():
    with pytest.raises(NonTermination):
        run_fixpoint(random_snapshot(3), InferenceConfig(iteration_cap=1))


def test_strict_mode_raises_on_diagnostics():
    case = Case("AC1")
    case.add_element("Goal", "G1", "a")
    case.add_element("Goal", "G2", "b")
    case.add_edge("supportedBy", "G1", "G2")
    case.add_edge("supportedBy", "G2", "G1")
    with pytest.raises(DiagnosticsAsErrors):
        run_fixpoint(_snap(case), InferenceConfig(strict=True))


def test_disabled_rules_are_skipped():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    snap = _snap(case)
    cfg = InferenceConfig(enabled_rules=frozenset({"R8"}))
    res = run_fixpoint(snap, cfg)
    assert res.assignment["G1"]["topLevel"] is False  # R2 off
    assert res.assignment["G1"]["undeveloped"] is True
    assert naive_oracle(snap, cfg) == res.assignment


def test_overlays_shape(llm_snapshot):
    res = run_fixpoint(llm_snapshot)
    assert res.overlays["top-level"] >= {"G-root"}
    assert "G-attack-resistance" in res.overlays["defeated-closure"]
    assert res.overlays["rule-triggered"] == {d.record_id for d in res.deltas}
    for ids in res.overlays.values():
        assert ids <= llm_snapshot.all_ids


def test_explain_defeat_trace(llm_snapshot):
    res = run_fixpoint(llm_snapshot)
    steps = explain(res, "G-attack-resistance", "defeated")
    assert steps[-1].rule == "R9"
    assert ("R-jailbreak-attack", None) in steps[-1].premises
    assert ("D-jailbreak", "truth") in steps[-1].premises
    # the defeater's own truth derivation is part of the trace
    assert any(s.rule == "R7" and s.record_id == "D-jailbreak" for s in steps)


def test_explain_top_level_single_step():
    case = Case("AC1")
    case.add_element("Goal", "G1", "claim")
    res = run_fixpoint(_snap(case))
    steps = explain(res, "G1", "topLevel")
    assert [s.rule for s in steps] == ["R2"]


def test_explain_user_asserted_flag_not_derived(tiny_case):
    tiny_case.add_element("Goal", "G9", "seeded", flags={"truth": True})
    res = run_fixpoint(_snap(tiny_case))
    with pytest.raises(NotDerived):
        explain(res, "G9", "truth")
