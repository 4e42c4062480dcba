"""Bundled example cases.

``llm_robustness`` models an adversarial-robustness argument for a deployed
language model (defeaters for jailbreak and data-exfiltration findings, a
confidence argument, a prototype test template). ``car_roofload`` models
static structural load safety for a car with a roof rack; its overload
scenario is provided as a delta so it can be toggled. ``pattern_choice``
exercises multiplicity checking of pattern instances.

The ``.gsn.json`` files alongside this module are the canonical serialized
forms of these builders.
"""

from __future__ import annotations

from importlib import resources

from .. import caseio
from ..model import (
    Case,
    Container,
    ContainerKind,
    Element,
    ElementKind,
    FlagSet,
    Multiplicity,
    Predicate,
    Relationship,
)
from ..store import CaseDelta, Snapshot

FIXTURE_NAMES = ("llm_robustness", "car_roofload", "pattern_choice")


def fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.gsn.json").read_text(encoding="utf-8")


def load(name: str) -> caseio.CaseDocument:
    return caseio.parse_native(fixture_text(name))


def load_snapshot(name: str, version: int = 1) -> Snapshot:
    return Snapshot.from_document(load(name), version=version)


def build_llm_robustness() -> Case:
    case = Case("AC-llm", "LLM adversarial robustness assurance case")
    add_el = case.add_element
    add_ct = case.add_container

    add_ct("Artefact", "A-benchmark-dataset", "BenchmarkDataset", flags={"valid": True}, in_case=True)
    add_ct("Artefact", "A-redteam-report", "Red-team report 2024", flags={"valid": True}, in_case=True)
    add_ct("Artefact", "A-monitoring-logs", "Production monitoring logs", flags={"valid": True}, in_case=True)
    add_ct("Artefact", "A-perturb-corpus", "Perturbation corpus", flags={"valid": True}, in_case=True)
    add_ct("Artefact", "A-dan-corpus", "DAN prompt corpus", in_case=True)
    add_ct("Artefact", "A-hijack-corpus", "Prompt hijack corpus", in_case=True)

    add_el("Goal", "G-root", "LLM deployment is acceptably robust to adversarial prompt attacks")
    add_el("Context", "C-gpt-scope", "Target model is a GPT-4-class commercial LLM accessed via API")
    add_el("Assumption", "As-threat", "Attacker has black-box API access only")
    add_el("Justification", "J-depth", "Layered defences are appropriate for prompt attacks")
    add_el("Strategy", "S-depth", "Argue over defence-in-depth layers")
    add_el("Goal", "G-attack-resistance", "Attack Resistance: the model resists known jailbreak prompt families")
    add_el(
        "Goal",
        "G-perturbation-robustness",
        "Perturbation Robustness: output is stable under token-level perturbations measured on the benchmark corpus",
    )
    add_el("Goal", "G-filtering", "Input and output filtering blocks malicious prompt patterns")
    add_el("Goal", "G-monitoring", "Runtime monitoring detects exfiltration attempts")
    add_el("Goal", "G-benchmark-coverage", "Benchmark coverage spans the known jailbreak corpora")
    add_el("Solution", "Sn-benchmark-pre", "Benchmark run 2024-03 against BenchmarkDataset", published="2024-03-15T00:00:00Z")
    add_el("Solution", "Sn-benchmark-post", "Benchmark rerun 2025-01 against BenchmarkDataset", published="2025-01-10T00:00:00Z")
    add_el("Solution", "Sn-redteam", "Red-team exercise covering DAN-style jailbreaks", published="2024-06-01T00:00:00Z")
    add_el("Solution", "Sn-redteam-plan", "Planned quarterly red-team exercise")
    add_el("Solution", "Sn-filter-eval", "Filter bypass evaluation with zero critical bypasses", published="2024-10-01T00:00:00Z")
    add_el("Solution", "Sn-monitor-logs", "Thirty-day monitoring log review", published="2024-12-01T00:00:00Z")
    add_el("Solution", "Sn-perturbation-suite", "Perturbation test suite results", published="2024-11-20T00:00:00Z")
    add_el("Goal", "D-jailbreak", "Jailbreak prompts bypass the safety filter in 12% of attempts")
    add_el("Goal", "D-exfil", "Data-exfiltration probes occasionally evade output filtering")
    add_el("Solution", "Sn-jailbreak-eval", "Internal jailbreak evaluation report", published="2024-09-20T00:00:00Z")
    add_el("Goal", "G-conf-perplexity", "Perplexity-based anomaly scoring reliably flags adversarial inputs")
    add_el("Solution", "Sn-conf-calib", "Perplexity detector calibration study", published="2025-02-01T00:00:00Z")
    add_el("InstantiationDataReference", "IDR-attack-test", "Attack prompt instantiation data")
    add_el("Solution", "Sn-proto-attack-test", "Test against {attack prompt}", flags={"uninstantiated": True})

    add_ct(
        "Argument",
        "Arg-robustness",
        "LLM Robustness Argument",
        members=[
            "G-root", "C-gpt-scope", "As-threat", "J-depth", "S-depth",
            "G-attack-resistance", "G-perturbation-robustness", "G-filtering",
            "G-monitoring", "G-benchmark-coverage", "Sn-benchmark-pre",
            "Sn-benchmark-post", "Sn-redteam", "Sn-redteam-plan", "Sn-filter-eval",
            "Sn-monitor-logs", "Sn-perturbation-suite", "D-jailbreak", "D-exfil",
            "Sn-jailbreak-eval",
        ],
        in_case=True,
    )
    add_ct(
        "Argument",
        "Arg-conf",
        "Perplexity confidence argument",
        members=["G-conf-perplexity", "Sn-conf-calib"],
        in_case=True,
    )
    add_ct(
        "Template",
        "Tmpl-attack-test",
        "Attack prompt test template",
        members=["Sn-proto-attack-test"],
        instantiation_data="IDR-attack-test",
        in_case=True,
    )

    edge = case.add_edge
    edge("inContextOf", "G-root", "C-gpt-scope", rel_id="R-root-scope")
    edge("inContextOf", "G-root", "As-threat", rel_id="R-root-threat")
    edge("inContextOf", "S-depth", "J-depth", rel_id="R-depth-just")
    edge("supportedBy", "G-root", "S-depth", rel_id="R-root-depth")
    edge("supportedBy", "S-depth", "G-attack-resistance", rel_id="R-depth-attack")
    edge("supportedBy", "S-depth", "G-perturbation-robustness", rel_id="R-depth-perturb")
    edge("supportedBy", "S-depth", "G-filtering", rel_id="R-depth-filter")
    edge("supportedBy", "S-depth", "G-monitoring", rel_id="R-depth-monitor")
    edge("supportedBy", "G-attack-resistance", "G-benchmark-coverage", rel_id="R-attack-coverage")
    edge("supportedBy", "G-attack-resistance", "Sn-redteam", rel_id="R-attack-redteam")
    edge("supportedBy", "G-attack-resistance", "Sn-redteam-plan", rel_id="R-attack-plan")
    edge("supportedBy", "G-attack-resistance", "Sn-benchmark-pre", rel_id="R-attack-benchpre")
    edge("supportedBy", "G-attack-resistance", "Sn-benchmark-post", rel_id="R-attack-benchpost")
    edge("supportedBy", "G-filtering", "Sn-filter-eval", rel_id="R-filter-eval")
    edge("supportedBy", "G-monitoring", "Sn-monitor-logs", rel_id="R-monitor-logs")
    edge(
        "supportedBy",
        "G-perturbation-robustness",
        "Sn-perturbation-suite",
        rel_id="R-perturb-suite",
        acp="ACP-1",
        confidence_argument="Arg-conf",
    )
    edge("challenges", "D-jailbreak", "G-attack-resistance", rel_id="R-jailbreak-attack")
    edge("supportedBy", "D-jailbreak", "Sn-jailbreak-eval", rel_id="R-jailbreak-eval")
    edge("challenges", "D-exfil", "Sn-filter-eval", rel_id="R-exfil-filter")
    edge("supportedBy", "G-conf-perplexity", "Sn-conf-calib", rel_id="R-conf-calib")
    edge("references", "Sn-benchmark-pre", "A-benchmark-dataset", rel_id="R-ref-benchpre")
    edge("references", "Sn-benchmark-post", "A-benchmark-dataset", rel_id="R-ref-benchpost")
    edge("references", "Sn-redteam", "A-redteam-report", rel_id="R-ref-redteam")
    edge("references", "Sn-filter-eval", "A-redteam-report", rel_id="R-ref-filter")
    edge("references", "Sn-monitor-logs", "A-monitoring-logs", rel_id="R-ref-monitor")
    edge("references", "Sn-perturbation-suite", "A-perturb-corpus", rel_id="R-ref-perturb")
    edge("references", "Sn-jailbreak-eval", "A-redteam-report", rel_id="R-ref-jailbreak")
    edge("references", "Sn-conf-calib", "A-monitoring-logs", rel_id="R-ref-conf")
    edge("references", "IDR-attack-test", "A-dan-corpus", rel_id="R-ref-dan")
    edge("references", "IDR-attack-test", "A-hijack-corpus", rel_id="R-ref-hijack")
    edge("attachedTo", "Tmpl-attack-test", "IDR-attack-test", rel_id="R-tmpl-idr")
    return case


def build_car_roofload() -> Case:
    case = Case("AC-car", "Roof load safety case")
    add_el = case.add_element
    add_ct = case.add_container

    add_ct("Artefact", "A-roof-spec", "Roof rack rating specification", flags={"valid": True}, in_case=True)
    add_ct("Artefact", "A-load-plan", "Loading plan 2025", flags={"valid": True}, in_case=True)

    add_el("Goal", "G-vehicle-safe", "Vehicle operation is acceptably safe under static structural load")
    add_el("Context", "C-vehicle", "Demonstration vehicle: compact car with factory roof rack")
    add_el("Strategy", "S-loads", "Argue over each structural load path")
    add_el("Goal", "G-roof-load", "Roof load stays within the 75 kg rated limit in all driving scenarios")
    add_el("Goal", "G-payload", "Total payload stays within the 450 kg gross payload limit")
    add_el("Solution", "Sn-roof-spec", "Roof rack rating specification sheet")
    add_el("Solution", "Sn-load-plan", "Loading plan review for the 60 kg luggage configuration")
    add_el("Solution", "Sn-payload-calc", "Payload calculation sheet")

    add_ct(
        "Argument",
        "Arg-load",
        "Structural load argument",
        members=[
            "G-vehicle-safe", "C-vehicle", "S-loads", "G-roof-load", "G-payload",
            "Sn-roof-spec", "Sn-load-plan", "Sn-payload-calc",
        ],
        in_case=True,
    )

    edge = case.add_edge
    edge("inContextOf", "G-vehicle-safe", "C-vehicle", rel_id="R-safe-ctx")
    edge("supportedBy", "G-vehicle-safe", "S-loads", rel_id="R-safe-loads")
    edge("supportedBy", "S-loads", "G-roof-load", rel_id="R-loads-roof")
    edge("supportedBy", "S-loads", "G-payload", rel_id="R-loads-payload")
    edge("supportedBy", "G-roof-load", "Sn-roof-spec", rel_id="R-roof-spec")
    edge("supportedBy", "G-roof-load", "Sn-load-plan", rel_id="R-roof-plan")
    edge("supportedBy", "G-payload", "Sn-payload-calc", rel_id="R-payload-calc")
    edge("references", "Sn-roof-spec", "A-roof-spec", rel_id="R-ref-spec")
    edge("references", "Sn-load-plan", "A-load-plan", rel_id="R-ref-plan")
    edge("references", "Sn-payload-calc", "A-load-plan", rel_id="R-ref-calc")
    return case


def overload_scenario_delta() -> CaseDelta:
    """Counterfactual roof-overload scenario for the car case: a measured
    120 kg cargo defeats the 75 kg roof-load claim while active."""
    return CaseDelta(
        add_containers=[
            Container(
                id="A-overload-log",
                kind=ContainerKind.ARTEFACT,
                name="Overload measurement log",
                flags=FlagSet(valid=True),
            )
        ],
        add_elements=[
            Element(
                id="D-overload",
                kind=ElementKind.GOAL,
                statement="Overloaded scenario: 120 kg roof cargo exceeds the rated limit",
            ),
            Element(
                id="Sn-overload-measure",
                kind=ElementKind.SOLUTION,
                statement="Roof cargo measurement: 120 kg logged",
            ),
        ],
        add_relationships=[
            Relationship(
                id="R-overload-challenge",
                subject="D-overload",
                predicate=Predicate.CHALLENGES,
                object="G-roof-load",
            ),
            Relationship(
                id="R-overload-support",
                subject="D-overload",
                predicate=Predicate.SUPPORTED_BY,
                object="Sn-overload-measure",
            ),
            Relationship(
                id="R-overload-ref",
                subject="Sn-overload-measure",
                predicate=Predicate.REFERENCES,
                object="A-overload-log",
            ),
        ],
    )

SCENARIO_RECORD_IDS = (
    "D-overload",
    "Sn-overload-measure",
    "A-overload-log",
)


def build_pattern_choice() -> Case:
    """A pattern requiring exactly one of two evidence alternatives, with one
    conforming instance and one violating (empty-choice) instance."""
    case = Case("AC-pattern", "Evidence choice pattern fixture")
    add_el = case.add_element
    add_ct = case.add_container

    add_el("Goal", "PG-claim", "Component {X} is verified")
    add_el("Solution", "PSn-test", "Test report for {X}", flags={"uninstantiated": True})
    add_el("Solution", "PSn-proof", "Proof artifact for {X}", flags={"uninstantiated": True})
    add_ct("Pattern", "Pat-evidence", "Evidence selection pattern", members=["PG-claim", "PSn-test", "PSn-proof"], in_case=True)
    case.add_edge(
        "supportedBy", "PG-claim", "PSn-test", rel_id="RP-test",
        multiplicity=Multiplicity(indicator="choice", min_count=1, max_count=1, group="ev"),
    )
    case.add_edge(
        "supportedBy", "PG-claim", "PSn-proof", rel_id="RP-proof",
        multiplicity=Multiplicity(indicator="choice", min_count=1, max_count=1, group="ev"),
    )

    add_ct("Artefact", "A-report", "Verification report", flags={"valid": True}, in_case=True)

    # Conforming instance: realizes exactly one alternative.
    add_el("Goal", "IG-good", "Component pump is verified")
    add_el("Solution", "ISn-good", "Test report for pump")
    add_ct("Argument", "Arg-good", "Pump verification instance", members=["IG-good", "ISn-good"], in_case=True)
    case.add_edge("instantiates", "Arg-good", "Pat-evidence", rel_id="RI-good-pat")
    case.add_edge("instantiates", "IG-good", "PG-claim", rel_id="RI-good-goal")
    case.add_edge("instantiates", "ISn-good", "PSn-test", rel_id="RI-good-sol")
    case.add_edge("supportedBy", "IG-good", "ISn-good", rel_id="RI-good-support")
    case.add_edge("references", "ISn-good", "A-report", rel_id="RI-good-ref")

    # Violating instance: the choice group stays unrealized.
    add_el("Goal", "IG-bad", "Component valve is verified")
    add_ct("Argument", "Arg-bad", "Valve verification instance", members=["IG-bad"], in_case=True)
    case.add_edge("instantiates", "Arg-bad", "Pat-evidence", rel_id="RI-bad-pat")
    case.add_edge("instantiates", "IG-bad", "PG-claim", rel_id="RI-bad-goal")
    return case


BUILDERS = {
    "llm_robustness": build_llm_robustness,
    "car_roofload": build_car_roofload,
    "pattern_choice": build_pattern_choice,
}
