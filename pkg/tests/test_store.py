import random
import threading

import pytest
from hypothesis import given, settings, strategies as st

from gencases import random_snapshot
from gsnkit import Case, CaseDelta, Overlay, Snapshot, Store, load, save
from gsnkit.errors import DanglingReference, DuplicateIdentifier, ParseError, StaleVersion
from gsnkit.model import Element, ElementKind, Predicate, Relationship


def _store(tiny_case) -> Store:
    return Store.from_case(tiny_case)


def test_match_pattern_challenges(llm_snapshot):
    rels = llm_snapshot.match_pattern(predicate="challenges")
    assert [r.id for r in rels] == ["R-exfil-filter", "R-jailbreak-attack"]
    assert {r.subject for r in rels} == {"D-exfil", "D-jailbreak"}


def test_match_pattern_empty_result(tiny_case):
    snap = Snapshot.from_case(tiny_case)
    assert snap.match_pattern(subject="A1") == []


def test_match_pattern_all_wildcard_totality(llm_snapshot):
    assert len(llm_snapshot.match_pattern()) == len(llm_snapshot.relationship_list)


def test_commit_increments_version_by_one(tiny_case):
    store = _store(tiny_case)
    v0 = store.version
    store.commit(CaseDelta(add_elements=[Element(id="G2", kind=ElementKind.GOAL, statement="more")]))
    assert store.version == v0 + 1


def test_commit_is_atomic_on_error(tiny_case):
    store = _store(tiny_case)
    v0 = store.version
    delta = CaseDelta(
        add_relationships=[
            Relationship(id="RX", subject="G1", predicate=Predicate.SUPPORTED_BY, object="NOPE")
        ]
    )
    with pytest.raises(DanglingReference):
        store.commit(delta)
    assert store.version == v0
    assert "RX" not in store.snapshot().relationships


def test_commit_rejects_duplicate_identifier(tiny_case):
    store = _store(tiny_case)
    with pytest.raises(DuplicateIdentifier):
        store.commit(CaseDelta(add_elements=[Element(id="G1", kind=ElementKind.GOAL, statement="dup")]))


def test_prior_snapshots_stay_queryable(tiny_case):
    store = _store(tiny_case)
    old = store.snapshot()
    store.commit(CaseDelta(add_elements=[Element(id="G2", kind=ElementKind.GOAL, statement="more")]))
    assert "G2" not in old.elements
    assert "G2" in store.snapshot().elements
    assert store.snapshot(old.version) is old


def test_optimistic_concurrency(tiny_case):
    store = _store(tiny_case)
    with pytest.raises(StaleVersion):
        store.commit(
            CaseDelta(add_elements=[Element(id="G2", kind=ElementKind.GOAL, statement="x")]),
            expected_version=99,
        )


def test_removal_cascades_incident_edges(tiny_case):
    store = _store(tiny_case)
    store.commit(CaseDelta(remove_ids=["Sn1"]))
    snap = store.snapshot()
    assert "Sn1" not in snap.elements
    assert "R1" not in snap.relationships  # supportedBy G1 -> Sn1
    assert "R2" not in snap.relationships  # references Sn1 -> A1


def test_save_load_round_trip(tmp_path, llm_snapshot):
    path = tmp_path / "case.gsn.json"
    save(llm_snapshot, path)
    again = load(path)
    assert again.record_equal(llm_snapshot)


def test_load_truncated_file(tmp_path, llm_snapshot):
    path = tmp_path / "case.gsn.json"
    save(llm_snapshot, path)
    path.write_text(path.read_text()[:200], encoding="utf-8")
    with pytest.raises(ParseError):
        load(path)


def test_save_empty_case(tmp_path):
    snap = Snapshot.from_case(Case("AC-empty"))
    path = tmp_path / "empty.gsn.json"
    save(snap, path)
    assert load(path).record_equal(snap)


def test_overlay_membership_checked(llm_snapshot):
    overlay = Overlay(name="x", member_ids=frozenset({"G-root"}), origin="manual")
    overlay.check(llm_snapshot)
    with pytest.raises(DanglingReference):
        Overlay(name="y", member_ids=frozenset({"GHOST"})).check(llm_snapshot)


def test_concurrent_readers_see_stable_snapshots(tiny_case):
    store = _store(tiny_case)
    base = store.snapshot()
    errors: list[Exception] = []

    def reader():
        try:
            for _ in range(200):
                assert len(base.element_list) == 2
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    def writer():
        for i in range(20):
            store.commit(
                CaseDelta(add_elements=[Element(id=f"W{i}", kind=ElementKind.GOAL, statement="w")])
            )

    threads = [threading.Thread(target=reader) for _ in range(4)] + [threading.Thread(target=writer)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len(base.element_list) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.data())
def test_index_matches_linear_scan(seed, data):
    snap = random_snapshot(seed)
    rels = list(snap.relationship_list)
    rng = random.Random(seed)
    ids = sorted(snap.all_ids)
    subject = data.draw(st.sampled_from(ids + [None]))
    obj = data.draw(st.sampled_from(ids + [None]))
    predicate = data.draw(st.sampled_from([p.value for p in Predicate] + [None]))
    first_wins: dict[str, object] = {}
    for r in rels:
        first_wins.setdefault(r.id, r)
    got = snap.match_pattern(subject=subject, predicate=predicate, obj=obj)
    want = sorted(
        (
            r
            for r in first_wins.values()
            if (subject is None or r.subject == subject)
            and (predicate is None or r.predicate.value == predicate)
            and (obj is None or r.object == obj)
        ),
        key=lambda r: r.id,
    )
    assert got == want
