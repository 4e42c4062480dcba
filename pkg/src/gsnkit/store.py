"""Versioned in-memory store over case records.

Snapshots are immutable, indexed views of a case at a version. Commits are
copy-on-write and serialized through a single writer lock; any number of
readers can hold older snapshots, which never observe later changes.
"""

from __future__ import annotations

import dataclasses
import threading
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import caseio
from .errors import DanglingReference, DuplicateIdentifier, StaleVersion
from .model import (
    Case,
    Container,
    ContainerKind,
    Element,
    FlagSet,
    Predicate,
    Relationship,
    TRI_STATE_FLAGS,
    parse_timestamp,
)


@dataclass(frozen=True)
class Overlay:
    """Named id-set over one snapshot, used for coordinated highlighting."""

    name: str
    member_ids: frozenset[str]
    origin: str = "rule"  # rule | query | manual

    def check(self, snapshot: "Snapshot") -> None:
        missing = self.member_ids - snapshot.all_ids
        if missing:
            raise DanglingReference(sorted(missing)[0])


class Snapshot:
    """Frozen record sets plus lookup indexes for one committed version.

    Record lists may contain duplicate ids when built leniently (for
    hygiene-rule testing); the id-keyed views then keep the first record.
    """

    def __init__(
        self,
        *,
        version: int,
        case: Container,
        elements: Sequence[Element],
        relationships: Sequence[Relationship],
        containers: Sequence[Container],
        strict: bool = True,
    ):
        self.version = version
        self.case = case
        self.element_list: tuple[Element, ...] = tuple(elements)
        self.relationship_list: tuple[Relationship, ...] = tuple(relationships)
        self.container_list: tuple[Container, ...] = tuple(containers)

        self.elements: dict[str, Element] = {}
        for e in self.element_list:
            self.elements.setdefault(e.id, e)
        self.relationships: dict[str, Relationship] = {}
        for r in self.relationship_list:
            self.relationships.setdefault(r.id, r)
        self.containers: dict[str, Container] = {case.id: case}
        for c in self.container_list:
            self.containers.setdefault(c.id, c)

        if strict:
            seen: set[str] = set()
            for rid in self._iter_ids():
                if rid in seen:
                    raise DuplicateIdentifier(rid)
                seen.add(rid)
            self._check_references()

        self.all_ids: frozenset[str] = frozenset(self._iter_ids())
        self._build_indexes()

    def _iter_ids(self) -> Iterable[str]:
        yield self.case.id
        for e in self.element_list:
            yield e.id
        for r in self.relationship_list:
            yield r.id
        for c in self.container_list:
            yield c.id

    def _check_references(self) -> None:
        ids = set(self._iter_ids())
        for r in self.relationship_list:
            for endpoint in (r.subject, r.object):
                if endpoint not in ids:
                    raise DanglingReference(endpoint)
        for c in [self.case, *self.container_list]:
            for m in c.members:
                if m not in ids:
                    raise DanglingReference(m)

    def _build_indexes(self) -> None:
        # Indexes follow the first-wins id-keyed views so that duplicate-id
        # records (lenient snapshots) never leak a second kind or statement.
        self.by_kind: dict[str, list[str]] = {}
        for e in self.elements.values():
            self.by_kind.setdefault(e.kind.value, []).append(e.id)
        for c in self.containers.values():
            self.by_kind.setdefault(c.kind.value, []).append(c.id)

        self.rel_by_predicate: dict[str, list[str]] = {}
        self.rel_by_subject: dict[str, list[str]] = {}
        self.rel_by_object: dict[str, list[str]] = {}
        for r in self.relationships.values():
            self.rel_by_predicate.setdefault(r.predicate.value, []).append(r.id)
            self.rel_by_subject.setdefault(r.subject, []).append(r.id)
            self.rel_by_object.setdefault(r.object, []).append(r.id)

        # Case-folded statement/name text for substring search.
        self.statement_index: dict[str, str] = {
            e.id: e.statement.lower() for e in self.elements.values()
        }
        for c in self.containers.values():
            self.statement_index.setdefault(c.id, c.name.lower())

        # Membership view: authored members plus explicit contains edges.
        self.membership: dict[str, set[str]] = {}
        for c in self.containers.values():
            self.membership.setdefault(c.id, set()).update(c.members)
        for r in self.relationships.values():
            if r.predicate is Predicate.CONTAINS:
                self.membership.setdefault(r.subject, set()).add(r.object)

    # -- queries -----------------------------------------------------------

    def match_pattern(
        self,
        subject: str | None = None,
        predicate: Predicate | str | None = None,
        obj: str | None = None,
    ) -> list[Relationship]:
        """All reified relationships matching the bound positions, in stable
        id order. All-wildcard returns every relationship."""
        candidates: Iterable[str]
        if subject is not None:
            candidates = self.rel_by_subject.get(subject, [])
        elif obj is not None:
            candidates = self.rel_by_object.get(obj, [])
        elif predicate is not None:
            candidates = self.rel_by_predicate.get(Predicate(predicate).value, [])
        else:
            candidates = list(self.relationships)
        pred_value = Predicate(predicate).value if predicate is not None else None
        out = []
        for rid in candidates:
            r = self.relationships[rid]
            if subject is not None and r.subject != subject:
                continue
            if pred_value is not None and r.predicate.value != pred_value:
                continue
            if obj is not None and r.object != obj:
                continue
            out.append(r)
        out.sort(key=lambda r: r.id)
        return out

    def record_kind(self, record_id: str) -> str | None:
        if record_id in self.elements:
            return self.elements[record_id].kind.value
        if record_id in self.containers:
            return self.containers[record_id].kind.value
        if record_id in self.relationships:
            return "Relationship"
        return None

    def members_closure(self, container_id: str) -> set[str]:
        """Transitive contains-closure below a container."""
        seen: set[str] = set()
        stack = list(self.membership.get(container_id, ()))
        while stack:
            m = stack.pop()
            if m in seen:
                continue
            seen.add(m)
            stack.extend(self.membership.get(m, ()))
        return seen

    def to_document(self) -> caseio.CaseDocument:
        return caseio.CaseDocument(
            case=self.case,
            elements=list(self.element_list),
            relationships=list(self.relationship_list),
            containers=list(self.container_list),
        )

    def record_equal(self, other: "Snapshot") -> bool:
        return (
            self.case == other.case
            and sorted(self.element_list, key=lambda e: e.id)
            == sorted(other.element_list, key=lambda e: e.id)
            and sorted(self.relationship_list, key=lambda r: r.id)
            == sorted(other.relationship_list, key=lambda r: r.id)
            and sorted(self.container_list, key=lambda c: c.id)
            == sorted(other.container_list, key=lambda c: c.id)
        )

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_case(cls, case: Case, version: int = 1) -> "Snapshot":
        return cls(
            version=version,
            case=case.case,
            elements=list(case.elements.values()),
            relationships=list(case.relationships.values()),
            containers=list(case.containers.values()),
        )

    @classmethod
    def from_document(cls, doc: caseio.CaseDocument, version: int = 1) -> "Snapshot":
        return cls(
            version=version,
            case=doc.case,
            elements=doc.elements,
            relationships=doc.relationships,
            containers=doc.containers,
        )

    @classmethod
    def from_records(
        cls,
        *,
        case: Container,
        elements: Sequence[Element] = (),
        relationships: Sequence[Relationship] = (),
        containers: Sequence[Container] = (),
        version: int = 1,
        strict: bool = True,
    ) -> "Snapshot":
        return cls(
            version=version,
            case=case,
            elements=elements,
            relationships=relationships,
            containers=containers,
            strict=strict,
        )


FlagUpdate = tuple[str, str, object]  # (record id, flag or "published", value)


@dataclass
class CaseDelta:
    """One atomic change set: record additions, removals and flag updates."""

    add_elements: list[Element] = field(default_factory=list)
    add_relationships: list[Relationship] = field(default_factory=list)
    add_containers: list[Container] = field(default_factory=list)
    remove_ids: list[str] = field(default_factory=list)
    updates: list[FlagUpdate] = field(default_factory=list)
    add_members: list[tuple[str, str]] = field(default_factory=list)  # (container, member)

    def is_empty(self) -> bool:
        return not (
            self.add_elements
            or self.add_relationships
            or self.add_containers
            or self.remove_ids
            or self.updates
            or self.add_members
        )

    def summary(self) -> dict:
        return {
            "added_elements": sorted(e.id for e in self.add_elements),
            "added_relationships": sorted(r.id for r in self.add_relationships),
            "added_containers": sorted(c.id for c in self.add_containers),
            "removed": sorted(self.remove_ids),
            "updates": [
                {"id": rid, "flag": flag, "value": value} for rid, flag, value in self.updates
            ],
        }


def _apply_flag(record, flag: str, value):
    if flag == "published":
        ts = parse_timestamp(value) if isinstance(value, str) else value
        return dataclasses.replace(record, published=ts)
    if isinstance(record, Relationship):
        if flag == "valid":
            return dataclasses.replace(record, valid=value)
        if flag == "inDoubt":
            return dataclasses.replace(record, in_doubt=bool(value))
        raise KeyError(f"relationship flag {flag!r}")
    return dataclasses.replace(record, flags=record.flags.set(flag, value))


def apply_delta(snapshot: Snapshot, delta: CaseDelta, *, version: int | None = None) -> Snapshot:
    """Pure application of a delta to a snapshot; the input is untouched.

    Record order is preserved and duplicate-id records (from lenient
    snapshots) survive untouched; flag updates land on the first record
    carrying the id, mirroring how inference reads such snapshots.
    """
    elements = list(snapshot.element_list)
    relationships = list(snapshot.relationship_list)
    containers = list(snapshot.container_list)
    case = snapshot.case

    removed = set(delta.remove_ids)
    if removed:
        known = {case.id} | {e.id for e in elements} | {r.id for r in relationships} | {
            c.id for c in containers
        }
        for rid in removed:
            if rid not in known:
                raise DanglingReference(rid)
        elements = [e for e in elements if e.id not in removed]
        containers = [c for c in containers if c.id not in removed]
        # Cascade: drop relationships touching removed records and clean
        # membership lists, so the remaining graph still resolves.
        relationships = [
            r
            for r in relationships
            if r.id not in removed and r.subject not in removed and r.object not in removed
        ]
        containers = [
            dataclasses.replace(c, members=tuple(m for m in c.members if m not in removed))
            for c in containers
        ]
        case = dataclasses.replace(case, members=tuple(m for m in case.members if m not in removed))

    existing = {case.id} | {e.id for e in elements} | {r.id for r in relationships} | {
        c.id for c in containers
    }
    for record in [*delta.add_elements, *delta.add_relationships, *delta.add_containers]:
        if record.id in existing:
            raise DuplicateIdentifier(record.id)
        existing.add(record.id)
    elements.extend(delta.add_elements)
    containers.extend(delta.add_containers)

    container_index = {c.id: i for i, c in enumerate(containers)}

    def add_member(container_id: str, member: str) -> None:
        nonlocal case
        if container_id == case.id:
            case = dataclasses.replace(case, members=tuple(sorted(set(case.members) | {member})))
            return
        if container_id not in container_index:
            raise DanglingReference(container_id)
        i = container_index[container_id]
        containers[i] = dataclasses.replace(
            containers[i], members=tuple(sorted(set(containers[i].members) | {member}))
        )

    for r in delta.add_relationships:
        for endpoint in (r.subject, r.object):
            if endpoint not in existing:
                raise DanglingReference(endpoint)
        relationships.append(r)
        if r.predicate is Predicate.CONTAINS and (r.subject == case.id or r.subject in container_index):
            add_member(r.subject, r.object)
    for container_id, member in delta.add_members:
        if member not in existing:
            raise DanglingReference(member)
        add_member(container_id, member)

    elem_index: dict[str, int] = {}
    for i, e in enumerate(elements):
        elem_index.setdefault(e.id, i)
    rel_index: dict[str, int] = {}
    for i, r in enumerate(relationships):
        rel_index.setdefault(r.id, i)

    for rid, flag, value in delta.updates:
        if rid in elem_index:
            i = elem_index[rid]
            elements[i] = _apply_flag(elements[i], flag, value)
        elif rid in rel_index:
            i = rel_index[rid]
            relationships[i] = _apply_flag(relationships[i], flag, value)
        elif rid in container_index:
            i = container_index[rid]
            containers[i] = _apply_flag(containers[i], flag, value)
        elif rid == case.id:
            case = _apply_flag(case, flag, value)
        else:
            raise DanglingReference(rid)

    return Snapshot(
        version=snapshot.version + 1 if version is None else version,
        case=case,
        elements=elements,
        relationships=relationships,
        containers=containers,
        strict=False,
    )


CommitHook = Callable[[Snapshot, CaseDelta], None]


class Store:
    """Single-writer, multi-reader snapshot store for one assurance case."""

    def __init__(self, initial: Snapshot):
        self._lock = threading.Lock()
        self._snapshots: dict[int, Snapshot] = {initial.version: initial}
        self._head = initial.version
        self._hooks: list[CommitHook] = []
        self._suppress_hooks = False

    @classmethod
    def from_case(cls, case: Case) -> "Store":
        return cls(Snapshot.from_case(case))

    @classmethod
    def from_document(cls, doc: caseio.CaseDocument) -> "Store":
        return cls(Snapshot.from_document(doc))

    @property
    def version(self) -> int:
        return self._head

    def snapshot(self, version: int | None = None) -> Snapshot:
        return self._snapshots[self._head if version is None else version]

    def on_commit(self, hook: CommitHook) -> None:
        self._hooks.append(hook)

    def commit(
        self,
        delta: CaseDelta,
        *,
        expected_version: int | None = None,
        notify: bool = True,
    ) -> Snapshot:
        """Apply a delta atomically; on any error the store is unchanged."""
        with self._lock:
            if expected_version is not None and expected_version != self._head:
                raise StaleVersion(expected_version, self._head)
            new = apply_delta(self._snapshots[self._head], delta)
            self._snapshots[new.version] = new
            self._head = new.version
        if notify and not self._suppress_hooks:
            self._suppress_hooks = True
            try:
                for hook in self._hooks:
                    hook(new, delta)
            finally:
                self._suppress_hooks = False
        return new

    def replace(self, snapshot_doc: caseio.CaseDocument) -> Snapshot:
        """Swap in a whole new case (import); version keeps increasing."""
        with self._lock:
            new = Snapshot.from_document(snapshot_doc, version=self._head + 1)
            self._snapshots[new.version] = new
            self._head = new.version
        return new

    # -- persistence --------------------------------------------------------

    def save(self, path: str | Path, version: int | None = None) -> None:
        save(self.snapshot(version), path)


def save(snapshot: Snapshot, path: str | Path) -> None:
    Path(path).write_text(caseio.serialize_native(snapshot.to_document()), encoding="utf-8")


def load(path: str | Path, version: int = 1) -> Snapshot:
    doc = caseio.parse_native(Path(path).read_text(encoding="utf-8"))
    return Snapshot.from_document(doc, version=version)
