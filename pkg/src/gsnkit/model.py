"""Typed vocabulary and record types for GSN assurance cases.

Elements, reified relationships and containers are immutable records; a
mutable :class:`Case` aggregate owns identifier uniqueness and triple
uniqueness while an argument is being authored. Edge typing is a fixed
table consulted by the rule engine, not enforced at construction time.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Iterable, NamedTuple

from .errors import (
    DuplicateIdentifier,
    DuplicateTriple,
    EmptyStatement,
    UnknownEndpoint,
    UnknownKind,
    UnknownPredicate,
)


class ElementKind(str, enum.Enum):
    GOAL = "Goal"
    STRATEGY = "Strategy"
    SOLUTION = "Solution"
    CONTEXT = "Context"
    ASSUMPTION = "Assumption"
    JUSTIFICATION = "Justification"
    ARTEFACT_REFERENCE = "ArtefactReference"
    INSTANTIATION_DATA_REFERENCE = "InstantiationDataReference"


# Context and Solution act as sub-kinds of ArtefactReference for artefact
# linking; InstantiationDataReference points at instantiation data the same way.
ARTEFACT_REFERENCE_KINDS = frozenset(
    {
        ElementKind.ARTEFACT_REFERENCE,
        ElementKind.CONTEXT,
        ElementKind.SOLUTION,
        ElementKind.INSTANTIATION_DATA_REFERENCE,
    }
)


class ContainerKind(str, enum.Enum):
    ASSURANCE_CASE = "AssuranceCase"
    ARGUMENT = "Argument"
    MODULE = "Module"
    VIEW = "View"
    PATTERN = "Pattern"
    CATALOGUE = "Catalogue"
    TEMPLATE = "Template"
    ARTEFACT = "Artefact"


class ViewType(str, enum.Enum):
    ARGUMENT = "argument"  # shows individual argument elements
    ARCHITECTURE = "architecture"  # shows aggregated relations between modules


class Predicate(str, enum.Enum):
    SUPPORTED_BY = "supportedBy"
    IN_CONTEXT_OF = "inContextOf"
    CHALLENGES = "challenges"
    CONTAINS = "contains"
    ATTACHED_TO = "attachedTo"
    RELATED_TO = "relatedTo"
    CONSISTENT_WITH = "consistentWith"
    CONFLICTS_WITH = "conflictsWith"
    ASSOCIATED_WITH = "associatedWith"
    INSTANTIATES = "instantiates"
    REFERENCES = "references"


class Indicator(str, enum.Enum):
    OPTIONAL = "optional"
    MULTIPLE = "multiple"
    CHOICE = "choice"


FLAG_NAMES = (
    "valid",
    "truth",
    "inDoubt",
    "defeated",
    "undeveloped",
    "public",
    "topLevel",
    "final",
    "uninstantiated",
)

_FLAG_ATTRS = {
    "valid": "valid",
    "truth": "truth",
    "inDoubt": "in_doubt",
    "defeated": "defeated",
    "undeveloped": "undeveloped",
    "public": "public",
    "topLevel": "top_level",
    "final": "final",
    "uninstantiated": "uninstantiated",
}

TRI_STATE_FLAGS = frozenset({"valid", "truth"})


@dataclass(frozen=True, slots=True)
class FlagSet:
    """Per-record flag assignment.

    ``valid`` and ``truth`` are tri-state (``None`` means unset, mirroring
    open-world absence); the rest are plain booleans. Asserting ``defeated``
    always implies ``inDoubt``: defeat is the stronger dialectic state.
    """

    valid: bool | None = None
    truth: bool | None = None
    in_doubt: bool = False
    defeated: bool = False
    undeveloped: bool = False
    public: bool = False
    top_level: bool = False
    final: bool = False
    uninstantiated: bool = False

    def __post_init__(self) -> None:
        if self.defeated and not self.in_doubt:
            object.__setattr__(self, "in_doubt", True)

    def get(self, flag: str) -> bool | None:
        return getattr(self, _FLAG_ATTRS[flag])

    def set(self, flag: str, value: bool | None) -> "FlagSet":
        """Return a copy with ``flag`` assigned; re-normalizes the
        defeated-implies-inDoubt invariant."""
        if flag not in _FLAG_ATTRS:
            raise KeyError(flag)
        if flag not in TRI_STATE_FLAGS and value is None:
            value = False
        return dataclasses.replace(self, **{_FLAG_ATTRS[flag]: value})

    def as_dict(self) -> dict[str, bool]:
        """Set flags only; absent keys mean unset/false."""
        out: dict[str, bool] = {}
        for name, attr in _FLAG_ATTRS.items():
            value = getattr(self, attr)
            if name in TRI_STATE_FLAGS:
                if value is not None:
                    out[name] = value
            elif value:
                out[name] = True
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, bool]) -> "FlagSet":
        kwargs = {}
        for name, value in raw.items():
            if name not in _FLAG_ATTRS:
                raise UnknownKind(f"flag:{name}")
            kwargs[_FLAG_ATTRS[name]] = bool(value)
        return cls(**kwargs)


class AwayTarget(NamedTuple):
    """Reference to a public element developed in another module."""

    element: str
    module: str


@dataclass(frozen=True, slots=True, eq=True)
class Element:
    """One GSN node: goal, strategy, solution, context, assumption,
    justification, artefact reference or instantiation-data reference."""

    id: str
    kind: ElementKind
    statement: str
    flags: FlagSet = field(default_factory=FlagSet)
    published: datetime | None = None
    away_target: AwayTarget | None = None
    module: str | None = None
    metadata: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True, slots=True, eq=True)
class Multiplicity:
    """Cardinality constraint on a pattern relationship.

    ``max_count=None`` means unbounded. Choice alternatives sharing a subject
    carry the same ``group`` so they are checked as one choice group.
    """

    indicator: Indicator
    min_count: int = 0
    max_count: int | None = 1
    group: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.indicator, Indicator):
            object.__setattr__(self, "indicator", Indicator(self.indicator))
        if self.min_count < 0:
            raise ValueError("multiplicity min must be non-negative")
        if self.max_count is not None and self.min_count > self.max_count:
            raise ValueError("multiplicity min exceeds max")
        if self.indicator is Indicator.OPTIONAL and (self.min_count, self.max_count) != (0, 1):
            raise ValueError("optional multiplicity is fixed at 0..1")
        if self.indicator is Indicator.CHOICE and not self.group:
            raise ValueError("choice multiplicity requires a group id")


@dataclass(frozen=True, slots=True, eq=True)
class Relationship:
    """A reified edge: addressable, flaggable, and itself a legal target of
    challenges and associatedWith edges."""

    id: str
    subject: str
    predicate: Predicate
    object: str
    valid: bool | None = None
    in_doubt: bool = False
    multiplicity: Multiplicity | None = None
    acp: str | None = None
    confidence_argument: str | None = None

    def __post_init__(self) -> None:
        if (self.acp is None) != (self.confidence_argument is None):
            raise ValueError(
                f"relationship {self.id}: acp and confidence_argument must be set together"
            )

    @property
    def with_confidence(self) -> bool:
        return self.acp is not None


@dataclass(frozen=True, slots=True, eq=True)
class Container:
    """Structural grouping: assurance case, argument, module, view, pattern,
    catalogue, template or artefact."""

    id: str
    kind: ContainerKind
    name: str = ""
    view_type: ViewType | None = None
    members: tuple[str, ...] = ()
    flags: FlagSet = field(default_factory=FlagSet)
    instantiation_data: str | None = None
    artefact_uri: str | None = None

    def __post_init__(self) -> None:
        if (self.view_type is not None) != (self.kind is ContainerKind.VIEW):
            raise ValueError(f"container {self.id}: viewType is present iff kind is View")

    @property
    def public(self) -> bool:
        return self.flags.public


# --- edge typing -------------------------------------------------------------

_ELEMENT_KINDS = tuple(k.value for k in ElementKind)
_CONTEXTUAL = ("Context", "Assumption", "Justification")
RELATIONSHIP_KIND = "Relationship"

# Allowed (subject kind, object kind) pairs per predicate. Kinds are the
# enum values plus "Relationship" for edges that point at reified edges.
EDGE_TYPING: dict[Predicate, frozenset[tuple[str, str]]] = {
    Predicate.SUPPORTED_BY: frozenset(
        {("Goal", "Goal"), ("Goal", "Strategy"), ("Goal", "Solution"), ("Strategy", "Goal")}
    ),
    Predicate.IN_CONTEXT_OF: frozenset(
        {(s, o) for s in ("Goal", "Strategy") for o in _CONTEXTUAL}
    ),
    Predicate.CHALLENGES: frozenset(
        {(s, o) for s in ("Goal", "Solution") for o in _ELEMENT_KINDS + (RELATIONSHIP_KIND,)}
    ),
    Predicate.REFERENCES: frozenset(
        {(k.value, "Artefact") for k in ARTEFACT_REFERENCE_KINDS}
    ),
    Predicate.CONTAINS: frozenset(
        {("AssuranceCase", o) for o in ("Argument", "Artefact", "Module", "View")}
        | {("Argument", o) for o in _ELEMENT_KINDS + ("Argument",)}
        | {("Module", o) for o in ("Module", "Argument")}
        | {("View", o) for o in ("Module", "Argument")}
        | {("Catalogue", "Pattern")}
    ),
    Predicate.ATTACHED_TO: frozenset(
        {("Template", "InstantiationDataReference")}
        | {(s, "Artefact") for s in ("Goal", "Strategy", "Solution", "Context", "ArtefactReference")}
    ),
    Predicate.RELATED_TO: frozenset({("Pattern", "Pattern")}),
    Predicate.CONSISTENT_WITH: frozenset({("Context", "Context"), ("Artefact", "Artefact")}),
    Predicate.CONFLICTS_WITH: frozenset({("Context", "Context"), ("Artefact", "Artefact")}),
    Predicate.ASSOCIATED_WITH: frozenset({(RELATIONSHIP_KIND, "Argument")}),
    Predicate.INSTANTIATES: frozenset(
        {("Argument", "Pattern")} | {(k, k) for k in _ELEMENT_KINDS}
    ),
}


def edge_type_allowed(predicate: Predicate | str, subject_kind: str, object_kind: str) -> bool:
    """Pure table lookup: may an edge with this predicate connect records of
    these kinds? Total over the finite (predicate x kind x kind) domain."""
    pred = Predicate(predicate)
    return (subject_kind, object_kind) in EDGE_TYPING[pred]


# --- vocabulary registry ------------------------------------------------------

CORE = "core"
PATTERN_EXT = "argument-pattern-extension"
MODULAR_EXT = "modular-extension"
CONFIDENCE_EXT = "confidence-argument-extension"
DIALECTIC_EXT = "dialectic-extension"


@dataclass(frozen=True)
class VocabularyEntry:
    name: str
    role: str  # "class" | "predicate" | "flag"
    core_or_extension: str


def _entries() -> tuple[VocabularyEntry, ...]:
    classes = {
        "GSNElement": CORE,
        "Goal": CORE,
        "Strategy": CORE,
        "Solution": CORE,
        "Context": CORE,
        "Assumption": CORE,
        "Justification": CORE,
        "ArtefactReference": CORE,
        "InstantiationDataReference": PATTERN_EXT,
        "AssuranceCase": CORE,
        "Argument": CORE,
        "Artefact": CORE,
        "Relationship": CORE,
        "RelationshipWithConfidence": CONFIDENCE_EXT,
        "Module": MODULAR_EXT,
        "View": MODULAR_EXT,
        "Pattern": PATTERN_EXT,
        "Catalogue": PATTERN_EXT,
        "Template": PATTERN_EXT,
        "Defeater": DIALECTIC_EXT,
    }
    predicates = {
        "supportedBy": CORE,
        "inContextOf": CORE,
        "references": CORE,
        "contains": CORE,
        "challenges": DIALECTIC_EXT,
        "attachedTo": PATTERN_EXT,
        "relatedTo": PATTERN_EXT,
        "instantiates": PATTERN_EXT,
        "consistentWith": MODULAR_EXT,
        "conflictsWith": MODULAR_EXT,
        "associatedWith": CONFIDENCE_EXT,
    }
    flags = {
        "valid": CORE,
        "truth": CORE,
        "inDoubt": DIALECTIC_EXT,
        "defeated": DIALECTIC_EXT,
        "undeveloped": CORE,
        "public": MODULAR_EXT,
        "topLevel": CORE,
        "final": PATTERN_EXT,
        "uninstantiated": PATTERN_EXT,
        "published": PATTERN_EXT,
    }
    out = [VocabularyEntry(n, "class", src) for n, src in classes.items()]
    out += [VocabularyEntry(n, "predicate", src) for n, src in predicates.items()]
    out += [VocabularyEntry(n, "flag", src) for n, src in flags.items()]
    return tuple(out)


VOCABULARY: tuple[VocabularyEntry, ...] = _entries()

VOCABULARY_NAMESPACE = "https://w3id.org/OntoGSN/ontology#"


def vocabulary_names(role: str) -> frozenset[str]:
    return frozenset(e.name for e in VOCABULARY if e.role == role)


# --- diagnostics --------------------------------------------------------------


class Severity(str, enum.Enum):
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True, slots=True, eq=True)
class Diagnostic:
    severity: Severity
    rule: str
    subjects: tuple[str, ...]
    message: str

    def as_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "rule": self.rule,
            "subjects": list(self.subjects),
            "message": self.message,
        }


# --- timestamps ---------------------------------------------------------------


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp; accepts a trailing 'Z'."""
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def days_before(ts: datetime, days: int) -> datetime:
    return ts - timedelta(days=days)


# --- case aggregate -----------------------------------------------------------


class Case:
    """Mutable assurance-case aggregate used while authoring.

    Owns the uniqueness invariants: record ids are pairwise distinct and no
    (subject, predicate, object) triple is asserted twice. Edge typing is not
    judged here; the rule engine flags ill-typed edges instead of rejecting
    them.
    """

    def __init__(self, case_id: str = "AC", name: str = ""):
        self.case = Container(id=case_id, kind=ContainerKind.ASSURANCE_CASE, name=name)
        self.elements: dict[str, Element] = {}
        self.relationships: dict[str, Relationship] = {}
        self.containers: dict[str, Container] = {}
        self._triples: set[tuple[str, str, str]] = set()
        self._edge_seq = 0

    # -- id space --------------------------------------------------------

    def _all_ids(self) -> set[str]:
        ids = {self.case.id}
        ids.update(self.elements)
        ids.update(self.relationships)
        ids.update(self.containers)
        return ids

    def has_id(self, record_id: str) -> bool:
        return (
            record_id == self.case.id
            or record_id in self.elements
            or record_id in self.relationships
            or record_id in self.containers
        )

    def _check_fresh(self, record_id: str) -> None:
        if not record_id:
            raise UnknownKind("<empty id>")
        if self.has_id(record_id):
            raise DuplicateIdentifier(record_id)

    # -- construction ----------------------------------------------------

    def add_element(
        self,
        kind: ElementKind | str,
        element_id: str,
        statement: str,
        flags: FlagSet | dict | None = None,
        *,
        published: datetime | str | None = None,
        away_target: AwayTarget | tuple[str, str] | None = None,
        module: str | None = None,
        metadata: dict[str, str] | None = None,
    ) -> str:
        """Add a GSN node. Flags default to all-unset; undeveloped is left to
        inference."""
        self._check_fresh(element_id)
        if not statement or not statement.strip():
            raise EmptyStatement(element_id)
        try:
            kind = ElementKind(kind)
        except ValueError:
            raise UnknownKind(str(kind)) from None
        if isinstance(flags, dict):
            flags = FlagSet.from_dict(flags)
        if isinstance(published, str):
            published = parse_timestamp(published)
        if away_target is not None and not isinstance(away_target, AwayTarget):
            away_target = AwayTarget(*away_target)
        self.elements[element_id] = Element(
            id=element_id,
            kind=kind,
            statement=statement,
            flags=flags or FlagSet(),
            published=published,
            away_target=away_target,
            module=module,
            metadata=dict(metadata or {}),
        )
        return element_id

    def add_container(
        self,
        kind: ContainerKind | str,
        container_id: str,
        name: str = "",
        *,
        members: Iterable[str] = (),
        view_type: ViewType | str | None = None,
        flags: FlagSet | dict | None = None,
        instantiation_data: str | None = None,
        artefact_uri: str | None = None,
        in_case: bool = False,
    ) -> str:
        self._check_fresh(container_id)
        try:
            kind = ContainerKind(kind)
        except ValueError:
            raise UnknownKind(str(kind)) from None
        if isinstance(view_type, str):
            view_type = ViewType(view_type)
        if isinstance(flags, dict):
            flags = FlagSet.from_dict(flags)
        self.containers[container_id] = Container(
            id=container_id,
            kind=kind,
            name=name,
            view_type=view_type,
            members=tuple(sorted(set(members))),
            flags=flags or FlagSet(),
            instantiation_data=instantiation_data,
            artefact_uri=artefact_uri,
        )
        if in_case:
            self.case = dataclasses.replace(
                self.case, members=tuple(sorted(set(self.case.members) | {container_id}))
            )
        return container_id

    def add_to_container(self, container_id: str, member_id: str) -> None:
        if container_id == self.case.id:
            holder = self.case
        else:
            holder = self.containers[container_id]
        if not self.has_id(member_id):
            raise UnknownEndpoint(member_id)
        updated = dataclasses.replace(
            holder, members=tuple(sorted(set(holder.members) | {member_id}))
        )
        if container_id == self.case.id:
            self.case = updated
        else:
            self.containers[container_id] = updated

    def add_edge(
        self,
        predicate: Predicate | str,
        subject: str,
        obj: str,
        *,
        rel_id: str | None = None,
        valid: bool | None = None,
        multiplicity: Multiplicity | None = None,
        acp: str | None = None,
        confidence_argument: str | None = None,
    ) -> str:
        """Assert a triple; every accepted triple yields exactly one
        addressable Relationship record."""
        try:
            predicate = Predicate(predicate)
        except ValueError:
            raise UnknownPredicate(str(predicate)) from None
        for endpoint in (subject, obj):
            if not self.has_id(endpoint):
                raise UnknownEndpoint(endpoint)
        key = (subject, predicate.value, obj)
        if key in self._triples:
            raise DuplicateTriple(*key)
        if rel_id is None:
            while True:
                self._edge_seq += 1
                rel_id = f"R{self._edge_seq}"
                if not self.has_id(rel_id):
                    break
        else:
            self._check_fresh(rel_id)
        self.relationships[rel_id] = Relationship(
            id=rel_id,
            subject=subject,
            predicate=predicate,
            object=obj,
            valid=valid,
            multiplicity=multiplicity,
            acp=acp,
            confidence_argument=confidence_argument,
        )
        self._triples.add(key)
        if predicate is Predicate.CONTAINS:
            # Membership and contains-edges stay in sync; members is the
            # authoritative side for closure queries.
            self.add_to_container(subject, obj)
        return rel_id

    # -- checks ------------------------------------------------------------

    def completeness_check(self) -> list[Diagnostic]:
        return check_completeness(self.case, self.containers.values(), self.elements, self.containers)


def check_completeness(
    case: Container,
    containers: Iterable[Container],
    elements: dict[str, Element],
    containers_by_id: dict[str, Container],
) -> list[Diagnostic]:
    """Minimum-membership warnings for containers under construction.

    An Argument wants at least one Goal and one artefact-referencing
    element; an AssuranceCase wants at least one Argument and one Artefact.
    Violations are warnings, never errors.
    """
    out: list[Diagnostic] = []
    for container in [case, *containers]:
        lacks: list[str] = []
        member_elems = [elements[m] for m in container.members if m in elements]
        member_conts = [containers_by_id[m] for m in container.members if m in containers_by_id]
        if container.kind is ContainerKind.ARGUMENT:
            if not any(e.kind is ElementKind.GOAL for e in member_elems):
                lacks.append("lacks a Goal")
            if not any(e.kind in ARTEFACT_REFERENCE_KINDS for e in member_elems):
                lacks.append("lacks an ArtefactReference")
        elif container.kind is ContainerKind.ASSURANCE_CASE:
            if not any(c.kind is ContainerKind.ARGUMENT for c in member_conts):
                lacks.append("lacks an Argument")
            if not any(c.kind is ContainerKind.ARTEFACT for c in member_conts):
                lacks.append("lacks an Artefact")
        if lacks:
            out.append(
                Diagnostic(
                    severity=Severity.WARNING,
                    rule="completeness",
                    subjects=(container.id,),
                    message=f"{container.id} " + "; ".join(lacks),
                )
            )
    return out
