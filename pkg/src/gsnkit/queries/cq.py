"""Registry of the read competency questions.

Five queries live as ``*.sel`` files next to this module (one named query
per file, with ``{param}`` placeholders substituted before parsing); the
other five need flag filters or set algebra the DSL does not express and
are registered as code. The procedural questions (DE-02/03/04, AU-01/04)
are operations in :mod:`gsnkit.hooks`, not read queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from typing import Callable

from ..errors import MissingParameter, UnknownQuery
from ..model import ContainerKind, ElementKind, Predicate, days_before, format_timestamp
from ..store import Snapshot
from .selector import (
    And,
    ByKind,
    FlagIs,
    LeafOf,
    Selector,
    StatementContains,
    eval_selector,
    parse_selector,
)

Row = dict[str, str]


def _row(snapshot: Snapshot, record_id: str) -> Row:
    e = snapshot.elements.get(record_id)
    if e is not None:
        return {"id": record_id, "statement": e.statement}
    c = snapshot.containers.get(record_id)
    if c is not None:
        return {"id": record_id, "statement": c.name}
    return {"id": record_id, "statement": ""}


def _rows(snapshot: Snapshot, ids) -> list[Row]:
    return [_row(snapshot, rid) for rid in sorted(set(ids))]


@dataclass(frozen=True)
class ParamSpec:
    name: str
    default: str | Callable[[], str] | None  # None means required

    def resolve(self, query_id: str, provided: dict[str, str]) -> str:
        if self.name in provided:
            return provided[self.name]
        if self.default is None:
            raise MissingParameter(query_id, self.name)
        return self.default() if callable(self.default) else self.default


@dataclass(frozen=True)
class NamedQuery:
    id: str
    description: str
    params: tuple[ParamSpec, ...]
    selector_source: str | None  # .sel template, when DSL-expressible
    evaluate: Callable[[Snapshot, dict[str, str]], list[Row]]


def _default_cutoff() -> str:
    return format_timestamp(days_before(datetime.now(timezone.utc), 180))


def _sel_template(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.sel").read_text(encoding="utf-8").strip()


def _escape_literal(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def _from_file(query_id: str, string_params: tuple[str, ...]) -> Callable:
    template = _sel_template(query_id)

    def evaluate(snapshot: Snapshot, params: dict[str, str]) -> list[Row]:
        text = template
        for name, value in params.items():
            if name in string_params:
                value = _escape_literal(value)
            text = text.replace("{" + name + "}", value)
        return _rows(snapshot, eval_selector(snapshot, parse_selector(text)))

    return evaluate


# -- code-registered queries ---------------------------------------------------


def _ae02(snapshot: Snapshot, params: dict[str, str]) -> list[Row]:
    sel: Selector = And((ByKind("Solution"), FlagIs("inDoubt", True)))
    return _rows(snapshot, eval_selector(snapshot, sel))


def _ae03(snapshot: Snapshot, params: dict[str, str]) -> list[Row]:
    needle = params["match"].lower()
    arguments = [
        c
        for c in snapshot.containers.values()
        if c.kind is ContainerKind.ARGUMENT and needle in c.name.lower()
    ]
    leaf_goals: set[str] = set()
    for arg in arguments:
        for rid in eval_selector(snapshot, And((ByKind("Goal"), LeafOf(arg.id)))):
            leaf_goals.add(rid)
    with_solution = set()
    for rid in snapshot.rel_by_predicate.get(Predicate.SUPPORTED_BY.value, []):
        r = snapshot.relationships[rid]
        obj = snapshot.elements.get(r.object)
        if obj is not None and obj.kind is ElementKind.SOLUTION:
            with_solution.add(r.subject)
    return _rows(snapshot, leaf_goals - with_solution)


def _au02(snapshot: Snapshot, params: dict[str, str]) -> list[Row]:
    needle = params["goal"].lower()
    roots = [
        eid
        for eid, e in snapshot.elements.items()
        if e.kind is ElementKind.GOAL and needle in e.statement.lower()
    ]
    descendants: set[str] = set()
    frontier = list(roots)
    while frontier:
        node = frontier.pop()
        for rid in snapshot.rel_by_subject.get(node, []):
            r = snapshot.relationships[rid]
            if r.predicate is Predicate.SUPPORTED_BY and r.object not in descendants:
                descendants.add(r.object)
                frontier.append(r.object)
    keep: set[str] = set()
    for rid in descendants:
        e = snapshot.elements.get(rid)
        if e is not None and e.kind in (ElementKind.GOAL, ElementKind.SOLUTION):
            keep.add(rid)
    for rid in descendants:
        for rel_id in snapshot.rel_by_subject.get(rid, []):
            r = snapshot.relationships[rel_id]
            if r.predicate is Predicate.REFERENCES:
                c = snapshot.containers.get(r.object)
                if c is not None and c.kind is ContainerKind.ARTEFACT:
                    keep.add(r.object)
    return _rows(snapshot, keep)


def _au03(snapshot: Snapshot, params: dict[str, str]) -> list[Row]:
    matched = eval_selector(snapshot, StatementContains(params["literal"]))
    challenged = {
        snapshot.relationships[rid].object
        for rid in snapshot.rel_by_predicate.get(Predicate.CHALLENGES.value, [])
    }
    return _rows(snapshot, [rid for rid in matched if rid in snapshot.elements and rid not in challenged])


def _au05(snapshot: Snapshot, params: dict[str, str]) -> list[Row]:
    needle = params["literal"].lower()
    solutions: set[str] = set()
    for r in snapshot.relationship_list:
        if r.confidence_argument is None:
            continue
        goal_hit = False
        for member in snapshot.members_closure(r.confidence_argument):
            e = snapshot.elements.get(member)
            if e is not None and e.kind is ElementKind.GOAL and needle in e.statement.lower():
                goal_hit = True
                break
        if not goal_hit:
            continue
        for endpoint in (r.subject, r.object):
            e = snapshot.elements.get(endpoint)
            if e is not None and e.kind is ElementKind.SOLUTION:
                solutions.add(endpoint)
    return _rows(snapshot, solutions)


REGISTRY: dict[str, NamedQuery] = {}


def _register(query: NamedQuery) -> None:
    if query.id in REGISTRY:
        raise ValueError(f"query {query.id} registered twice")
    REGISTRY[query.id] = query


def _build_registry() -> None:
    _register(
        NamedQuery(
            id="AE-01",
            description="goals or strategies challenged by a defeater matching a literal",
            params=(ParamSpec("literal", "Jailbreak"),),
            selector_source=_sel_template("AE-01"),
            evaluate=_from_file("AE-01", ("literal",)),
        )
    )
    _register(
        NamedQuery(
            id="AE-02",
            description="solutions flagged inDoubt",
            params=(),
            selector_source=None,
            evaluate=_ae02,
        )
    )
    _register(
        NamedQuery(
            id="AE-03",
            description="leaf goals of the matched argument lacking direct solution support",
            params=(ParamSpec("match", "Robustness"),),
            selector_source=None,
            evaluate=_ae03,
        )
    )
    _register(
        NamedQuery(
            id="AE-04",
            description="solutions that reference no artefact",
            params=(),
            selector_source=_sel_template("AE-04"),
            evaluate=_from_file("AE-04", ()),
        )
    )
    _register(
        NamedQuery(
            id="AE-05",
            description="solutions published before the cutoff (default: 180 days ago)",
            params=(ParamSpec("cutoff", _default_cutoff),),
            selector_source=_sel_template("AE-05"),
            evaluate=_from_file("AE-05", ()),
        )
    )
    _register(
        NamedQuery(
            id="DE-01",
            description="goals matching a literal with no evidence in their support closure",
            params=(ParamSpec("literal", "Benchmark"),),
            selector_source=_sel_template("DE-01"),
            evaluate=_from_file("DE-01", ("literal",)),
        )
    )
    _register(
        NamedQuery(
            id="DE-05",
            description="goals in context of a context matching a literal",
            params=(ParamSpec("literal", "GPT"),),
            selector_source=_sel_template("DE-05"),
            evaluate=_from_file("DE-05", ("literal",)),
        )
    )
    _register(
        NamedQuery(
            id="AU-02",
            description="support closure (goals, solutions, artefacts) under a named goal",
            params=(ParamSpec("goal", "Attack Resistance"),),
            selector_source=None,
            evaluate=_au02,
        )
    )
    _register(
        NamedQuery(
            id="AU-03",
            description="elements matching a literal with no incoming challenges",
            params=(ParamSpec("literal", "Jailbreak"),),
            selector_source=None,
            evaluate=_au03,
        )
    )
    _register(
        NamedQuery(
            id="AU-05",
            description="solutions attached via a confidence relationship whose argument matches a literal",
            params=(ParamSpec("literal", "Perplexity"),),
            selector_source=None,
            evaluate=_au05,
        )
    )


_build_registry()


def run_cq(snapshot: Snapshot, query_id: str, params: dict[str, str] | None = None) -> list[Row]:
    """Evaluate one registered competency question; rows are (id, statement)
    pairs sorted by id."""
    if query_id not in REGISTRY:
        raise UnknownQuery(query_id)
    query = REGISTRY[query_id]
    provided = dict(params or {})
    resolved = {spec.name: spec.resolve(query_id, provided) for spec in query.params}
    for name in provided:
        if name not in {spec.name for spec in query.params}:
            raise MissingParameter(query_id, f"unexpected parameter {name!r}")
    return query.evaluate(snapshot, resolved)


def list_queries() -> list[dict]:
    out = []
    for qid in sorted(REGISTRY):
        q = REGISTRY[qid]
        out.append(
            {
                "id": q.id,
                "description": q.description,
                "params": [
                    {
                        "name": p.name,
                        "default": None if callable(p.default) else p.default,
                        "required": p.default is None,
                    }
                    for p in q.params
                ],
                "selector": q.selector_source,
            }
        )
    return out
