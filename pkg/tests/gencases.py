"""Random and synthetic case builders shared by tests."""

from __future__ import annotations

import random

from gsnkit.model import (
    parse_timestamp,
    AwayTarget,
    Container,
    ContainerKind,
    Element,
    ElementKind,
    FlagSet,
    Indicator,
    Multiplicity,
    Predicate,
    Relationship,
)
from gsnkit.store import Snapshot

WORDS = (
    "rocket", "launch", "filter", "benchmark", "jailbreak", "monitor", "payload",
    "robustness", "attack", "resistance", "perturbation", "review", "coverage",
    "latency", "safety", "audit", "fallback", "sensor",
)

ELEMENT_KINDS = tuple(ElementKind)
CONTAINER_KINDS = (
    ContainerKind.ARGUMENT,
    ContainerKind.MODULE,
    ContainerKind.ARTEFACT,
    ContainerKind.PATTERN,
    ContainerKind.TEMPLATE,
    ContainerKind.VIEW,
    ContainerKind.CATALOGUE,
)


def random_snapshot(seed: int, max_elements: int = 25, max_edges: int = 40) -> Snapshot:
    """A small adversarial case: ill-typed edges, cycles, challenge chains,
    away references, flag seeds, patterns and the occasional duplicate id."""
    rng = random.Random(seed)
    n_elem = rng.randint(1, max_elements)
    n_edges = rng.randint(0, max_edges)

    module_ids = [f"M{i}" for i in range(rng.randint(0, 2))]
    elements: list[Element] = []
    for i in range(n_elem):
        kind = rng.choice(ELEMENT_KINDS)
        flags = FlagSet(
            valid=rng.choice([None, None, None, True, False]),
            truth=rng.choice([None, None, None, True, False]),
            in_doubt=rng.random() < 0.08,
            defeated=rng.random() < 0.05,
            public=rng.random() < 0.3,
            top_level=rng.random() < 0.05,
            undeveloped=rng.random() < 0.05,
        )
        statement = " ".join(rng.sample(WORDS, k=rng.randint(1, 3)))
        published = None
        if rng.random() < 0.25:
            published = f"202{rng.randint(3, 5)}-0{rng.randint(1, 9)}-1{rng.randint(0, 9)}T00:00:00Z"
        module = rng.choice(module_ids) if module_ids and rng.random() < 0.4 else None
        elements.append(
            Element(
                id=f"E{i}",
                kind=kind,
                statement=statement,
                flags=flags,
                published=None if published is None else parse_timestamp(published),
                module=module,
            )
        )
    # Away references, some deliberately broken.
    for e in list(elements):
        if rng.random() < 0.08 and len(elements) > 2:
            target = rng.choice(elements)
            module = rng.choice(module_ids) if module_ids and rng.random() < 0.7 else "M-ghost"
            idx = elements.index(e)
            elements[idx] = Element(
                id=e.id, kind=e.kind, statement=e.statement, flags=e.flags,
                published=e.published, away_target=AwayTarget(target.id, module),
                module=e.module, metadata=e.metadata,
            )
    # Occasional duplicate identifier (lenient snapshot path).
    if n_elem > 3 and rng.random() < 0.15:
        victim = rng.choice(elements)
        elements.append(
            Element(id=victim.id, kind=rng.choice(ELEMENT_KINDS), statement="duplicate record")
        )

    containers: list[Container] = [
        Container(id=m, kind=ContainerKind.MODULE, name=f"module {m}") for m in module_ids
    ]
    for i in range(rng.randint(0, 4)):
        kind = rng.choice(CONTAINER_KINDS)
        containers.append(
            Container(
                id=f"C{i}",
                kind=kind,
                name=" ".join(rng.sample(WORDS, k=2)),
                view_type=None if kind is not ContainerKind.VIEW else rng.choice(["argument", "architecture"]),
                flags=FlagSet(valid=rng.choice([None, True, False]), public=rng.random() < 0.5),
            )
        )

    ids = [e.id for e in elements] + [c.id for c in containers]
    relationships: list[Relationship] = []
    rel_ids: list[str] = []
    taken: set[str] = set()
    for i in range(n_edges):
        if not ids:
            break
        predicate = rng.choice(list(Predicate))
        subject = rng.choice(ids)
        # challenges may target earlier relationships
        if predicate is Predicate.CHALLENGES and rel_ids and rng.random() < 0.3:
            obj = rng.choice(rel_ids)
        else:
            obj = rng.choice(ids)
        rid = f"R{i}"
        mult = None
        if rng.random() < 0.12:
            indicator = rng.choice(list(Indicator))
            if indicator is Indicator.OPTIONAL:
                mult = Multiplicity(indicator, 0, 1)
            elif indicator is Indicator.CHOICE:
                mult = Multiplicity(indicator, 1, 1, group=f"g{rng.randint(0, 2)}")
            else:
                mult = Multiplicity(indicator, rng.randint(0, 2), rng.choice([None, 3]))
        acp = conf = None
        arg_containers = [c.id for c in containers if c.kind is ContainerKind.ARGUMENT]
        if arg_containers and rng.random() < 0.1:
            acp, conf = f"ACP-{i}", rng.choice(arg_containers)
        relationships.append(
            Relationship(
                id=rid,
                subject=subject,
                predicate=predicate,
                object=obj,
                valid=rng.choice([None, None, None, True, False]),
                multiplicity=mult,
                acp=acp,
                confidence_argument=conf,
            )
        )
        rel_ids.append(rid)
        taken.add(rid)
    # Wire some containment and instantiation structure.
    mutable = {c.id: set() for c in containers}
    for c in containers:
        for _ in range(rng.randint(0, 3)):
            if ids:
                mutable[c.id].add(rng.choice(ids))
    containers = [
        Container(
            id=c.id, kind=c.kind, name=c.name, view_type=c.view_type,
            members=tuple(sorted(mutable[c.id])), flags=c.flags,
        )
        for c in containers
    ]
    case = Container(
        id="AC", kind=ContainerKind.ASSURANCE_CASE, name="random case",
        members=tuple(sorted(c.id for c in containers)),
    )
    return Snapshot.from_records(
        case=case,
        elements=elements,
        relationships=relationships,
        containers=containers,
        strict=False,
    )


def balanced_snapshot(n_elements: int, n_edges: int, fanout: int = 4) -> Snapshot:
    """Synthetic balanced support tree with leaf evidence, shared contexts and
    a couple of defeaters; used for the scale target."""
    artefacts = [
        Container(
            id=f"A{i}", kind=ContainerKind.ARTEFACT, name=f"artefact {i}",
            flags=FlagSet(valid=True),
        )
        for i in range(10)
    ]
    elements: list[Element] = []
    relationships: list[Relationship] = []
    rel_n = 0

    def edge(pred: Predicate, subject: str, obj: str) -> None:
        nonlocal rel_n
        rel_n += 1
        relationships.append(
            Relationship(id=f"R{rel_n}", subject=subject, predicate=pred, object=obj)
        )

    n_contexts = 50
    for i in range(n_contexts):
        elements.append(
            Element(id=f"C{i}", kind=ElementKind.CONTEXT, statement=f"operating context {i}")
        )
    n_defeaters = 2
    n_goals = (n_elements - n_contexts - n_defeaters) * 2 // 3
    n_solutions = n_elements - n_contexts - n_defeaters - n_goals

    elements.append(Element(id="N0", kind=ElementKind.GOAL, statement="system is acceptably safe"))
    goals = ["N0"]
    frontier = ["N0"]
    i = 1
    while i < n_goals:
        parent = frontier.pop(0)
        for _ in range(fanout):
            if i >= n_goals:
                break
            node_id = f"N{i}"
            elements.append(Element(id=node_id, kind=ElementKind.GOAL, statement=f"subclaim {i} holds"))
            edge(Predicate.SUPPORTED_BY, parent, node_id)
            goals.append(node_id)
            frontier.append(node_id)
            i += 1
    # Leaves get solution evidence; each solution references an artefact.
    leaves = list(frontier)
    for j in range(n_solutions):
        sol = f"S{j}"
        leaf = leaves[j % len(leaves)]
        elements.append(Element(id=sol, kind=ElementKind.SOLUTION, statement=f"test report {j}"))
        edge(Predicate.SUPPORTED_BY, leaf, sol)
        edge(Predicate.REFERENCES, sol, artefacts[j % len(artefacts)].id)
    # Defeaters exercising the dialectic layer at scale.
    elements.append(
        Element(id="DEF0", kind=ElementKind.GOAL, statement="observed failure", flags=FlagSet(truth=True))
    )
    elements.append(Element(id="DEF1", kind=ElementKind.GOAL, statement="suspected regression"))
    edge(Predicate.CHALLENGES, "DEF0", goals[3])
    edge(Predicate.CHALLENGES, "DEF1", goals[4])
    # Top up with context attachments until the edge budget is met.
    g = 0
    while rel_n < n_edges:
        edge(Predicate.IN_CONTEXT_OF, goals[g % len(goals)], f"C{(g * 7) % n_contexts}")
        g += 1
    case = Container(
        id="AC-scale", kind=ContainerKind.ASSURANCE_CASE, name="synthetic scale case",
        members=tuple(sorted(a.id for a in artefacts)),
    )
    return Snapshot.from_records(
        case=case, elements=elements, relationships=relationships, containers=artefacts
    )
