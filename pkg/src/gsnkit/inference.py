"""Stratified forward-chaining evaluation of the rule catalogue.

The final flag assignment is a deterministic function of the snapshot:
every rule premise reads either asserted structure (which never changes
during a run) or a derived layer that is itself order-independent, so a run
converges to the same assignment no matter how rule applications are
interleaved. Challenges are settled in dependency order; challenge cycles
degrade to inDoubt for every participant.

Rules:

* R1  reification re-check: duplicate (s, p, o) triples flagged, later edge invalid
* R2  goals with no incoming supportedBy are top-level
* R3  edges violating the typing table are invalid
* R4  supportedBy edges on a directed cycle are invalid
* R5  invalid contexts/assumptions invalidate attached elements and their
      supportedBy descendants
* R6  conflicting contexts/artefacts attached inside one support closure
      invalidate the attaching edges
* R7  solutions with valid referenced artefacts are true; goals/strategies
      with at least one supportedBy child and all children true are true
* R8  goals/strategies with no live supportedBy out-edge are undeveloped
* R9  challenges defeat their target when the defeater is true, otherwise
      cast doubt
* R10 defeat/doubt revokes truth and casts doubt up the supportedBy
      ancestry; challenged relationships are discounted as support
* R11 duplicate identifiers and unresolved/non-public away references
* R12 pattern instances with unmet multiplicity bounds are uninstantiated;
      fully realized instances with no undeveloped member are final
* R13 a confidence argument whose top goal is defeated or false casts doubt
      on its base relationship
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DiagnosticsAsErrors, NonTermination, NotDerived
from .model import (
    ContainerKind,
    Diagnostic,
    ElementKind,
    Predicate,
    Relationship,
    Severity,
    edge_type_allowed,
)
from .store import CaseDelta, Snapshot

ALL_RULES = frozenset({f"R{i}" for i in range(1, 14)})

RULE_GROUPS = {
    "R1": "structural", "R2": "structural", "R3": "structural", "R4": "structural",
    "R5": "structural", "R6": "structural", "R7": "structural", "R8": "structural",
    "R11": "information", "R12": "information",
    "R9": "dialectic", "R10": "dialectic", "R13": "dialectic",
}

RULE_DESCRIPTIONS = {
    "R1": "every asserted triple is reified exactly once",
    "R2": "goals with no incoming support are top-level",
    "R3": "edges must respect the kind-typing table",
    "R4": "support edges on a directed cycle are invalid",
    "R5": "invalid contexts invalidate attached elements and descendants",
    "R6": "conflicting contexts in one support closure detach",
    "R7": "truth propagates from valid evidence through full support",
    "R8": "goals and strategies without live support are undeveloped",
    "R9": "true defeaters defeat, unsettled defeaters cast doubt",
    "R10": "defeat and doubt revoke truth up the support ancestry",
    "R11": "identifier uniqueness and away-reference hygiene",
    "R12": "pattern instances are checked against multiplicity bounds",
    "R13": "broken confidence arguments cast doubt on their relationship",
}


@dataclass(frozen=True)
class RuleId:
    id: str
    group: str
    description: str


RULES: tuple[RuleId, ...] = tuple(
    RuleId(rid, RULE_GROUPS[rid], RULE_DESCRIPTIONS[rid])
    for rid in sorted(ALL_RULES, key=lambda r: int(r[1:]))
)


@dataclass(frozen=True)
class InferenceConfig:
    enabled_rules: frozenset[str] = ALL_RULES
    iteration_cap: int | None = None  # default 10 x record count
    strict: bool = False  # diagnostics raise

    def on(self, rule: str) -> bool:
        return rule in self.enabled_rules


@dataclass(frozen=True)
class FlagDelta:
    record_id: str
    flag: str
    old: object
    new: object
    rule: str


Premise = tuple[str, str | None]  # (record id, flag name or None for structure)


@dataclass
class InferenceResult:
    snapshot_version: int
    deltas: list[FlagDelta]
    invalidated_relationships: list[str]
    diagnostics: list[Diagnostic]
    overlays: dict[str, frozenset[str]]
    converged: bool
    iterations: int
    traces: dict[tuple[str, str], tuple[str, tuple[Premise, ...]]] = field(default_factory=dict)
    assignment: dict[str, dict[str, object]] = field(default_factory=dict)

    def as_delta(self) -> CaseDelta:
        return CaseDelta(updates=[(d.record_id, d.flag, d.new) for d in self.deltas])

    def as_dict(self) -> dict:
        return {
            "snapshot_version": self.snapshot_version,
            "converged": self.converged,
            "iterations": self.iterations,
            "deltas": [
                {"id": d.record_id, "flag": d.flag, "old": d.old, "new": d.new, "rule": d.rule}
                for d in self.deltas
            ],
            "invalidated_relationships": self.invalidated_relationships,
            "diagnostics": [d.as_dict() for d in self.diagnostics],
            "overlays": {name: sorted(ids) for name, ids in self.overlays.items()},
        }


@dataclass(frozen=True)
class ExplainStep:
    rule: str
    record_id: str
    flag: str
    value: object
    premises: tuple[Premise, ...]

    def as_dict(self) -> dict:
        return {
            "rule": self.rule,
            "id": self.record_id,
            "flag": self.flag,
            "value": self.value,
            "premises": [{"id": p[0], "flag": p[1]} for p in self.premises],
        }


def explain(result: InferenceResult, record_id: str, flag: str) -> list[ExplainStep]:
    """Derivation trace for one derived flag: premises-first rule steps from
    asserted facts to the flag. User-asserted flags raise NotDerived."""
    if (record_id, flag) not in result.traces:
        raise NotDerived(record_id, flag)
    steps: list[ExplainStep] = []
    seen: set[tuple[str, str]] = set()
    values = {(d.record_id, d.flag): d.new for d in result.deltas}

    def visit(key: tuple[str, str]) -> None:
        if key in seen or key not in result.traces:
            return
        seen.add(key)
        rule, premises = result.traces[key]
        for prem in premises:
            if prem[1] is not None:
                visit((prem[0], prem[1]))
        steps.append(
            ExplainStep(rule=rule, record_id=key[0], flag=key[1], value=values.get(key), premises=premises)
        )

    visit((record_id, flag))
    return steps


def tarjan_sccs(adj: dict[str, set[str]], nodes: list[str]) -> list[list[str]]:
    """Iterative Tarjan; components come out in reverse topological order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[list[str]] = []
    counter = [0]

    def strongconnect(root: str) -> None:
        work = [(root, iter(sorted(adj.get(root, ()))))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(sorted(adj.get(succ, ())))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])

    for node in sorted(nodes):
        if node not in index:
            strongconnect(node)
    return comps


# --- the engine ----------------------------------------------------------------


class _Run:
    """One evaluation over one snapshot. Builds indexed adjacency once, then
    computes each derived layer with worklist algorithms."""

    def __init__(self, snapshot: Snapshot, config: InferenceConfig):
        self.snap = snapshot
        self.cfg = config
        self.record_count = (
            len(snapshot.element_list)
            + len(snapshot.relationship_list)
            + len(snapshot.container_list)
            + 1
        )
        self.cap = (
            config.iteration_cap
            if config.iteration_cap is not None
            else max(10 * self.record_count, 10)
        )
        self.iterations = 0
        self.diagnostics: list[Diagnostic] = []
        self.traces: dict[tuple[str, str], tuple[str, tuple[Premise, ...]]] = {}
        self.rel_invalid: dict[str, str] = {}  # rel id -> rule that invalidated it
        self.elements = snapshot.elements
        self.relationships = snapshot.relationships
        self.containers = snapshot.containers
        self.dup_ids = self._duplicate_ids()

    def _tick(self, n: int = 1) -> None:
        self.iterations += n
        if self.iterations > self.cap:
            raise NonTermination(self.iterations, self.cap)

    def _diag(self, rule: str, subjects: tuple[str, ...], message: str) -> None:
        self.diagnostics.append(Diagnostic(Severity.WARNING, rule, subjects, message))

    # -- structural layer ------------------------------------------------

    def _duplicate_ids(self) -> set[str]:
        seen: set[str] = set()
        dups: set[str] = set()
        for rid in (
            [self.snap.case.id]
            + [e.id for e in self.snap.element_list]
            + [r.id for r in self.snap.relationship_list]
            + [c.id for c in self.snap.container_list]
        ):
            if rid in seen:
                dups.add(rid)
            seen.add(rid)
        return dups

    def _structural_invalidity(self) -> None:
        cfg = self.cfg
        if cfg.on("R1"):
            first: dict[tuple[str, str, str], str] = {}
            for r in sorted(self.snap.relationship_list, key=lambda r: r.id):
                key = (r.subject, r.predicate.value, r.object)
                if key in first:
                    self.rel_invalid.setdefault(r.id, "R1")
                    self._diag("R1", (r.id, first[key]), f"triple of {r.id} duplicates {first[key]}")
                else:
                    first[key] = r.id
        if cfg.on("R3"):
            for r in self.snap.relationship_list:
                sk = self.snap.record_kind(r.subject)
                ok = self.snap.record_kind(r.object)
                if sk is None or ok is None:
                    self.rel_invalid.setdefault(r.id, "R3")
                    self._diag("R3", (r.id,), f"{r.id} has an unresolved endpoint")
                elif not edge_type_allowed(r.predicate, sk, ok):
                    self.rel_invalid.setdefault(r.id, "R3")
                    self._diag(
                        "R3",
                        (r.id, r.subject, r.object),
                        f"{r.predicate.value} not allowed from {sk} to {ok}",
                    )
        if cfg.on("R4"):
            for rel in self._cycle_edges():
                self.rel_invalid.setdefault(rel.id, "R4")
                self._diag(
                    "R4", (rel.id, rel.subject, rel.object), f"{rel.id} lies on a supportedBy cycle"
                )
        if cfg.on("R11"):
            for rid in sorted(self.dup_ids):
                self._diag("R11", (rid,), f"identifier {rid} is not unique")
            for r in self.snap.relationship_list:
                if r.subject in self.dup_ids or r.object in self.dup_ids:
                    self.rel_invalid.setdefault(r.id, "R11")

    def _cycle_edges(self) -> list[Relationship]:
        """supportedBy edges whose endpoints share an SCC of the graph of
        asserted-valid supportedBy edges."""
        edges = [
            r
            for r in self.snap.relationship_list
            if r.predicate is Predicate.SUPPORTED_BY and r.valid is not False
        ]
        adj: dict[str, set[str]] = {}
        nodes: set[str] = set()
        for r in edges:
            adj.setdefault(r.subject, set()).add(r.object)
            nodes.add(r.subject)
            nodes.add(r.object)
        comps = tarjan_sccs(adj, sorted(nodes))
        comp_of: dict[str, int] = {}
        big: set[int] = set()
        for i, comp in enumerate(comps):
            for node in comp:
                comp_of[node] = i
            if len(comp) > 1:
                big.add(i)
        self._tick()
        out = []
        for r in edges:
            if r.subject == r.object:
                out.append(r)
            elif comp_of.get(r.subject) in big and comp_of.get(r.subject) == comp_of.get(r.object):
                out.append(r)
        return out

    # -- adjacency over live edges ------------------------------------------

    def _is_dead(self, r: Relationship) -> bool:
        return r.valid is False or r.id in self.rel_invalid

    def _build_live_adjacency(self) -> None:
        self.sup_out: dict[str, list[Relationship]] = {}
        self.sup_in: dict[str, list[Relationship]] = {}
        self.ctx_out: dict[str, list[Relationship]] = {}
        self.ref_out: dict[str, list[Relationship]] = {}
        self.challenge_edges: list[Relationship] = []
        self.instantiates: dict[str, set[str]] = {}
        for r in self.snap.relationship_list:
            if self._is_dead(r):
                continue
            if r.predicate is Predicate.SUPPORTED_BY:
                self.sup_out.setdefault(r.subject, []).append(r)
                self.sup_in.setdefault(r.object, []).append(r)
            elif r.predicate is Predicate.IN_CONTEXT_OF:
                self.ctx_out.setdefault(r.subject, []).append(r)
            elif r.predicate is Predicate.REFERENCES:
                self.ref_out.setdefault(r.subject, []).append(r)
            elif r.predicate is Predicate.CHALLENGES:
                self.challenge_edges.append(r)
            elif r.predicate is Predicate.INSTANTIATES:
                self.instantiates.setdefault(r.subject, set()).add(r.object)
        self.challenge_edges.sort(key=lambda r: r.id)

    def _ancestors(self, start: str) -> set[str]:
        """Elements reaching ``start`` through live supportedBy edges,
        excluding start itself."""
        seen: set[str] = set()
        stack = [r.subject for r in self.sup_in.get(start, [])]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            stack.extend(r.subject for r in self.sup_in.get(node, []))
        return seen

    def _descendants_or_self(self, start: str) -> set[str]:
        seen = {start}
        stack = [r.object for r in self.sup_out.get(start, [])]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            stack.extend(r.object for r in self.sup_out.get(node, []))
        return seen

    # -- R6 conflicts ---------------------------------------------------------

    def _conflicts(self) -> None:
        if not self.cfg.on("R6"):
            return
        conflict_edges = [
            r
            for r in self.snap.relationship_list
            if r.predicate is Predicate.CONFLICTS_WITH and not self._is_dead(r)
        ]
        if not conflict_edges:
            return
        attaching: dict[str, list[Relationship]] = {}
        for r in self.snap.relationship_list:
            if self._is_dead(r):
                continue
            if r.predicate in (Predicate.IN_CONTEXT_OF, Predicate.REFERENCES, Predicate.ATTACHED_TO):
                attaching.setdefault(r.object, []).append(r)
        anc_cache: dict[str, set[str]] = {}

        def anc_or_self(x: str) -> set[str]:
            if x not in anc_cache:
                anc_cache[x] = self._ancestors(x) | {x}
            return anc_cache[x]

        for conflict in sorted(conflict_edges, key=lambda r: r.id):
            for e1 in sorted(attaching.get(conflict.subject, []), key=lambda r: r.id):
                for e2 in sorted(attaching.get(conflict.object, []), key=lambda r: r.id):
                    if e1.id == e2.id:
                        continue
                    if anc_or_self(e1.subject) & anc_or_self(e2.subject):
                        for edge in (e1, e2):
                            if edge.id not in self.rel_invalid:
                                self.rel_invalid[edge.id] = "R6"
                                self._diag(
                                    "R6",
                                    (edge.id, conflict.id),
                                    f"{edge.id} attaches a conflicting record within one support closure",
                                )
        self._tick()

    # -- R11 away references ----------------------------------------------------

    def _away_check(self) -> set[str]:
        bad: set[str] = set()
        if not self.cfg.on("R11"):
            return bad
        for eid, e in self.elements.items():
            if e.away_target is None:
                continue
            target = self.elements.get(e.away_target.element)
            reason = None
            if target is None:
                reason = f"away target {e.away_target.element} does not resolve"
            elif target.module != e.away_target.module:
                reason = f"away target {target.id} is not in module {e.away_target.module}"
            elif e.module is not None and target.module == e.module:
                reason = f"away target {target.id} lives in the same module"
            elif not target.flags.public:
                reason = f"away target {target.id} is not public"
            if reason is not None:
                bad.add(eid)
                self._diag("R11", (eid,), reason)
        return bad

    # -- R5 element invalidity ----------------------------------------------------

    def _element_invalidity(self, away_invalid: set[str]) -> None:
        """Closure of valid=false over context attachment and support descent."""
        self.elem_invalid: dict[str, tuple[str, tuple[Premise, ...]] | None] = {}
        worklist: list[str] = []
        for eid, e in self.elements.items():
            if e.flags.valid is False:
                self.elem_invalid[eid] = None  # asserted, no trace
                worklist.append(eid)
        for eid in sorted(away_invalid):
            if eid not in self.elem_invalid:
                self.elem_invalid[eid] = ("R11", ((eid, None),))
                worklist.append(eid)
        if not self.cfg.on("R5"):
            return
        ctx_in: dict[str, list[Relationship]] = {}
        for rels in self.ctx_out.values():
            for r in rels:
                obj = self.elements.get(r.object)
                if obj is not None and obj.kind in (ElementKind.ASSUMPTION, ElementKind.CONTEXT):
                    ctx_in.setdefault(r.object, []).append(r)
        while worklist:
            self._tick()
            source = worklist.pop()
            for r in sorted(ctx_in.get(source, []), key=lambda r: r.id):
                if r.subject in self.elements and r.subject not in self.elem_invalid:
                    self.elem_invalid[r.subject] = ("R5", ((source, "valid"), (r.id, None)))
                    worklist.append(r.subject)
            for r in sorted(self.sup_out.get(source, []), key=lambda r: r.id):
                if r.object in self.elements and r.object not in self.elem_invalid:
                    self.elem_invalid[r.object] = ("R5", ((source, "valid"), (r.id, None)))
                    worklist.append(r.object)

    # -- truth ---------------------------------------------------------------------

    def _derivable(self, pinned: set[str], dead_rels: set[str]) -> set[str]:
        """Monotone truth fixpoint under the given pins and discounted edges.

        Children are the element objects of live, non-discounted supportedBy
        out-edges; a goal or strategy needs at least one child and all of
        them true. Solutions are true off a valid referenced artefact; a
        stored truth=true acts as an axiom. Invalid and pinned elements never
        derive truth.
        """
        self._tick()
        if not self.cfg.on("R7"):
            # Without the truth rule only asserted truth survives the pins.
            return {
                eid
                for eid, e in self.elements.items()
                if e.flags.truth is True and eid not in pinned
            }
        true_set: set[str] = set()
        parents_of: dict[str, list[str]] = {}
        pending: dict[str, int] = {}

        def gate(eid: str) -> bool:
            return eid not in pinned and eid not in self.elem_invalid

        seeds: list[str] = []
        for eid, e in self.elements.items():
            if not gate(eid):
                continue
            if e.flags.truth is True:
                seeds.append(eid)
                continue
            if e.kind is ElementKind.SOLUTION:
                for r in self.ref_out.get(eid, []):
                    if r.id in dead_rels:
                        continue
                    artefact = self.containers.get(r.object)
                    if (
                        artefact is not None
                        and artefact.kind is ContainerKind.ARTEFACT
                        and artefact.flags.valid is True
                    ):
                        seeds.append(eid)
                        break

        for eid, e in self.elements.items():
            if e.kind not in (ElementKind.GOAL, ElementKind.STRATEGY) or not gate(eid):
                continue
            if e.flags.truth is True:
                continue  # already an axiom
            kids = {
                r.object
                for r in self.sup_out.get(eid, [])
                if r.id not in dead_rels and r.object in self.elements
            }
            if not kids:
                continue
            pending[eid] = len(kids)
            for kid in kids:
                parents_of.setdefault(kid, []).append(eid)

        queue = list(seeds)
        true_set.update(seeds)
        while queue:
            node = queue.pop()
            for parent in parents_of.get(node, []):
                if parent in true_set:
                    continue
                pending[parent] -= 1
                if pending[parent] == 0:
                    true_set.add(parent)
                    queue.append(parent)
        return true_set

    # -- dialectics -------------------------------------------------------------------

    def _dialectics(
        self, stored_false: set[str], stored_defeated: set[str], stored_doubt: set[str]
    ) -> tuple[dict[str, Relationship], dict[str, Relationship], dict[str, str], set[str], set[str]]:
        """Settle challenges in dependency order.

        Returns (defeated_by, doubt_by, doubt_rels, challenge_dead,
        cycle_members). At every strength evaluation the defeater's truth is
        recomputed under the pins accumulated so far, so later challenges see
        the consequences of earlier ones. Challenge edges on a dependency
        cycle only ever cast doubt.
        """
        defeated_by: dict[str, Relationship] = {}
        doubt_by: dict[str, Relationship] = {}
        doubt_rels: dict[str, str] = {}
        challenge_dead: set[str] = set()
        cycle_members: set[str] = set()
        if not self.cfg.on("R9") or not self.challenge_edges:
            return defeated_by, doubt_by, doubt_rels, challenge_dead, cycle_members
        edges = self.challenge_edges
        by_id = {r.id: r for r in edges}

        def effect_node(r: Relationship) -> str | None:
            if r.object in self.elements:
                return r.object
            if r.object in self.relationships:
                return self.relationships[r.object].subject
            return None

        premise_cache: dict[str, set[str]] = {}

        def premises(defeater: str) -> set[str]:
            if defeater not in premise_cache:
                premise_cache[defeater] = self._descendants_or_self(defeater)
            return premise_cache[defeater]

        # Dependency graph over challenge edges: c1 -> c2 when c1's effect can
        # shift the truth of c2's defeater.
        dep: dict[str, set[str]] = {r.id: set() for r in edges}
        for c1 in edges:
            eff = effect_node(c1)
            if eff is None:
                continue
            for c2 in edges:
                if eff in premises(c2.subject):
                    dep[c1.id].add(c2.id)

        comps = tarjan_sccs(dep, [r.id for r in edges])
        cyclic: set[str] = set()
        for comp in comps:
            if len(comp) > 1 or comp[0] in dep.get(comp[0], ()):
                cyclic.update(comp)

        for cid in sorted(cyclic):
            r = by_id[cid]
            if r.subject in self.elements:
                cycle_members.add(r.subject)
            if r.object in self.elements:
                cycle_members.add(r.object)
            elif r.object in self.relationships and self.cfg.on("R10"):
                doubt_rels.setdefault(r.object, cid)

        def current_pins() -> set[str]:
            sources = (
                stored_defeated | stored_doubt | set(defeated_by) | set(doubt_by) | cycle_members
            )
            pins = stored_false | stored_defeated | set(defeated_by)
            for source in sources:
                pins |= self._ancestors(source)
            return pins

        # Tarjan emits components children-first; reverse for dependency order.
        order: list[str] = []
        for comp in reversed(comps):
            order.extend(comp)

        for cid in order:
            if cid in cyclic:
                continue
            r = by_id[cid]
            strong = r.subject in self._derivable(current_pins(), challenge_dead)
            if r.object in self.elements:
                if strong:
                    defeated_by.setdefault(r.object, r)
                else:
                    doubt_by.setdefault(r.object, r)
            elif r.object in self.relationships and self.cfg.on("R10"):
                doubt_rels.setdefault(r.object, cid)
                if strong:
                    challenge_dead.add(r.object)
        return defeated_by, doubt_by, doubt_rels, challenge_dead, cycle_members

    # -- R12 patterns -------------------------------------------------------------------

    def _patterns(self, undeveloped: set[str]) -> dict[str, tuple[bool, bool, tuple[str, ...]]]:
        """Instance arguments checked against their pattern's multiplicity
        bounds. Returns {instance id: (uninstantiated, final, violated ids)}."""
        out: dict[str, tuple[bool, bool, tuple[str, ...]]] = {}
        if not self.cfg.on("R12"):
            return out
        for container in sorted(self.containers.values(), key=lambda c: c.id):
            if container.kind is not ContainerKind.ARGUMENT:
                continue
            patterns = [
                p
                for p in sorted(self.instantiates.get(container.id, ()))
                if p in self.containers and self.containers[p].kind is ContainerKind.PATTERN
            ]
            if not patterns:
                continue
            instance_members = self.snap.members_closure(container.id)
            violated: list[str] = []
            for pattern_id in patterns:
                pattern_members = self.snap.members_closure(pattern_id)
                pattern_edges = sorted(
                    (
                        r
                        for r in self.snap.relationship_list
                        if r.multiplicity is not None and r.subject in pattern_members
                    ),
                    key=lambda r: r.id,
                )
                groups: dict[tuple[str, str], list[Relationship]] = {}
                singles: list[Relationship] = []
                for p_edge in pattern_edges:
                    if p_edge.multiplicity.group is not None:
                        groups.setdefault((p_edge.subject, p_edge.multiplicity.group), []).append(p_edge)
                    else:
                        singles.append(p_edge)

                def realized(p_edge: Relationship) -> int:
                    count = 0
                    for r in self.snap.relationship_list:
                        if self._is_dead(r) or r.predicate is not p_edge.predicate:
                            continue
                        if r.subject not in instance_members:
                            continue
                        if p_edge.subject not in self.instantiates.get(r.subject, ()):
                            continue
                        if p_edge.object not in self.instantiates.get(r.object, ()):
                            continue
                        count += 1
                    return count

                for p_edge in singles:
                    n = realized(p_edge)
                    m = p_edge.multiplicity
                    if n < m.min_count or (m.max_count is not None and n > m.max_count):
                        violated.append(p_edge.id)
                for (_subject, _group), alternatives in sorted(groups.items()):
                    n = sum(realized(a) for a in alternatives)
                    bounds = alternatives[0].multiplicity
                    if n < bounds.min_count or (bounds.max_count is not None and n > bounds.max_count):
                        violated.extend(a.id for a in alternatives)
            uninstantiated = bool(violated)
            final = not violated and not (instance_members & undeveloped)
            out[container.id] = (uninstantiated, final, tuple(sorted(violated)))
            if violated:
                self._diag(
                    "R12",
                    (container.id, *sorted(violated)),
                    f"{container.id} leaves multiplicity bounds unmet",
                )
        self._tick()
        return out

    # -- assembly ---------------------------------------------------------------------

    def run(self) -> InferenceResult:
        snap = self.snap
        cfg = self.cfg

        self._structural_invalidity()
        self._build_live_adjacency()
        self._conflicts()
        # R6 may have killed edges; rebuild the adjacency downstream rules see.
        self._build_live_adjacency()

        away_invalid = self._away_check()
        self._element_invalidity(away_invalid)

        # R2 over asserted supportedBy edges with element subjects.
        has_incoming: set[str] = set()
        for r in snap.relationship_list:
            if r.predicate is Predicate.SUPPORTED_BY and r.subject in self.elements:
                has_incoming.add(r.object)
        top_level = {
            eid
            for eid, e in self.elements.items()
            if e.kind is ElementKind.GOAL and eid not in has_incoming
        }

        # R8 over live edges.
        undeveloped = {
            eid
            for eid, e in self.elements.items()
            if e.kind in (ElementKind.GOAL, ElementKind.STRATEGY) and not self.sup_out.get(eid)
        }

        patterns = self._patterns(undeveloped)

        stored_false = {eid for eid, e in self.elements.items() if e.flags.truth is False}
        stored_doubt = {eid for eid, e in self.elements.items() if e.flags.in_doubt}
        stored_defeated = {eid for eid, e in self.elements.items() if e.flags.defeated}

        defeated_by, doubt_by, doubt_rels, challenge_dead, cycle_members = self._dialectics(
            stored_false, stored_defeated, stored_doubt
        )
        defeated = stored_defeated | set(defeated_by)
        sources = defeated | set(doubt_by) | cycle_members | stored_doubt

        # R10: every strict supportedBy-ancestor of a doubt/defeat source loses
        # truth and gains doubt; a source that supports another source is
        # revoked like any other ancestor.
        revoked: set[str] = set()
        doubt_parent: dict[str, str] = {}
        if cfg.on("R10"):
            frontier = sorted(sources)
            expanded: set[str] = set()
            while frontier:
                self._tick()
                nxt: list[str] = []
                for node in frontier:
                    if node in expanded:
                        continue
                    expanded.add(node)
                    for r in sorted(self.sup_in.get(node, []), key=lambda r: r.id):
                        parent = r.subject
                        if parent in revoked or parent not in self.elements:
                            continue
                        revoked.add(parent)
                        doubt_parent[parent] = node
                        nxt.append(parent)
                frontier = nxt
        in_doubt = sources | revoked

        would_be_true = self._derivable(stored_false | defeated, challenge_dead)
        final_true = self._derivable(stored_false | defeated | revoked, challenge_dead)

        def final_truth(eid: str) -> bool | None:
            if eid in final_true:
                return True
            if self.elements[eid].flags.truth is False:
                return False
            if eid in defeated:
                return False
            if eid in revoked and eid in would_be_true:
                return False
            return None

        # R13 after dialectics so defeat of confidence goals is visible.
        conf_doubt: dict[str, tuple[str, str]] = {}
        if cfg.on("R13"):
            for r in sorted(snap.relationship_list, key=lambda r: r.id):
                if r.confidence_argument is None:
                    continue
                for member in sorted(self.snap.members_closure(r.confidence_argument)):
                    e = self.elements.get(member)
                    if e is None or e.kind is not ElementKind.GOAL or member not in top_level:
                        continue
                    if member in defeated:
                        conf_doubt[r.id] = (member, "defeated")
                        break
                    if final_truth(member) is False:
                        conf_doubt[r.id] = (member, "truth")
                        break

        return self._assemble(
            top_level=top_level,
            undeveloped=undeveloped,
            patterns=patterns,
            defeated=defeated,
            defeated_by=defeated_by,
            doubt_by=doubt_by,
            cycle_members=cycle_members,
            in_doubt=in_doubt,
            revoked=revoked,
            doubt_parent=doubt_parent,
            doubt_rels=doubt_rels,
            conf_doubt=conf_doubt,
            final_truth=final_truth,
            final_true=final_true,
        )

    def _assemble(
        self,
        *,
        top_level,
        undeveloped,
        patterns,
        defeated,
        defeated_by,
        doubt_by,
        cycle_members,
        in_doubt,
        revoked,
        doubt_parent,
        doubt_rels,
        conf_doubt,
        final_truth,
        final_true,
    ) -> InferenceResult:
        cfg = self.cfg
        deltas: list[FlagDelta] = []
        assignment: dict[str, dict[str, object]] = {}

        def emit(rid: str, flag: str, old, new, rule: str, premises: tuple[Premise, ...]) -> None:
            if old != new:
                deltas.append(FlagDelta(rid, flag, old, new, rule))
                self.traces[(rid, flag)] = (rule, premises)

        for eid in sorted(self.elements):
            e = self.elements[eid]
            flags = e.flags
            final: dict[str, object] = {}

            new_top = eid in top_level if cfg.on("R2") else flags.top_level
            emit(eid, "topLevel", flags.top_level, new_top, "R2", ())
            final["topLevel"] = new_top

            if cfg.on("R8") and e.kind in (ElementKind.GOAL, ElementKind.STRATEGY):
                new_undev = eid in undeveloped
            else:
                new_undev = flags.undeveloped
            emit(eid, "undeveloped", flags.undeveloped, new_undev, "R8", ())
            final["undeveloped"] = new_undev

            if eid in self.elem_invalid and flags.valid is not False:
                cause = self.elem_invalid[eid]
                rule, premises = cause if cause else ("R5", ())
                emit(eid, "valid", flags.valid, False, rule, premises)
                final["valid"] = False
            else:
                final["valid"] = flags.valid

            new_truth = final_truth(eid)
            if new_truth != flags.truth:
                if new_truth is True:
                    emit(eid, "truth", flags.truth, True, "R7", self._truth_premises(eid, final_true))
                elif eid in defeated_by:
                    r = defeated_by[eid]
                    emit(eid, "truth", flags.truth, new_truth, "R9", ((r.id, None), (r.subject, "truth")))
                elif eid in revoked:
                    emit(eid, "truth", flags.truth, new_truth, "R10", ((doubt_parent[eid], "inDoubt"),))
                else:
                    emit(eid, "truth", flags.truth, new_truth, "R7", ())
            final["truth"] = new_truth

            new_defeated = eid in defeated
            if new_defeated and not flags.defeated:
                r = defeated_by.get(eid)
                premises = ((r.id, None), (r.subject, "truth")) if r is not None else ()
                emit(eid, "defeated", flags.defeated, True, "R9", premises)
            final["defeated"] = new_defeated

            new_doubt = flags.in_doubt or eid in in_doubt or new_defeated
            if new_doubt and not flags.in_doubt:
                if eid in defeated_by:
                    emit(eid, "inDoubt", flags.in_doubt, True, "R9", ((defeated_by[eid].id, None),))
                elif eid in doubt_by:
                    emit(eid, "inDoubt", flags.in_doubt, True, "R9", ((doubt_by[eid].id, None),))
                elif eid in cycle_members:
                    emit(eid, "inDoubt", flags.in_doubt, True, "R10", ())
                elif eid in doubt_parent:
                    emit(eid, "inDoubt", flags.in_doubt, True, "R10", ((doubt_parent[eid], "inDoubt"),))
                else:
                    emit(eid, "inDoubt", flags.in_doubt, True, "R9", ())
            final["inDoubt"] = new_doubt
            final["public"] = flags.public
            final["final"] = flags.final
            final["uninstantiated"] = flags.uninstantiated
            assignment[eid] = final

        invalidated: list[str] = []
        for rid in sorted(self.relationships):
            r = self.relationships[rid]
            final = {}
            if rid in self.rel_invalid and r.valid is not False:
                rule = self.rel_invalid[rid]
                emit(rid, "valid", r.valid, False, rule, ((r.subject, None), (r.object, None)))
                final["valid"] = False
                invalidated.append(rid)
            else:
                final["valid"] = r.valid
            new_doubt = r.in_doubt or rid in doubt_rels or rid in conf_doubt
            if new_doubt and not r.in_doubt:
                if rid in conf_doubt:
                    goal, via = conf_doubt[rid]
                    emit(rid, "inDoubt", r.in_doubt, True, "R13", ((goal, via),))
                else:
                    emit(rid, "inDoubt", r.in_doubt, True, "R10", ((doubt_rels[rid], None),))
            final["inDoubt"] = new_doubt
            assignment[rid] = final

        for cid in sorted(self.containers):
            c = self.containers[cid]
            final = {"valid": c.flags.valid, "public": c.flags.public}
            if cid in patterns:
                uninstantiated, is_final, violated = patterns[cid]
                premises = tuple((v, None) for v in violated)
                emit(cid, "uninstantiated", c.flags.uninstantiated, uninstantiated, "R12", premises)
                emit(cid, "final", c.flags.final, is_final, "R12", premises)
                final["uninstantiated"] = uninstantiated
                final["final"] = is_final
            else:
                final["uninstantiated"] = c.flags.uninstantiated
                final["final"] = c.flags.final
            assignment[cid] = final

        self.diagnostics.sort(key=lambda d: (d.rule, d.subjects, d.message))
        overlays = {
            "rule-triggered": frozenset(d.record_id for d in deltas),
            "defeated-closure": frozenset(defeated | in_doubt),
            "invalid": frozenset(
                [eid for eid in self.elements if assignment[eid]["valid"] is False]
                + [rid for rid in self.relationships if assignment[rid]["valid"] is False]
            ),
            "undeveloped": frozenset(eid for eid in self.elements if assignment[eid]["undeveloped"]),
            "top-level": frozenset(eid for eid in self.elements if assignment[eid]["topLevel"]),
        }
        if cfg.strict and self.diagnostics:
            raise DiagnosticsAsErrors(self.diagnostics)
        return InferenceResult(
            snapshot_version=self.snap.version,
            deltas=sorted(deltas, key=lambda d: (d.record_id, d.flag)),
            invalidated_relationships=sorted(invalidated),
            diagnostics=self.diagnostics,
            overlays=overlays,
            converged=True,
            iterations=self.iterations,
            traces=self.traces,
            assignment=assignment,
        )

    def _truth_premises(self, eid: str, final_true: set[str]) -> tuple[Premise, ...]:
        e = self.elements[eid]
        if e.flags.truth is True:
            return ()
        if e.kind is ElementKind.SOLUTION:
            for r in sorted(self.ref_out.get(eid, []), key=lambda r: r.id):
                artefact = self.containers.get(r.object)
                if (
                    artefact is not None
                    and artefact.kind is ContainerKind.ARTEFACT
                    and artefact.flags.valid is True
                ):
                    return ((r.id, None), (r.object, None))
            return ()
        kids = sorted({r.object for r in self.sup_out.get(eid, []) if r.object in final_true})
        return tuple((k, "truth") for k in kids)


def run_fixpoint(snapshot: Snapshot, config: InferenceConfig | None = None) -> InferenceResult:
    """Evaluate every enabled rule to fixpoint over one snapshot.

    Deterministic for a given snapshot; raises NonTermination only if the
    iteration guard trips, which indicates an engine bug.
    """
    return _Run(snapshot, config or InferenceConfig()).run()


def apply_result(snapshot: Snapshot, result: InferenceResult) -> Snapshot:
    """Apply a result's flag deltas, yielding the settled snapshot."""
    from .store import apply_delta

    return apply_delta(snapshot, result.as_delta())
