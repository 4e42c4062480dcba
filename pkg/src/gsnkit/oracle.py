"""Deliberately naive reference evaluator for the rule catalogue.

Used only by tests as the independent oracle for the worklist engine in
:mod:`gsnkit.inference`. No indexes, no stratification machinery: rules are
plain functions over the record lists, recomputing their premises with
repeated full scans, and the driver applies all of them in arbitrary
(seeded) order until a complete pass changes nothing. Guard rules whose
premises must be settled first (defeater strength) pick their work from the
currently unblocked challenges, which realizes the required dependency
order without ever fixing a global schedule.

Algorithmic choices intentionally differ from the engine: cycle membership
is a per-edge reachability probe instead of SCC condensation, closures are
pass-until-stable loops instead of worklists, and truth is re-derived by
whole-table sweeps.
"""

from __future__ import annotations

import random

from .errors import OracleSizeExceeded
from .inference import InferenceConfig
from .model import ContainerKind, ElementKind, Predicate, Relationship, edge_type_allowed
from .store import Snapshot

SIZE_GUARD = 1000


class _Oracle:
    def __init__(self, snapshot: Snapshot, config: InferenceConfig, rng: random.Random):
        self.snap = snapshot
        self.cfg = config
        self.rng = rng
        self.elements = snapshot.elements
        self.relationships = snapshot.relationships
        self.containers = snapshot.containers
        self.rels = list(snapshot.relationship_list)
        self._cache: dict[str, object] = {}
        # Mutable flag state, seeded from the stored records.
        self.state: dict[str, dict[str, object]] = {}
        for eid, e in self.elements.items():
            self.state[eid] = {
                "topLevel": e.flags.top_level,
                "undeveloped": e.flags.undeveloped,
                "valid": e.flags.valid,
                "truth": e.flags.truth,
                "defeated": e.flags.defeated,
                "inDoubt": e.flags.in_doubt,
            }
        for rid, r in self.relationships.items():
            self.state[rid] = {"valid": r.valid, "inDoubt": r.in_doubt}
        for cid, c in self.containers.items():
            self.state[cid] = {"uninstantiated": c.flags.uninstantiated, "final": c.flags.final}

    def _shuffled(self, items) -> list:
        out = sorted(items)
        self.rng.shuffle(out)
        return out

    def _write(self, rid: str, flag: str, value) -> bool:
        if self.state[rid].get(flag) != value:
            self.state[rid][flag] = value
            return True
        return False

    # -- naive pure helpers (asserted data only, so safely memoizable) -------

    def _record_kind(self, rid: str) -> str | None:
        if rid in self.elements:
            return self.elements[rid].kind.value
        if rid in self.containers:
            return self.containers[rid].kind.value
        if rid in self.relationships:
            return "Relationship"
        return None

    def _dup_ids(self) -> set[str]:
        if "dup_ids" not in self._cache:
            ids = (
                [self.snap.case.id]
                + [e.id for e in self.snap.element_list]
                + [r.id for r in self.rels]
                + [c.id for c in self.snap.container_list]
            )
            self._cache["dup_ids"] = {i for i in ids if ids.count(i) > 1}
        return self._cache["dup_ids"]

    def _dup_triples(self) -> set[str]:
        out = set()
        for r in self.rels:
            for other in self.rels:
                if (
                    other.id < r.id
                    and other.subject == r.subject
                    and other.predicate is r.predicate
                    and other.object == r.object
                ):
                    out.add(r.id)
        return out

    def _cycle_rels(self) -> set[str]:
        """An edge lies on a cycle iff its object can walk back to its subject."""
        sup = [r for r in self.rels if r.predicate is Predicate.SUPPORTED_BY and r.valid is not False]
        out = set()
        for r in sup:
            if r.subject == r.object:
                out.add(r.id)
                continue
            reached = {r.object}
            while True:
                grew = False
                for other in sup:
                    if other.subject in reached and other.object not in reached:
                        reached.add(other.object)
                        grew = True
                if not grew:
                    break
            if r.subject in reached:
                out.add(r.id)
        return out

    def _structural_dead(self) -> set[str]:
        """Edges discounted for every downstream rule: asserted-invalid plus
        everything R1/R3/R4/R6/R11 flags."""
        if "dead" in self._cache:
            return self._cache["dead"]
        dead = {r.id for r in self.rels if r.valid is False}
        if self.cfg.on("R1"):
            dead |= self._dup_triples()
        if self.cfg.on("R3"):
            for r in self.rels:
                sk, ok = self._record_kind(r.subject), self._record_kind(r.object)
                if sk is None or ok is None or not edge_type_allowed(r.predicate, sk, ok):
                    dead.add(r.id)
        if self.cfg.on("R4"):
            dead |= self._cycle_rels()
        if self.cfg.on("R11"):
            dups = self._dup_ids()
            for r in self.rels:
                if r.subject in dups or r.object in dups:
                    dead.add(r.id)
        if self.cfg.on("R6"):
            dead |= self._conflict_dead(dead)
        self._cache["dead"] = dead
        return dead

    def _ancestors_or_self(self, start: str, dead: set[str]) -> set[str]:
        reached = {start}
        while True:
            grew = False
            for r in self.rels:
                if r.predicate is Predicate.SUPPORTED_BY and r.id not in dead:
                    if r.object in reached and r.subject not in reached:
                        reached.add(r.subject)
                        grew = True
            if not grew:
                break
        return reached

    def _conflict_dead(self, dead_so_far: set[str]) -> set[str]:
        out: set[str] = set()
        attach_preds = (Predicate.IN_CONTEXT_OF, Predicate.REFERENCES, Predicate.ATTACHED_TO)
        for conflict in self.rels:
            if conflict.predicate is not Predicate.CONFLICTS_WITH or conflict.id in dead_so_far:
                continue
            if conflict.valid is False:
                continue
            left = [
                r
                for r in self.rels
                if r.predicate in attach_preds and r.object == conflict.subject
                and r.id not in dead_so_far
            ]
            right = [
                r
                for r in self.rels
                if r.predicate in attach_preds and r.object == conflict.object
                and r.id not in dead_so_far
            ]
            for e1 in left:
                for e2 in right:
                    if e1.id == e2.id:
                        continue
                    a1 = self._ancestors_or_self(e1.subject, dead_so_far)
                    a2 = self._ancestors_or_self(e2.subject, dead_so_far)
                    if a1 & a2:
                        out.add(e1.id)
                        out.add(e2.id)
        return out

    def _away_bad(self) -> set[str]:
        if not self.cfg.on("R11"):
            return set()
        bad = set()
        for eid, e in self.elements.items():
            if e.away_target is None:
                continue
            target = self.elements.get(e.away_target.element)
            if (
                target is None
                or target.module != e.away_target.module
                or (e.module is not None and target.module == e.module)
                or not target.flags.public
            ):
                bad.add(eid)
        return bad

    def _elem_invalid(self) -> set[str]:
        if "elem_invalid" in self._cache:
            return self._cache["elem_invalid"]
        dead = self._structural_dead()
        invalid = {eid for eid, e in self.elements.items() if e.flags.valid is False}
        invalid |= self._away_bad()
        if self.cfg.on("R5"):
            while True:
                grew = False
                for r in self.rels:
                    if r.id in dead:
                        continue
                    if r.predicate is Predicate.IN_CONTEXT_OF:
                        ctx = self.elements.get(r.object)
                        if (
                            ctx is not None
                            and ctx.kind in (ElementKind.ASSUMPTION, ElementKind.CONTEXT)
                            and r.object in invalid
                            and r.subject in self.elements
                            and r.subject not in invalid
                        ):
                            invalid.add(r.subject)
                            grew = True
                    elif r.predicate is Predicate.SUPPORTED_BY:
                        if r.subject in invalid and r.object in self.elements and r.object not in invalid:
                            invalid.add(r.object)
                            grew = True
                if not grew:
                    break
        self._cache["elem_invalid"] = invalid
        return invalid

    def _derivable(self, pinned: set[str], extra_dead: set[str]) -> set[str]:
        """Truth by whole-table sweeps until stable."""
        if not self.cfg.on("R7"):
            return {
                eid for eid, e in self.elements.items() if e.flags.truth is True and eid not in pinned
            }
        dead = self._structural_dead() | extra_dead
        invalid = self._elem_invalid()
        true: set[str] = set()
        while True:
            grew = False
            for eid in self._shuffled(self.elements):
                if eid in true or eid in pinned or eid in invalid:
                    continue
                e = self.elements[eid]
                derived = False
                if e.flags.truth is True:
                    derived = True
                elif e.kind is ElementKind.SOLUTION:
                    for r in self.rels:
                        if (
                            r.predicate is Predicate.REFERENCES
                            and r.subject == eid
                            and r.id not in dead
                        ):
                            art = self.containers.get(r.object)
                            if (
                                art is not None
                                and art.kind is ContainerKind.ARTEFACT
                                and art.flags.valid is True
                            ):
                                derived = True
                                break
                elif e.kind in (ElementKind.GOAL, ElementKind.STRATEGY):
                    kids = {
                        r.object
                        for r in self.rels
                        if r.predicate is Predicate.SUPPORTED_BY
                        and r.subject == eid
                        and r.id not in dead
                        and r.object in self.elements
                    }
                    derived = bool(kids) and all(k in true for k in kids)
                if derived:
                    true.add(eid)
                    grew = True
            if not grew:
                return true

    # -- dialectic state (pure, order realized by unblocked-challenge picks) --

    def _dialectic(self) -> dict:
        if "dialectic" in self._cache:
            return self._cache["dialectic"]
        dead = self._structural_dead()
        stored_false = {eid for eid, e in self.elements.items() if e.flags.truth is False}
        stored_defeated = {eid for eid, e in self.elements.items() if e.flags.defeated}
        stored_doubt = {eid for eid, e in self.elements.items() if e.flags.in_doubt}

        defeated: set[str] = set()
        doubt: set[str] = set()
        cycle_members: set[str] = set()
        rel_doubt: set[str] = set()
        challenge_dead: set[str] = set()

        edges = []
        if self.cfg.on("R9"):
            edges = [
                r for r in self.rels if r.predicate is Predicate.CHALLENGES and r.id not in dead
            ]

        def effect(r: Relationship) -> str | None:
            if r.object in self.elements:
                return r.object
            if r.object in self.relationships:
                return self.relationships[r.object].subject
            return None

        def descendants_or_self(start: str) -> set[str]:
            reached = {start}
            while True:
                grew = False
                for r in self.rels:
                    if r.predicate is Predicate.SUPPORTED_BY and r.id not in dead:
                        if r.subject in reached and r.object not in reached:
                            reached.add(r.object)
                            grew = True
                if not grew:
                    break
            return reached

        blocks: dict[str, set[str]] = {}  # challenge -> challenges it waits on
        for c2 in edges:
            prem = descendants_or_self(c2.subject)
            blocks[c2.id] = {c1.id for c1 in edges if effect(c1) in prem}

        def on_dependency_cycle(cid: str) -> bool:
            frontier = {c2 for c2, waits in blocks.items() if cid in waits}
            reached = set(frontier)
            while True:
                grew = False
                for c2, waits in blocks.items():
                    if c2 not in reached and waits & reached:
                        reached.add(c2)
                        grew = True
                if not grew:
                    break
            return cid in reached

        by_id = {r.id: r for r in edges}
        cyclic = {cid for cid in blocks if on_dependency_cycle(cid)}
        for cid in self._shuffled(cyclic):
            r = by_id[cid]
            if r.subject in self.elements:
                cycle_members.add(r.subject)
            if r.object in self.elements:
                cycle_members.add(r.object)
            elif r.object in self.relationships and self.cfg.on("R10"):
                rel_doubt.add(r.object)

        def strict_ancestors(sources: set[str]) -> set[str]:
            """Everything that reaches a source over at least one live
            supportedBy edge; may include sources that support each other."""
            above: set[str] = set()
            while True:
                grew = False
                for r in self.rels:
                    if r.predicate is Predicate.SUPPORTED_BY and r.id not in dead:
                        if (r.object in sources or r.object in above) and r.subject not in above:
                            if r.subject in self.elements:
                                above.add(r.subject)
                                grew = True
                if not grew:
                    break
            return above

        def pins_now() -> set[str]:
            sources = stored_defeated | stored_doubt | defeated | doubt | cycle_members
            return stored_false | stored_defeated | defeated | strict_ancestors(sources)

        processed = set(cyclic)
        remaining = [r.id for r in edges if r.id not in processed]
        while remaining:
            ready = [cid for cid in remaining if blocks[cid] <= processed | {cid}]
            if not ready:  # pragma: no cover - dependency cycles were pre-marked
                break
            for cid in self._shuffled(ready):
                r = by_id[cid]
                strong = r.subject in self._derivable(pins_now(), challenge_dead)
                if r.object in self.elements:
                    (defeated if strong else doubt).add(r.object)
                elif r.object in self.relationships and self.cfg.on("R10"):
                    rel_doubt.add(r.object)
                    if strong:
                        challenge_dead.add(r.object)
                processed.add(cid)
            remaining = [cid for cid in remaining if cid not in processed]

        all_defeated = stored_defeated | defeated
        sources = all_defeated | doubt | cycle_members | stored_doubt
        revoked = strict_ancestors(sources) if self.cfg.on("R10") else set()
        would_be = self._derivable(stored_false | all_defeated, challenge_dead)
        final_true = self._derivable(stored_false | all_defeated | revoked, challenge_dead)

        result = {
            "defeated": all_defeated,
            "doubt_elems": sources | revoked,
            "rel_doubt": rel_doubt,
            "revoked": revoked,
            "would_be": would_be,
            "final_true": final_true,
        }
        self._cache["dialectic"] = result
        return result

    def _final_truth(self, eid: str) -> bool | None:
        d = self._dialectic()
        if eid in d["final_true"]:
            return True
        if self.elements[eid].flags.truth is False:
            return False
        if eid in d["defeated"]:
            return False
        if eid in d["revoked"] and eid in d["would_be"]:
            return False
        return None

    def _top_level(self, eid: str) -> bool:
        e = self.elements[eid]
        if e.kind is not ElementKind.GOAL:
            return False
        for r in self.rels:
            if (
                r.predicate is Predicate.SUPPORTED_BY
                and r.object == eid
                and r.subject in self.elements
            ):
                return False
        return True

    def _membership_closure(self, container_id: str) -> set[str]:
        members: dict[str, set[str]] = {}
        for c in [self.snap.case, *self.snap.container_list]:
            members.setdefault(c.id, set()).update(c.members)
        for r in self.rels:
            if r.predicate is Predicate.CONTAINS:
                members.setdefault(r.subject, set()).add(r.object)
        closure = set(members.get(container_id, ()))
        while True:
            grew = False
            for m in list(closure):
                for sub in members.get(m, ()):
                    if sub not in closure:
                        closure.add(sub)
                        grew = True
            if not grew:
                break
        return closure

    # -- rules -----------------------------------------------------------------

    def rule_r1_r3_r4_r11_edges(self) -> bool:
        changed = False
        dead = self._structural_dead()
        for r in self._shuffled(self.relationships):
            rel = self.relationships[r]
            if rel.id in dead and rel.valid is not False:
                changed |= self._write(rel.id, "valid", False)
        return changed

    def rule_r2_top_level(self) -> bool:
        if not self.cfg.on("R2"):
            return False
        changed = False
        for eid in self._shuffled(self.elements):
            changed |= self._write(eid, "topLevel", self._top_level(eid))
        return changed

    def rule_r5_r11_element_validity(self) -> bool:
        changed = False
        invalid = self._elem_invalid()
        for eid in self._shuffled(self.elements):
            if eid in invalid:
                changed |= self._write(eid, "valid", False)
        return changed

    def rule_r7_truth(self) -> bool:
        changed = False
        for eid in self._shuffled(self.elements):
            changed |= self._write(eid, "truth", self._final_truth(eid))
        return changed

    def rule_r8_undeveloped(self) -> bool:
        if not self.cfg.on("R8"):
            return False
        changed = False
        dead = self._structural_dead()
        for eid in self._shuffled(self.elements):
            e = self.elements[eid]
            if e.kind not in (ElementKind.GOAL, ElementKind.STRATEGY):
                continue
            has_support = any(
                r.predicate is Predicate.SUPPORTED_BY and r.subject == eid and r.id not in dead
                for r in self.rels
            )
            changed |= self._write(eid, "undeveloped", not has_support)
        return changed

    def rule_r9_defeat(self) -> bool:
        d = self._dialectic()
        changed = False
        for eid in self._shuffled(self.elements):
            defeated = eid in d["defeated"]
            changed |= self._write(eid, "defeated", defeated)
            if defeated:
                changed |= self._write(eid, "inDoubt", True)
        return changed

    def rule_r10_doubt(self) -> bool:
        d = self._dialectic()
        changed = False
        for eid in self._shuffled(self.elements):
            in_doubt = self.elements[eid].flags.in_doubt or eid in d["doubt_elems"] or eid in d["defeated"]
            changed |= self._write(eid, "inDoubt", in_doubt)
        for rid in self._shuffled(self.relationships):
            if rid in d["rel_doubt"]:
                changed |= self._write(rid, "inDoubt", True)
        return changed

    def rule_r12_patterns(self) -> bool:
        if not self.cfg.on("R12"):
            return False
        changed = False
        dead = self._structural_dead()
        inst_of: dict[str, set[str]] = {}
        for r in self.rels:
            if r.predicate is Predicate.INSTANTIATES and r.id not in dead:
                inst_of.setdefault(r.subject, set()).add(r.object)
        undeveloped = set()
        for eid, e in self.elements.items():
            if e.kind in (ElementKind.GOAL, ElementKind.STRATEGY):
                if not any(
                    r.predicate is Predicate.SUPPORTED_BY and r.subject == eid and r.id not in dead
                    for r in self.rels
                ):
                    undeveloped.add(eid)
        for cid in self._shuffled(self.containers):
            container = self.containers[cid]
            if container.kind is not ContainerKind.ARGUMENT:
                continue
            patterns = [
                p
                for p in inst_of.get(cid, ())
                if p in self.containers and self.containers[p].kind is ContainerKind.PATTERN
            ]
            if not patterns:
                continue
            inst_members = self._membership_closure(cid)
            violated = False
            for pattern_id in sorted(patterns):
                pat_members = self._membership_closure(pattern_id)
                pattern_edges = [
                    r for r in self.rels if r.multiplicity is not None and r.subject in pat_members
                ]

                def realized(p_edge: Relationship) -> int:
                    n = 0
                    for r in self.rels:
                        if r.id in dead or r.predicate is not p_edge.predicate:
                            continue
                        if r.subject not in inst_members:
                            continue
                        if p_edge.subject not in inst_of.get(r.subject, ()):
                            continue
                        if p_edge.object not in inst_of.get(r.object, ()):
                            continue
                        n += 1
                    return n

                seen_groups: set[tuple[str, str]] = set()
                for p_edge in sorted(pattern_edges, key=lambda r: r.id):
                    m = p_edge.multiplicity
                    if m.group is not None:
                        key = (p_edge.subject, m.group)
                        if key in seen_groups:
                            continue
                        seen_groups.add(key)
                        alternatives = [
                            a
                            for a in pattern_edges
                            if a.subject == p_edge.subject and a.multiplicity.group == m.group
                        ]
                        n = sum(realized(a) for a in alternatives)
                    else:
                        n = realized(p_edge)
                    if n < m.min_count or (m.max_count is not None and n > m.max_count):
                        violated = True
            changed |= self._write(cid, "uninstantiated", violated)
            is_final = not violated and not (inst_members & undeveloped)
            changed |= self._write(cid, "final", is_final)
        return changed

    def rule_r13_confidence(self) -> bool:
        if not self.cfg.on("R13"):
            return False
        d = self._dialectic()
        changed = False
        for rid in self._shuffled(self.relationships):
            rel = self.relationships[rid]
            if rel.confidence_argument is None:
                continue
            fire = False
            for member in self._membership_closure(rel.confidence_argument):
                e = self.elements.get(member)
                if e is None or e.kind is not ElementKind.GOAL or not self._top_level(member):
                    continue
                if member in d["defeated"] or self._final_truth(member) is False:
                    fire = True
                    break
            if fire:
                changed |= self._write(rid, "inDoubt", True)
        return changed

    # -- driver -------------------------------------------------------------------

    def run(self) -> dict[str, dict[str, object]]:
        rules = [
            self.rule_r1_r3_r4_r11_edges,
            self.rule_r2_top_level,
            self.rule_r5_r11_element_validity,
            self.rule_r7_truth,
            self.rule_r8_undeveloped,
            self.rule_r9_defeat,
            self.rule_r10_doubt,
            self.rule_r12_patterns,
            self.rule_r13_confidence,
        ]
        while True:
            self.rng.shuffle(rules)
            if not any([rule() for rule in rules]):
                break
        return self._assignment()

    def _assignment(self) -> dict[str, dict[str, object]]:
        out: dict[str, dict[str, object]] = {}
        for eid, e in self.elements.items():
            s = self.state[eid]
            out[eid] = {
                "topLevel": s["topLevel"],
                "undeveloped": s["undeveloped"],
                "valid": s["valid"],
                "truth": s["truth"],
                "defeated": s["defeated"],
                "inDoubt": s["inDoubt"],
                "public": e.flags.public,
                "final": e.flags.final,
                "uninstantiated": e.flags.uninstantiated,
            }
        for rid in self.relationships:
            s = self.state[rid]
            out[rid] = {"valid": s["valid"], "inDoubt": s["inDoubt"]}
        for cid, c in self.containers.items():
            s = self.state[cid]
            out[cid] = {
                "valid": c.flags.valid,
                "public": c.flags.public,
                "uninstantiated": s["uninstantiated"],
                "final": s["final"],
            }
        return out


def naive_oracle(
    snapshot: Snapshot,
    config: InferenceConfig | None = None,
    seed: int = 0,
) -> dict[str, dict[str, object]]:
    """Final flag assignment by brute force. ``seed`` shuffles every rule and
    record visiting order; the assignment must not depend on it."""
    records = (
        len(snapshot.element_list)
        + len(snapshot.relationship_list)
        + len(snapshot.container_list)
        + 1
    )
    if records > SIZE_GUARD:
        raise OracleSizeExceeded(records, SIZE_GUARD)
    return _Oracle(snapshot, config or InferenceConfig(), random.Random(seed)).run()
