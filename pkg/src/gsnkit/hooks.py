"""Reactive automation and sandboxed what-if exploration.

Hooks fire on commits (matched against the records a delta added) or on
explicit clock ticks; there is no background scheduler, so behaviour is
fully deterministic and testable. A hook's own commits never re-trigger
hooks within the same event. Template instantiation and counterfactual
invalidation are plain operations returning deltas/reports.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path

from .errors import (
    ActionTargetEmpty,
    InvalidSelector,
    ParseError,
    PreconditionFailed,
    UnboundPlaceholder,
    UnknownTemplate,
)
from .inference import InferenceConfig, run_fixpoint
from .model import (
    Container,
    ContainerKind,
    Element,
    ElementKind,
    FlagSet,
    Predicate,
    Relationship,
    format_timestamp,
    parse_timestamp,
)
from .queries import Selector, eval_selector, parse_selector
from .store import CaseDelta, Snapshot, Store

PLACEHOLDER = re.compile(r"\{([^{}]+)\}")


def _parse(selector: str | Selector) -> Selector:
    if isinstance(selector, str):
        try:
            return parse_selector(selector)
        except ParseError as exc:
            raise InvalidSelector(str(exc)) from None
    return selector


# --- hook records -----------------------------------------------------------


@dataclass
class Trigger:
    kind: str  # "on_commit" | "on_tick"
    selector: str
    period_days: int = 0
    last_fired: datetime | None = None

    def to_dict(self) -> dict:
        out: dict = {"type": self.kind, "selector": self.selector}
        if self.kind == "on_tick":
            out["period_days"] = self.period_days
            if self.last_fired is not None:
                out["last_fired"] = format_timestamp(self.last_fired)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "Trigger":
        kind = raw["type"]
        if kind not in ("on_commit", "on_tick"):
            raise InvalidSelector(f"unknown trigger type {kind!r}")
        period = int(raw.get("period_days", 0))
        if kind == "on_tick" and period <= 0:
            raise InvalidSelector("on_tick trigger needs period_days > 0")
        return cls(
            kind=kind,
            selector=raw["selector"],
            period_days=period,
            last_fired=parse_timestamp(raw["last_fired"]) if raw.get("last_fired") else None,
        )


@dataclass
class Action:
    kind: str  # "create_defeater" | "attach_artefact" | "mark_valid_from"
    target_selector: str
    template: str = ""  # statement or artefact-name template

    def to_dict(self) -> dict:
        out: dict = {"type": self.kind, "target_selector": self.target_selector}
        if self.template:
            out["template"] = self.template
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "Action":
        kind = raw["type"]
        if kind not in ("create_defeater", "attach_artefact", "mark_valid_from"):
            raise InvalidSelector(f"unknown action type {kind!r}")
        return cls(kind=kind, target_selector=raw["target_selector"], template=raw.get("template", ""))


@dataclass
class Hook:
    id: str
    trigger: Trigger
    action: Action
    enabled: bool = True

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "enabled": self.enabled,
            "trigger": self.trigger.to_dict(),
            "action": self.action.to_dict(),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Hook":
        return cls(
            id=raw["id"],
            trigger=Trigger.from_dict(raw["trigger"]),
            action=Action.from_dict(raw["action"]),
            enabled=bool(raw.get("enabled", True)),
        )


@dataclass
class FiredAction:
    hook_id: str
    action: str
    created: list[str] = field(default_factory=list)
    updated: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class FireReport:
    fired: list[FiredAction] = field(default_factory=list)
    snapshot_version: int | None = None

    def as_dict(self) -> dict:
        return {
            "fired": [f.as_dict() for f in self.fired],
            "snapshot_version": self.snapshot_version,
        }


class HookRegistry:
    """Orders hooks by registration; commit-triggered hooks are wired to a
    store and run single-pass (their own commits do not re-enter)."""

    def __init__(self, store: Store):
        self.store = store
        self.hooks: dict[str, Hook] = {}
        store.on_commit(self._on_commit)

    def register_hook(self, hook: Hook) -> str:
        _parse(hook.trigger.selector)
        _parse(hook.action.target_selector)
        self.hooks[hook.id] = hook
        return hook.id

    # -- events ----------------------------------------------------------

    def _on_commit(self, snapshot: Snapshot, delta: CaseDelta) -> None:
        self.fire_commit(snapshot, delta)

    def fire_commit(self, snapshot: Snapshot, delta: CaseDelta) -> FireReport:
        added = {r.id for r in delta.add_elements} | {c.id for c in delta.add_containers}
        report = FireReport()
        for hook in self._active("on_commit"):
            matched = set(eval_selector(snapshot, _parse(hook.trigger.selector))) & added
            for trigger_id in sorted(matched):
                fired = self._run_action(hook, trigger_id=trigger_id)
                report.fired.append(fired)
        report.snapshot_version = self.store.version
        return report

    def fire_tick(self, now: datetime | str) -> FireReport:
        if isinstance(now, str):
            now = parse_timestamp(now)
        report = FireReport()
        snapshot = self.store.snapshot()
        for hook in self._active("on_tick"):
            last = hook.trigger.last_fired
            if last is not None and now - last < timedelta(days=hook.trigger.period_days):
                continue
            if not eval_selector(snapshot, _parse(hook.trigger.selector)):
                continue
            fired = self._run_action(hook, now=now)
            hook.trigger.last_fired = now
            report.fired.append(fired)
        report.snapshot_version = self.store.version
        return report

    def _active(self, kind: str) -> list[Hook]:
        return [h for h in self.hooks.values() if h.enabled and h.trigger.kind == kind]

    # -- actions -----------------------------------------------------------

    def _run_action(
        self, hook: Hook, trigger_id: str | None = None, now: datetime | None = None
    ) -> FiredAction:
        snapshot = self.store.snapshot()
        fired = FiredAction(hook_id=hook.id, action=hook.action.kind)
        targets = eval_selector(snapshot, _parse(hook.action.target_selector))
        if not targets:
            fired.notes.append("action target selector matched nothing")
            return fired
        stamp = trigger_id if trigger_id is not None else format_timestamp(now)[:10]
        delta = CaseDelta()
        if hook.action.kind == "create_defeater":
            defeater_id = f"D-{hook.id}-{stamp}"
            if defeater_id in snapshot.all_ids:
                fired.notes.append(f"{defeater_id} already exists")
                return fired
            statement = hook.action.template.replace("{trigger}", stamp) or f"Challenge raised by {stamp}"
            delta.add_elements.append(
                Element(id=defeater_id, kind=ElementKind.GOAL, statement=statement)
            )
            fired.created.append(defeater_id)
            for n, target in enumerate(sorted(targets), start=1):
                rel_id = f"{defeater_id}.c{n}"
                delta.add_relationships.append(
                    Relationship(
                        id=rel_id, subject=defeater_id, predicate=Predicate.CHALLENGES, object=target
                    )
                )
                fired.created.append(rel_id)
        elif hook.action.kind == "attach_artefact":
            artefact_id = f"A-{hook.id}-{stamp}"
            if artefact_id in snapshot.all_ids:
                fired.notes.append(f"{artefact_id} already exists")
                return fired
            name = hook.action.template.replace("{date}", stamp) or f"artefact created {stamp}"
            delta.add_containers.append(
                Container(
                    id=artefact_id,
                    kind=ContainerKind.ARTEFACT,
                    name=name,
                    artefact_uri=f"urn:artefact:{artefact_id}",
                )
            )
            fired.created.append(artefact_id)
            for n, target in enumerate(sorted(targets), start=1):
                rel_id = f"{artefact_id}.a{n}"
                delta.add_relationships.append(
                    Relationship(
                        id=rel_id, subject=target, predicate=Predicate.ATTACHED_TO, object=artefact_id
                    )
                )
                fired.created.append(rel_id)
        elif hook.action.kind == "mark_valid_from":
            delta = propagate_valid_from(snapshot, _parse(hook.action.target_selector))
            fired.updated.extend(rid for rid, _flag, _v in delta.updates)
        if not delta.is_empty():
            self.store.commit(delta, notify=False)
        return fired

    # -- persistence ----------------------------------------------------------

    def save(self, path: str | Path) -> None:
        payload = {"hooks": [self.hooks[hid].to_dict() for hid in sorted(self.hooks)]}
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    def load(self, path: str | Path) -> int:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        count = 0
        for entry in raw.get("hooks", []):
            self.register_hook(Hook.from_dict(entry))
            count += 1
        return count


# --- template instantiation ---------------------------------------------------


@dataclass
class InstantiationOutcome:
    delta: CaseDelta
    created: list[str]
    notes: list[str]

    def as_dict(self) -> dict:
        return {"created": self.created, "notes": self.notes, "delta": self.delta.summary()}


def instantiate_template(
    snapshot: Snapshot, template_id: str, bindings: dict[str, str]
) -> InstantiationOutcome:
    """Instantiate a template's prototype members once per listed artefact.

    Listed artefacts are the references targets of the template's attached
    InstantiationDataReference. Instance ids are deterministic in
    (template, bindings, artefact), so re-instantiating with identical
    bindings is a no-op.
    """
    template = snapshot.containers.get(template_id)
    if template is None or template.kind is not ContainerKind.TEMPLATE:
        raise UnknownTemplate(template_id)

    idr_ids = []
    if template.instantiation_data is not None:
        idr_ids.append(template.instantiation_data)
    for r in snapshot.rel_by_subject.get(template_id, []):
        rel = snapshot.relationships[r]
        if rel.predicate is Predicate.ATTACHED_TO:
            idr_ids.append(rel.object)
    artefacts: list[str] = []
    for idr in idr_ids:
        for rid in snapshot.rel_by_subject.get(idr, []):
            rel = snapshot.relationships[rid]
            if rel.predicate is Predicate.REFERENCES:
                c = snapshot.containers.get(rel.object)
                if c is not None and c.kind is ContainerKind.ARTEFACT:
                    artefacts.append(rel.object)
    artefacts = sorted(set(artefacts))

    prototypes = [
        snapshot.elements[m]
        for m in sorted(snapshot.membership.get(template_id, ()))
        if m in snapshot.elements
    ]
    placeholders = {
        name for proto in prototypes for name in PLACEHOLDER.findall(proto.statement)
    }
    for name in sorted(placeholders):
        if name not in bindings:
            raise UnboundPlaceholder(name)

    outcome = InstantiationOutcome(delta=CaseDelta(), created=[], notes=[])
    if not artefacts:
        outcome.notes.append("action target empty: template lists no artefacts")
        return outcome

    digest = hashlib.sha256(
        json.dumps({k: bindings[k] for k in sorted(bindings)}).encode()
    ).hexdigest()[:8]
    for proto in prototypes:
        statement = PLACEHOLDER.sub(lambda m: bindings[m.group(1)], proto.statement)
        for artefact_id in artefacts:
            instance_id = f"{template_id}-{digest}-{artefact_id}"
            if len(prototypes) > 1:
                instance_id = f"{template_id}-{digest}-{proto.id}-{artefact_id}"
            if instance_id in snapshot.all_ids:
                outcome.notes.append(f"{instance_id} already instantiated")
                continue
            outcome.delta.add_elements.append(
                Element(
                    id=instance_id,
                    kind=ElementKind.SOLUTION,
                    statement=statement,
                    flags=FlagSet(uninstantiated=False),
                )
            )
            outcome.delta.add_relationships.append(
                Relationship(
                    id=f"{instance_id}.ref",
                    subject=instance_id,
                    predicate=Predicate.REFERENCES,
                    object=artefact_id,
                )
            )
            outcome.created.append(instance_id)
    return outcome


# --- what-if sandbox ------------------------------------------------------------


@dataclass
class WhatIfReport:
    base_version: int
    matched: list[str]
    deltas: list[dict]  # {id, flag, base, whatif}

    def as_dict(self) -> dict:
        return {"base_version": self.base_version, "matched": self.matched, "deltas": self.deltas}


def whatif_invalidate(
    snapshot: Snapshot,
    target_selector: str | Selector,
    config: InferenceConfig | None = None,
) -> WhatIfReport:
    """Assert valid=false on the matched records inside a sandbox, re-run the
    rules, and report every flag that settles differently. The base snapshot
    is not touched."""
    matched = eval_selector(snapshot, _parse(target_selector))
    if not matched:
        raise ActionTargetEmpty(
            target_selector if isinstance(target_selector, str) else repr(target_selector)
        )
    fork_elements = [
        dataclasses.replace(e, flags=e.flags.set("valid", False)) if e.id in matched else e
        for e in snapshot.element_list
    ]
    fork_containers = [
        dataclasses.replace(c, flags=c.flags.set("valid", False)) if c.id in matched else c
        for c in snapshot.container_list
    ]
    sandbox = Snapshot.from_records(
        case=snapshot.case,
        elements=fork_elements,
        relationships=list(snapshot.relationship_list),
        containers=fork_containers,
        version=snapshot.version,
        strict=False,
    )
    base = run_fixpoint(snapshot, config).assignment
    forked = run_fixpoint(sandbox, config).assignment
    deltas: list[dict] = []
    for rid in sorted(set(base) | set(forked)):
        base_flags = base.get(rid, {})
        fork_flags = forked.get(rid, {})
        for flag in sorted(set(base_flags) | set(fork_flags)):
            if base_flags.get(flag) != fork_flags.get(flag):
                deltas.append(
                    {"id": rid, "flag": flag, "base": base_flags.get(flag), "whatif": fork_flags.get(flag)}
                )
    return WhatIfReport(base_version=snapshot.version, matched=sorted(matched), deltas=deltas)


# --- evidence-driven validity -------------------------------------------------------


def propagate_valid_from(snapshot: Snapshot, artefact_selector: str | Selector) -> CaseDelta:
    """Delta asserting valid=true on every element whose references edges
    reach a matched, already-valid artefact."""
    matched = [
        rid
        for rid in eval_selector(snapshot, _parse(artefact_selector))
        if rid in snapshot.containers
        and snapshot.containers[rid].kind is ContainerKind.ARTEFACT
    ]
    if not matched:
        raise ActionTargetEmpty("no artefacts matched")
    for rid in matched:
        if snapshot.containers[rid].flags.valid is not True:
            raise PreconditionFailed(f"artefact {rid} is not valid=true")
    targets: set[str] = set()
    for artefact_id in matched:
        for rel_id in snapshot.rel_by_object.get(artefact_id, []):
            r = snapshot.relationships[rel_id]
            if r.predicate is Predicate.REFERENCES and r.subject in snapshot.elements:
                targets.add(r.subject)
    return CaseDelta(updates=[(rid, "valid", True) for rid in sorted(targets)])
