"""HTTP service over one assurance case.

The store holds the authored case; derived flags live in a settled view
recomputed from the authored head, so retracting records (for example
toggling a defeater off) fully restores the previous flag assignment on the
next inference. Every mutating response carries the new snapshot version;
reads echo the version they were evaluated against. Reads are answered
against the settled view, exports default to the authored layer.
"""

from __future__ import annotations

import json
import os
from typing import Any

from fastapi import Body, FastAPI, HTTPException, Query, Request, Response

from . import caseio
from .errors import (
    ActionTargetEmpty,
    DanglingReference,
    DuplicateIdentifier,
    DuplicateTriple,
    EmptyStatement,
    GsnError,
    MissingParameter,
    NonTermination,
    ParseError,
    PreconditionFailed,
    StaleVersion,
    UnboundPlaceholder,
    Unparseable,
    UnknownEndpoint,
    UnknownKind,
    UnknownPredicate,
    UnknownPredicateIRI,
    UnknownQuery,
    UnknownTemplate,
)
from .hooks import Hook, HookRegistry, instantiate_template, whatif_invalidate
from .inference import InferenceConfig, InferenceResult, apply_result, run_fixpoint
from .model import Element, Relationship
from .queries import eval_selector, list_queries, parse_selector, run_cq
from .queries.cq import _rows as _selector_rows
from .store import CaseDelta, Snapshot, Store

_CONFLICT = (DuplicateIdentifier, DuplicateTriple, StaleVersion)
_BAD_REQUEST = (
    ActionTargetEmpty,
    DanglingReference,
    EmptyStatement,
    MissingParameter,
    ParseError,
    PreconditionFailed,
    UnboundPlaceholder,
    UnknownEndpoint,
    UnknownKind,
    UnknownPredicate,
    UnknownPredicateIRI,
    Unparseable,
)
_NOT_FOUND = (UnknownQuery, UnknownTemplate)


def classify_operation(text: str) -> str:
    """Route selector text to the readers, deltas and registrations to the
    writer. What-if payloads are reads: they never touch the base store."""
    stripped = text.strip()
    if not stripped:
        raise Unparseable("empty request body")
    if stripped.startswith("{"):
        try:
            payload = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise Unparseable(f"not JSON: {exc.msg}") from None
        if not isinstance(payload, dict):
            raise Unparseable("expected an object body")
        if "whatif" in payload or "selector" in payload:
            return "read"
        update_keys = {
            "elements", "relationships", "containers", "updates", "remove",
            "hook", "template", "bindings", "id", "kind",
        }
        if update_keys & set(payload):
            return "update"
        raise Unparseable(f"cannot classify object with keys {sorted(payload)}")
    try:
        parse_selector(stripped)
    except ParseError as exc:
        raise Unparseable(str(exc)) from None
    return "read"


class CaseService:
    """Application state: authored store, hook registry, settled-view cache."""

    def __init__(self, store: Store):
        self.store = store
        self.hooks = HookRegistry(store)
        self._settled: tuple[int, InferenceResult, Snapshot] | None = None

    @classmethod
    def from_document(cls, doc: caseio.CaseDocument) -> "CaseService":
        return cls(Store.from_document(doc))

    def settle(self, config: InferenceConfig | None = None) -> tuple[InferenceResult, Snapshot]:
        head = self.store.snapshot()
        if config is None and self._settled is not None and self._settled[0] == head.version:
            return self._settled[1], self._settled[2]
        result = run_fixpoint(head, config)
        settled = apply_result(head, result)
        if config is None:
            self._settled = (head.version, result, settled)
        return result, settled

    def settled_snapshot(self) -> Snapshot:
        return self.settle()[1]


def _element_from_payload(raw: dict) -> Element:
    return caseio._element_from_dict(raw)


def _relationship_from_payload(raw: dict) -> Relationship:
    if "id" not in raw:
        raw = {**raw, "id": ""}
    if not raw.get("id"):
        raise ParseError("relationship payload requires an explicit 'id'")
    return caseio._relationship_from_dict(raw)


def create_app(service: CaseService) -> FastAPI:
    app = FastAPI(title="gsnkit case service")

    @app.exception_handler(GsnError)
    async def _gsn_error(request: Request, exc: GsnError):
        if isinstance(exc, _CONFLICT):
            status = 409
        elif isinstance(exc, _NOT_FOUND):
            status = 404
        elif isinstance(exc, _BAD_REQUEST):
            status = 400
        elif isinstance(exc, NonTermination):
            status = 500
        else:
            status = 400
        return Response(
            content=json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
            status_code=status,
            media_type="application/json",
        )

    def envelope(data: Any, version: int | None = None) -> dict:
        return {"version": service.store.version if version is None else version, "data": data}

    @app.get("/case")
    def get_case(layer: str = Query(default="settled")) -> dict:
        snapshot = service.settled_snapshot() if layer == "settled" else service.store.snapshot()
        doc = snapshot.to_document()
        return envelope(json.loads(caseio.serialize_native(doc)), version=service.store.version)

    @app.get("/case/export")
    def export_case(format: str = Query(default="json"), layer: str = Query(default="authored")):
        snapshot = service.settled_snapshot() if layer == "settled" else service.store.snapshot()
        doc = snapshot.to_document()
        if format == "ttl":
            return Response(caseio.serialize_interchange(doc), media_type="text/turtle")
        if format == "json":
            return Response(caseio.serialize_native(doc), media_type="application/json")
        raise HTTPException(status_code=400, detail=f"unknown format {format!r}")

    @app.post("/case/import")
    async def import_case(request: Request, format: str = Query(default="json")) -> dict:
        text = (await request.body()).decode("utf-8")
        if format == "ttl":
            doc = caseio.parse_interchange(text)
        elif format == "json":
            doc = caseio.parse_native(text)
        else:
            raise HTTPException(status_code=400, detail=f"unknown format {format!r}")
        snapshot = service.store.replace(doc)
        return envelope({"imported": len(doc.elements)}, version=snapshot.version)

    @app.post("/elements", status_code=201)
    def post_element(body: dict = Body(...)) -> dict:
        expected = body.pop("expected_version", None)
        element = _element_from_payload(body)
        snapshot = service.store.commit(
            CaseDelta(add_elements=[element]), expected_version=expected
        )
        return envelope({"id": element.id}, version=snapshot.version)

    @app.post("/edges", status_code=201)
    def post_edge(body: dict = Body(...)) -> dict:
        expected = body.pop("expected_version", None)
        rel = _relationship_from_payload(body)
        snapshot = service.store.commit(
            CaseDelta(add_relationships=[rel]), expected_version=expected
        )
        return envelope({"id": rel.id}, version=snapshot.version)

    @app.delete("/elements/{element_id}")
    def delete_element(element_id: str, expected_version: int | None = Query(default=None)) -> dict:
        snapshot = service.store.commit(
            CaseDelta(remove_ids=[element_id]), expected_version=expected_version
        )
        return envelope({"removed": element_id}, version=snapshot.version)

    @app.post("/infer")
    def infer(body: dict | None = Body(default=None)) -> dict:
        body = body or {}
        config = None
        if body.get("config"):
            cfg = body["config"]
            config = InferenceConfig(
                enabled_rules=frozenset(cfg.get("enabled_rules", [f"R{i}" for i in range(1, 14)])),
                iteration_cap=cfg.get("iteration_cap"),
                strict=bool(cfg.get("strict", False)),
            )
        result, _settled = service.settle(config)
        return envelope(result.as_dict(), version=service.store.version)

    @app.get("/queries")
    def queries() -> dict:
        return envelope(list_queries())

    @app.post("/queries/{cq_id}")
    def run_query(cq_id: str, body: dict | None = Body(default=None)) -> dict:
        params = (body or {}).get("params", {})
        rows = run_cq(service.settled_snapshot(), cq_id, params)
        return envelope(rows)

    @app.post("/selector")
    async def run_selector(request: Request) -> dict:
        raw = (await request.body()).decode("utf-8")
        if raw.lstrip().startswith("{"):
            raw = json.loads(raw).get("selector", "")
        selector = parse_selector(raw)
        snapshot = service.settled_snapshot()
        return envelope(_selector_rows(snapshot, eval_selector(snapshot, selector)))

    @app.post("/hooks", status_code=201)
    def post_hook(body: dict = Body(...)) -> dict:
        hook = Hook.from_dict(body)
        service.hooks.register_hook(hook)
        return envelope({"id": hook.id})

    @app.post("/tick")
    def tick(body: dict = Body(...)) -> dict:
        if "now" not in body:
            raise MissingParameter("tick", "now")
        report = service.hooks.fire_tick(body["now"])
        return envelope(report.as_dict(), version=service.store.version)

    @app.post("/whatif/invalidate")
    def whatif(body: dict = Body(...)) -> dict:
        selector = body.get("selector")
        if not selector:
            raise MissingParameter("whatif", "selector")
        report = whatif_invalidate(service.store.snapshot(), selector)
        return envelope(report.as_dict(), version=service.store.version)

    @app.post("/templates/{template_id}/instantiate")
    def instantiate(template_id: str, body: dict = Body(...)) -> dict:
        bindings = body.get("bindings", {})
        outcome = instantiate_template(service.store.snapshot(), template_id, bindings)
        if not outcome.delta.is_empty():
            service.store.commit(outcome.delta)
        return envelope(outcome.as_dict(), version=service.store.version)

    @app.get("/overlays")
    def overlays() -> dict:
        result, _ = service.settle()
        return envelope({name: sorted(ids) for name, ids in result.overlays.items()})

    @app.post("/classify")
    async def classify(request: Request) -> dict:
        text = (await request.body()).decode("utf-8")
        return envelope({"operation": classify_operation(text)})

    return app


def app_from_env() -> FastAPI:
    path = os.environ.get("CASE_PATH")
    if not path:
        raise RuntimeError("CASE_PATH not set")
    doc = caseio.parse_native(open(path, encoding="utf-8").read())
    return create_app(CaseService.from_document(doc))
