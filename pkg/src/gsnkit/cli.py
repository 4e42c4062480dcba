"""Command-line frontend.

Subcommand results print the same JSON envelopes the HTTP service returns,
so scripted use of either surface is interchangeable. ``validate`` exits
non-zero when diagnostics are found.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import caseio
from .errors import GsnError, NotDerived
from .hooks import HookRegistry
from .inference import explain, run_fixpoint
from .model import check_completeness
from .queries import eval_selector, parse_selector, run_cq
from .queries.cq import _rows as selector_rows
from .service import CaseService
from .store import Snapshot, Store


def _read_document(path: str) -> caseio.CaseDocument:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".ttl"):
        return caseio.parse_interchange(text)
    return caseio.parse_native(text)


def _emit(data, version: int = 1) -> None:
    print(json.dumps({"version": version, "data": data}, indent=2, ensure_ascii=False))


def cmd_validate(args: argparse.Namespace) -> int:
    doc = _read_document(args.case)
    snapshot = Snapshot.from_document(doc)
    diagnostics = check_completeness(
        snapshot.case, snapshot.container_list, snapshot.elements, snapshot.containers
    )
    result = run_fixpoint(snapshot)
    diagnostics = diagnostics + result.diagnostics
    _emit([d.as_dict() for d in diagnostics], version=snapshot.version)
    return 1 if diagnostics else 0


def cmd_infer(args: argparse.Namespace) -> int:
    snapshot = Snapshot.from_document(_read_document(args.case))
    result = run_fixpoint(snapshot)
    if args.explain:
        record_id, _, flag = args.explain.partition(":")
        if not flag:
            print("--explain expects id:flag", file=sys.stderr)
            return 2
        try:
            steps = [s.as_dict() for s in explain(result, record_id, flag)]
        except NotDerived as exc:
            print(str(exc), file=sys.stderr)
            return 1
        _emit(steps, version=snapshot.version)
        return 0
    _emit(result.as_dict(), version=snapshot.version)
    return 0


def _settled(doc: caseio.CaseDocument):
    service = CaseService.from_document(doc)
    return service, service.settled_snapshot()


def cmd_query(args: argparse.Namespace) -> int:
    service, settled = _settled(_read_document(args.case))
    params = {}
    for pair in args.param or []:
        key, _, value = pair.partition("=")
        params[key] = value
    rows = run_cq(settled, args.cq, params)
    _emit(rows, version=service.store.version)
    return 0


def cmd_select(args: argparse.Namespace) -> int:
    service, settled = _settled(_read_document(args.case))
    selector = parse_selector(args.selector)
    _emit(selector_rows(settled, eval_selector(settled, selector)), version=service.store.version)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    doc = _read_document(args.case)
    if args.format == "ttl":
        sys.stdout.write(caseio.serialize_interchange(doc))
    else:
        sys.stdout.write(caseio.serialize_native(doc))
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    doc = _read_document(args.case)
    text = caseio.serialize_native(doc)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _emit({"imported": len(doc.elements), "out": args.out})
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    case_path = args.case or os.environ.get("CASE_PATH")
    if not case_path:
        print("serve requires --case or CASE_PATH", file=sys.stderr)
        return 2
    port = args.port or int(os.environ.get("PORT", "8000"))
    service = CaseService.from_document(_read_document(case_path))
    if args.hooks:
        service.hooks.load(args.hooks)
    app = create_app(service)
    if args.static:
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=args.static, html=True), name="workbench")
    uvicorn.run(app, host=args.host, port=port)
    return 0


def cmd_tick(args: argparse.Namespace) -> int:
    store = Store(Snapshot.from_document(_read_document(args.case)))
    registry = HookRegistry(store)
    count = registry.load(args.hooks)
    report = registry.fire_tick(args.now)
    payload = report.as_dict()
    payload["hooks_loaded"] = count
    if args.out:
        store.save(args.out)
        payload["out"] = args.out
    _emit(payload, version=store.version)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsnkit", description="GSN assurance-case engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="completeness and structural diagnostics (exit 1 if any)")
    p.add_argument("case")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("infer", help="run the rule engine over a case file")
    p.add_argument("case")
    p.add_argument("--explain", metavar="ID:FLAG", help="print the derivation trace of one flag")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("query", help="run a registered competency question")
    p.add_argument("case")
    p.add_argument("--cq", required=True, help="query id, e.g. AE-01")
    p.add_argument("--param", action="append", metavar="K=V")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("select", help="evaluate a selector expression")
    p.add_argument("case")
    p.add_argument("selector")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("export", help="print a case in the chosen format")
    p.add_argument("case")
    p.add_argument("--format", choices=("json", "ttl"), default="json")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="normalize any supported format to canonical native")
    p.add_argument("case")
    p.add_argument("--out")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--case")
    p.add_argument("--hooks")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="also mount a workbench build at /app")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("tick", help="fire time-triggered hooks at a given instant")
    p.add_argument("--case", required=True)
    p.add_argument("--hooks", required=True)
    p.add_argument("--now", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tick)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GsnError as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
