"""Parsing and serialization of assurance cases.

Two formats:

* native ``.gsn.json``: the primary authoring/persistence format. Its
  canonical form (records sorted by id, fixed key order, two-space indent)
  is a fixed point of ``parse_native`` then ``serialize_native``.
* interchange ``.ttl``: a small Turtle subset bound to the published GSN
  vocabulary namespace: prefix declarations, ``a``, ``;``-lists, IRIs and
  quoted literals with optional datatype. Reified relationships are emitted
  as subject nodes typed ``gsn:Relationship`` with rdf-style component links.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import (
    BadLiteralType,
    DanglingReference,
    ParseError,
    UnknownKind,
    UnknownPredicateIRI,
)
from .model import (
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
    ViewType,
    VOCABULARY_NAMESPACE,
    format_timestamp,
    parse_timestamp,
)

FORMAT_VERSION = "1.0"

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
SCHEMA_NS = "https://schema.org/"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
CASE_NS = "urn:gsn:case:"


@dataclass
class CaseDocument:
    """Fully resolved in-memory form of a case file."""

    case: Container
    elements: list[Element] = field(default_factory=list)
    relationships: list[Relationship] = field(default_factory=list)
    containers: list[Container] = field(default_factory=list)
    format_version: str = FORMAT_VERSION

    def record_ids(self) -> set[str]:
        ids = {self.case.id}
        ids.update(e.id for e in self.elements)
        ids.update(r.id for r in self.relationships)
        ids.update(c.id for c in self.containers)
        return ids

    def validate_references(self) -> None:
        ids = self.record_ids()
        for rel in self.relationships:
            for endpoint in (rel.subject, rel.object):
                if endpoint not in ids:
                    raise DanglingReference(endpoint)
            if rel.confidence_argument is not None and rel.confidence_argument not in ids:
                raise DanglingReference(rel.confidence_argument)
        for container in [self.case, *self.containers]:
            for member in container.members:
                if member not in ids:
                    raise DanglingReference(member)
            if container.instantiation_data is not None and container.instantiation_data not in ids:
                raise DanglingReference(container.instantiation_data)


# --- native format -----------------------------------------------------------


def _element_to_dict(e: Element) -> dict:
    out: dict = {"id": e.id, "kind": e.kind.value, "statement": e.statement}
    flags = e.flags.as_dict()
    if flags:
        out["flags"] = {k: flags[k] for k in sorted(flags)}
    if e.published is not None:
        out["published"] = format_timestamp(e.published)
    if e.away_target is not None:
        out["away_target"] = {"element": e.away_target.element, "module": e.away_target.module}
    if e.module is not None:
        out["module"] = e.module
    if e.metadata:
        out["metadata"] = {k: e.metadata[k] for k in sorted(e.metadata)}
    return out


def _element_from_dict(raw: dict) -> Element:
    try:
        kind = ElementKind(raw["kind"])
    except ValueError:
        raise UnknownKind(str(raw.get("kind"))) from None
    except KeyError:
        raise ParseError(f"element record missing 'kind': {raw.get('id')!r}") from None
    if not raw.get("id"):
        raise ParseError("element record missing 'id'")
    if not raw.get("statement"):
        raise ParseError(f"element {raw['id']!r} missing 'statement'")
    away = raw.get("away_target")
    return Element(
        id=raw["id"],
        kind=kind,
        statement=raw["statement"],
        flags=FlagSet.from_dict(raw.get("flags", {})),
        published=parse_timestamp(raw["published"]) if raw.get("published") else None,
        away_target=AwayTarget(away["element"], away["module"]) if away else None,
        module=raw.get("module"),
        metadata=dict(raw.get("metadata", {})),
    )


def _relationship_to_dict(r: Relationship) -> dict:
    out: dict = {
        "id": r.id,
        "subject": r.subject,
        "predicate": r.predicate.value,
        "object": r.object,
    }
    if r.valid is not None:
        out["valid"] = r.valid
    if r.in_doubt:
        out["inDoubt"] = True
    if r.multiplicity is not None:
        m: dict = {"indicator": r.multiplicity.indicator.value, "min": r.multiplicity.min_count}
        if r.multiplicity.max_count is not None:
            m["max"] = r.multiplicity.max_count
        if r.multiplicity.group is not None:
            m["group"] = r.multiplicity.group
        out["multiplicity"] = m
    if r.acp is not None:
        out["acp"] = r.acp
        out["confidence_argument"] = r.confidence_argument
    return out


def _relationship_from_dict(raw: dict) -> Relationship:
    try:
        predicate = Predicate(raw["predicate"])
    except ValueError:
        raise UnknownKind(str(raw.get("predicate"))) from None
    except KeyError:
        raise ParseError(f"relationship record missing 'predicate': {raw.get('id')!r}") from None
    mult = None
    if "multiplicity" in raw:
        m = raw["multiplicity"]
        mult = Multiplicity(
            indicator=Indicator(m["indicator"]),
            min_count=int(m.get("min", 0)),
            max_count=int(m["max"]) if "max" in m else None,
            group=m.get("group"),
        )
    for key in ("id", "subject", "object"):
        if not raw.get(key):
            raise ParseError(f"relationship record missing {key!r}")
    return Relationship(
        id=raw["id"],
        subject=raw["subject"],
        predicate=predicate,
        object=raw["object"],
        valid=raw.get("valid"),
        in_doubt=bool(raw.get("inDoubt", False)),
        multiplicity=mult,
        acp=raw.get("acp"),
        confidence_argument=raw.get("confidence_argument"),
    )


def _container_to_dict(c: Container) -> dict:
    out: dict = {"id": c.id, "kind": c.kind.value}
    if c.name:
        out["name"] = c.name
    if c.view_type is not None:
        out["viewType"] = c.view_type.value
    if c.members:
        out["members"] = sorted(c.members)
    flags = c.flags.as_dict()
    if flags:
        out["flags"] = {k: flags[k] for k in sorted(flags)}
    if c.instantiation_data is not None:
        out["instantiation_data"] = c.instantiation_data
    if c.artefact_uri is not None:
        out["artefact_uri"] = c.artefact_uri
    return out


def _container_from_dict(raw: dict) -> Container:
    try:
        kind = ContainerKind(raw["kind"])
    except ValueError:
        raise UnknownKind(str(raw.get("kind"))) from None
    except KeyError:
        raise ParseError(f"container record missing 'kind': {raw.get('id')!r}") from None
    if not raw.get("id"):
        raise ParseError("container record missing 'id'")
    return Container(
        id=raw["id"],
        kind=kind,
        name=raw.get("name", ""),
        view_type=ViewType(raw["viewType"]) if raw.get("viewType") else None,
        members=tuple(sorted(raw.get("members", []))),
        flags=FlagSet.from_dict(raw.get("flags", {})),
        instantiation_data=raw.get("instantiation_data"),
        artefact_uri=raw.get("artefact_uri"),
    )


def parse_native(text: str) -> CaseDocument:
    """Parse the native JSON format; unresolved references are errors."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise ParseError("top level must be a JSON object")
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unrecognized format_version: {version!r}")
    if "case" not in raw:
        raise ParseError("document missing 'case'")
    doc = CaseDocument(
        case=_container_from_dict(raw["case"]),
        elements=[_element_from_dict(e) for e in raw.get("elements", [])],
        relationships=[_relationship_from_dict(r) for r in raw.get("relationships", [])],
        containers=[_container_from_dict(c) for c in raw.get("containers", [])],
        format_version=version,
    )
    if doc.case.kind is not ContainerKind.ASSURANCE_CASE:
        raise ParseError("'case' must be an AssuranceCase container")
    doc.validate_references()
    return doc


def serialize_native(doc: CaseDocument) -> str:
    """Canonical native form: records sorted by id, fixed key order,
    two-space indent, trailing newline."""
    payload = {
        "format_version": doc.format_version,
        "case": _container_to_dict(doc.case),
        "elements": [_element_to_dict(e) for e in sorted(doc.elements, key=lambda e: e.id)],
        "relationships": [
            _relationship_to_dict(r) for r in sorted(doc.relationships, key=lambda r: r.id)
        ],
        "containers": [_container_to_dict(c) for c in sorted(doc.containers, key=lambda c: c.id)],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


# --- interchange (Turtle subset) ----------------------------------------------

_PREFIXES_OUT = {
    "gsn": VOCABULARY_NAMESPACE,
    "rdf": RDF_NS,
    "schema": SCHEMA_NS,
    "xsd": XSD_NS,
    "": CASE_NS,
}

_ELEMENT_CLASS_IRIS = {VOCABULARY_NAMESPACE + k.value: k for k in ElementKind}
_CONTAINER_CLASS_IRIS = {VOCABULARY_NAMESPACE + k.value: k for k in ContainerKind}
_RELATIONSHIP_CLASS_IRIS = {
    VOCABULARY_NAMESPACE + "Relationship",
    VOCABULARY_NAMESPACE + "RelationshipWithConfidence",
}
_PREDICATE_IRIS = {VOCABULARY_NAMESPACE + p.value: p for p in Predicate}

_TRI_FLAG_PROPS = {"valid": "valid", "true": "truth"}
_BOOL_FLAG_PROPS = {
    "inDoubt": "inDoubt",
    "defeated": "defeated",
    "undeveloped": "undeveloped",
    "public": "public",
    "topLevel": "topLevel",
    "final": "final",
    "uninstantiated": "uninstantiated",
}


def _esc(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _unesc(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _lit(value: str, datatype: str | None = None) -> str:
    base = f'"{_esc(value)}"'
    return base if datatype is None else f"{base}^^xsd:{datatype}"


def _bool_lit(value: bool) -> str:
    return _lit("true" if value else "false", "boolean")


def _flag_lines(flags: FlagSet) -> list[str]:
    lines = []
    if flags.valid is not None:
        lines.append(f"gsn:valid {_bool_lit(flags.valid)}")
    if flags.truth is not None:
        lines.append(f"gsn:true {_bool_lit(flags.truth)}")
    for prop, name in _BOOL_FLAG_PROPS.items():
        attr = {"inDoubt": "in_doubt", "topLevel": "top_level"}.get(name, name)
        if getattr(flags, attr):
            lines.append(f"gsn:{prop} {_bool_lit(True)}")
    return lines


def serialize_interchange(doc: CaseDocument) -> str:
    """Emit one triple block per record, sorted by id, under the vocabulary
    prefix header. Unset tri-state flags produce no triples."""
    out = [f"@prefix {p or ''}: <{iri}> ." for p, iri in _PREFIXES_OUT.items()]
    out.append("")

    def block(subject: str, lines: list[str]) -> None:
        out.append(f":{subject} " + lines[0] + (" ;" if len(lines) > 1 else " ."))
        for i, line in enumerate(lines[1:], start=2):
            out.append("    " + line + (" ;" if i < len(lines) else " ."))
        out.append("")

    def container_lines(c: Container) -> list[str]:
        lines = [f"a gsn:{c.kind.value}", f'schema:identifier {_lit(c.id)}']
        if c.name:
            lines.append(f"schema:name {_lit(c.name)}")
        if c.view_type is not None:
            lines.append(f"gsn:viewType {_lit(c.view_type.value)}")
        lines.extend(_flag_lines(c.flags))
        for member in sorted(c.members):
            lines.append(f"gsn:contains :{member}")
        if c.instantiation_data is not None:
            lines.append(f"gsn:instantiationData :{c.instantiation_data}")
        if c.artefact_uri is not None:
            lines.append(f"gsn:artefactLocator {_lit(c.artefact_uri)}")
        return lines

    for container in sorted([doc.case, *doc.containers], key=lambda c: c.id):
        block(container.id, container_lines(container))

    for e in sorted(doc.elements, key=lambda e: e.id):
        lines = [f"a gsn:{e.kind.value}", f"schema:identifier {_lit(e.id)}"]
        lines.append(f"gsn:statement {_lit(e.statement)}")
        lines.extend(_flag_lines(e.flags))
        if e.published is not None:
            lines.append(f"gsn:published {_lit(format_timestamp(e.published), 'dateTime')}")
        if e.away_target is not None:
            lines.append(f"gsn:awayElement :{e.away_target.element}")
            lines.append(f"gsn:awayModule :{e.away_target.module}")
        if e.module is not None:
            lines.append(f"gsn:module :{e.module}")
        if e.metadata:
            meta = json.dumps({k: e.metadata[k] for k in sorted(e.metadata)}, ensure_ascii=False)
            lines.append(f"gsn:metadata {_lit(meta)}")
        block(e.id, lines)

    for r in sorted(doc.relationships, key=lambda r: r.id):
        cls = "RelationshipWithConfidence" if r.with_confidence else "Relationship"
        lines = [
            f"a gsn:{cls}",
            f"schema:identifier {_lit(r.id)}",
            f"rdf:subject :{r.subject}",
            f"rdf:predicate gsn:{r.predicate.value}",
            f"rdf:object :{r.object}",
        ]
        if r.valid is not None:
            lines.append(f"gsn:valid {_bool_lit(r.valid)}")
        if r.in_doubt:
            lines.append(f"gsn:inDoubt {_bool_lit(True)}")
        if r.multiplicity is not None:
            m = r.multiplicity
            lines.append(f"gsn:indicator {_lit(m.indicator.value)}")
            lines.append(f"gsn:minCount {_lit(str(m.min_count), 'integer')}")
            if m.max_count is not None:
                lines.append(f"gsn:maxCount {_lit(str(m.max_count), 'integer')}")
            if m.group is not None:
                lines.append(f"gsn:choiceGroup {_lit(m.group)}")
        if r.acp is not None:
            lines.append(f"gsn:assuranceClaimPoint {_lit(r.acp)}")
            lines.append(f"gsn:confidenceArgument :{r.confidence_argument}")
        block(r.id, lines)

    return "\n".join(out).rstrip("\n") + "\n"


# Tokenizer for the Turtle subset.
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<at>@prefix)
  | (?P<iri><[^>]*>)
  | (?P<literal>"(?:\\.|[^"\\])*")
  | (?P<dtype>\^\^)
  | (?P<kw_a>\ba(?=[\s<]))
  | (?P<pname>(?:[A-Za-z_][\w-]*)?:(?:[\w-]+(?:\.[\w-]+)*)?)
  | (?P<punct>[;.,])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    type: str
    value: str
    line: int
    col: int


def _tokenize_ttl(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        raw = m.group(0)
        if kind not in ("ws", "comment", "newline"):
            tokens.append(_Token(kind, raw, line, col))
        if kind == "newline":
            line += 1
            col = 1
        else:
            col += len(raw)
        pos = m.end()
    return tokens


def _parse_turtle_triples(text: str) -> tuple[list[tuple[str, str, object]], dict[str, str]]:
    """Parse the subset into (subject-iri, predicate-iri, object) triples.

    Objects are either ('iri', full_iri) or ('lit', value, datatype_iri|None).
    """
    tokens = _tokenize_ttl(text)
    prefixes: dict[str, str] = {}
    triples: list[tuple[str, str, object]] = []
    i = 0

    def expand(tok: _Token) -> str:
        if tok.type == "iri":
            return tok.value[1:-1]
        if tok.type == "pname":
            prefix, _, local = tok.value.partition(":")
            if prefix not in prefixes:
                raise ParseError(f"undeclared prefix {prefix!r}", tok.line, tok.col)
            return prefixes[prefix] + local
        raise ParseError(f"expected IRI, got {tok.value!r}", tok.line, tok.col)

    def peek() -> _Token | None:
        return tokens[i] if i < len(tokens) else None

    while i < len(tokens):
        tok = tokens[i]
        if tok.type == "at":
            if i + 3 >= len(tokens):
                raise ParseError("truncated @prefix declaration", tok.line, tok.col)
            name_tok, iri_tok, dot = tokens[i + 1], tokens[i + 2], tokens[i + 3]
            if name_tok.type != "pname" or not name_tok.value.endswith(":"):
                raise ParseError("@prefix expects 'name:'", name_tok.line, name_tok.col)
            if iri_tok.type != "iri" or dot.value != ".":
                raise ParseError("malformed @prefix declaration", iri_tok.line, iri_tok.col)
            prefixes[name_tok.value[:-1]] = iri_tok.value[1:-1]
            i += 4
            continue
        # subject
        subject = expand(tok)
        i += 1
        while True:
            tok = peek()
            if tok is None:
                raise ParseError("unexpected end of input", 0, 0)
            # predicate
            if tok.type == "kw_a":
                predicate = RDF_NS + "type"
            else:
                predicate = expand(tok)
            i += 1
            tok = peek()
            if tok is None:
                raise ParseError("triple missing object", 0, 0)
            # object
            if tok.type == "literal":
                value = _unesc(tok.value[1:-1])
                i += 1
                datatype = None
                if peek() is not None and peek().type == "dtype":
                    i += 1
                    datatype = expand(tokens[i])
                    i += 1
                triples.append((subject, predicate, ("lit", value, datatype)))
            else:
                triples.append((subject, predicate, ("iri", expand(tok))))
                i += 1
            tok = peek()
            if tok is None or tok.type != "punct":
                where = tok or tokens[-1]
                raise ParseError("expected ';' or '.'", where.line, where.col)
            i += 1
            if tok.value == ".":
                break
            if tok.value != ";":
                raise ParseError(f"unsupported punctuation {tok.value!r}", tok.line, tok.col)
    return triples, prefixes


def _local(iri: str) -> str:
    if iri.startswith(CASE_NS):
        return iri[len(CASE_NS):]
    return iri.rsplit("#", 1)[-1].rsplit("/", 1)[-1]


def _expect_lit(obj: object, prop: str, datatype: str | None = None) -> str:
    if not (isinstance(obj, tuple) and obj[0] == "lit"):
        raise BadLiteralType(f"{prop} expects a literal value")
    if datatype is not None and obj[2] is not None and obj[2] != XSD_NS + datatype:
        raise BadLiteralType(f"{prop} expects an xsd:{datatype} literal, got {obj[2]}")
    return obj[1]


def _expect_bool(obj: object, prop: str) -> bool:
    raw = _expect_lit(obj, prop, "boolean")
    if raw not in ("true", "false"):
        raise BadLiteralType(f"{prop} expects 'true' or 'false', got {raw!r}")
    return raw == "true"


_KNOWN_PROPS = {
    "statement", "valid", "true", "inDoubt", "defeated", "undeveloped", "public",
    "topLevel", "final", "uninstantiated", "published", "awayElement", "awayModule",
    "module", "metadata", "contains", "viewType", "instantiationData",
    "artefactLocator", "indicator", "minCount", "maxCount", "choiceGroup",
    "assuranceClaimPoint", "confidenceArgument",
} | {p.value for p in Predicate}


def parse_interchange(text: str) -> CaseDocument:
    """Map interchange triples onto elements, relationships and containers."""
    triples, prefixes = _parse_turtle_triples(text)

    by_subject: dict[str, list[tuple[str, object]]] = {}
    order: list[str] = []
    for s, p, o in triples:
        if s not in by_subject:
            by_subject[s] = []
            order.append(s)
        by_subject[s].append((p, o))

    declared = set(prefixes.values())
    for s, props in by_subject.items():
        for p, _ in props:
            if p == RDF_NS + "type" or p in (RDF_NS + "subject", RDF_NS + "predicate", RDF_NS + "object"):
                continue
            if p == SCHEMA_NS + "identifier" or p == SCHEMA_NS + "name":
                continue
            if p.startswith(VOCABULARY_NAMESPACE):
                if p[len(VOCABULARY_NAMESPACE):] not in _KNOWN_PROPS:
                    raise UnknownPredicateIRI(p)
                continue
            if not any(p.startswith(ns) for ns in declared):
                raise UnknownPredicateIRI(p)
            raise UnknownPredicateIRI(p)

    elements: list[Element] = []
    relationships: list[Relationship] = []
    containers: list[Container] = []
    case: Container | None = None

    for subject in order:
        props = by_subject[subject]
        types = [o[1] for p, o in props if p == RDF_NS + "type" and o[0] == "iri"]
        if not types:
            raise ParseError(f"subject {subject!r} has no type triple")
        type_iri = types[0]
        sid = _local(subject)
        g = {p[len(VOCABULARY_NAMESPACE):]: o for p, o in props if p.startswith(VOCABULARY_NAMESPACE)}
        multi = [
            (p[len(VOCABULARY_NAMESPACE):], o)
            for p, o in props
            if p.startswith(VOCABULARY_NAMESPACE)
        ]

        def flagset() -> FlagSet:
            raw: dict[str, bool] = {}
            for prop, flag in _TRI_FLAG_PROPS.items():
                if prop in g:
                    raw[flag] = _expect_bool(g[prop], prop)
            for prop, flag in _BOOL_FLAG_PROPS.items():
                if prop in g:
                    raw[flag] = _expect_bool(g[prop], prop)
            return FlagSet.from_dict(raw)

        if type_iri in _ELEMENT_CLASS_IRIS:
            away = None
            if "awayElement" in g or "awayModule" in g:
                if not ("awayElement" in g and "awayModule" in g):
                    raise ParseError(f"{sid}: awayElement and awayModule must appear together")
                away = AwayTarget(_local(g["awayElement"][1]), _local(g["awayModule"][1]))
            metadata: dict[str, str] = {}
            if "metadata" in g:
                metadata = json.loads(_expect_lit(g["metadata"], "metadata"))
            elements.append(
                Element(
                    id=sid,
                    kind=_ELEMENT_CLASS_IRIS[type_iri],
                    statement=_expect_lit(g.get("statement"), "statement")
                    if "statement" in g
                    else _raise_missing(sid, "gsn:statement"),
                    flags=flagset(),
                    published=parse_timestamp(_expect_lit(g["published"], "published", "dateTime"))
                    if "published" in g
                    else None,
                    away_target=away,
                    module=_local(g["module"][1]) if "module" in g else None,
                    metadata=metadata,
                )
            )
        elif type_iri in _RELATIONSHIP_CLASS_IRIS:
            comp = {p: o for p, o in props if p.startswith(RDF_NS)}
            for part in ("subject", "predicate", "object"):
                if RDF_NS + part not in comp:
                    raise ParseError(f"relationship {sid!r} missing rdf:{part}")
            pred_iri = comp[RDF_NS + "predicate"][1]
            if pred_iri not in _PREDICATE_IRIS:
                raise UnknownPredicateIRI(pred_iri)
            mult = None
            if "indicator" in g:
                mult = Multiplicity(
                    indicator=Indicator(_expect_lit(g["indicator"], "indicator")),
                    min_count=int(_expect_lit(g["minCount"], "minCount", "integer"))
                    if "minCount" in g
                    else 0,
                    max_count=int(_expect_lit(g["maxCount"], "maxCount", "integer"))
                    if "maxCount" in g
                    else None,
                    group=_expect_lit(g["choiceGroup"], "choiceGroup") if "choiceGroup" in g else None,
                )
            relationships.append(
                Relationship(
                    id=sid,
                    subject=_local(comp[RDF_NS + "subject"][1]),
                    predicate=_PREDICATE_IRIS[pred_iri],
                    object=_local(comp[RDF_NS + "object"][1]),
                    valid=_expect_bool(g["valid"], "valid") if "valid" in g else None,
                    in_doubt=_expect_bool(g["inDoubt"], "inDoubt") if "inDoubt" in g else False,
                    multiplicity=mult,
                    acp=_expect_lit(g["assuranceClaimPoint"], "assuranceClaimPoint")
                    if "assuranceClaimPoint" in g
                    else None,
                    confidence_argument=_local(g["confidenceArgument"][1])
                    if "confidenceArgument" in g
                    else None,
                )
            )
        elif type_iri in _CONTAINER_CLASS_IRIS:
            name = ""
            for p, o in props:
                if p == SCHEMA_NS + "name":
                    name = _expect_lit(o, "schema:name")
            members = tuple(sorted(_local(o[1]) for prop, o in multi if prop == "contains"))
            container = Container(
                id=sid,
                kind=_CONTAINER_CLASS_IRIS[type_iri],
                name=name,
                view_type=ViewType(_expect_lit(g["viewType"], "viewType")) if "viewType" in g else None,
                members=members,
                flags=flagset(),
                instantiation_data=_local(g["instantiationData"][1])
                if "instantiationData" in g
                else None,
                artefact_uri=_expect_lit(g["artefactLocator"], "artefactLocator")
                if "artefactLocator" in g
                else None,
            )
            if container.kind is ContainerKind.ASSURANCE_CASE:
                if case is not None:
                    raise ParseError("more than one AssuranceCase container")
                case = container
            else:
                containers.append(container)
        else:
            raise UnknownKind(_local(type_iri))

    if case is None:
        raise ParseError("document has no AssuranceCase container")
    doc = CaseDocument(case=case, elements=elements, relationships=relationships, containers=containers)
    doc.validate_references()
    return doc


def _raise_missing(sid: str, what: str):
    raise ParseError(f"{sid}: missing {what}")
