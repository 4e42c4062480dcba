"""Selector mini-DSL: parsing, printing and evaluation.

Grammar (single precedence level, left-associative; a ``/`` traversal
applies to everything accumulated so far at the current nesting level, so
``kind:Defeater & statement~"jailbreak" / challenges->`` traverses from the
matching defeaters)::

    selector := term (('&'|'|') term)*
    term     := 'kind:'KIND | 'statement~'STRING | 'published<'TIMESTAMP
              | '!'term | '('selector')' | term '/' PRED ('->'|'<-') ['+']

The AST is a superset of the grammar: FlagIs, LeafOf and InContainer exist
only programmatically (the printer rejects them), and a Traverse without a
source draws from the whole record universe.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from ..errors import InvalidSelector, ParseError
from ..model import ElementKind, ContainerKind, Predicate, format_timestamp, parse_timestamp
from ..store import Snapshot

DEFEATER_KIND = "Defeater"

_KIND_NAMES = (
    {k.value for k in ElementKind} | {k.value for k in ContainerKind} | {DEFEATER_KIND}
)


class Selector:
    """Base class; selectors evaluate to id-sets over one snapshot."""


@dataclass(frozen=True)
class ByKind(Selector):
    kind: str

    def __post_init__(self):
        if self.kind not in _KIND_NAMES:
            raise InvalidSelector(f"unknown kind {self.kind!r}")


@dataclass(frozen=True)
class StatementContains(Selector):
    text: str  # case-insensitive substring over statements and names


@dataclass(frozen=True)
class PublishedBefore(Selector):
    cutoff: datetime


@dataclass(frozen=True)
class Not(Selector):
    inner: Selector


@dataclass(frozen=True)
class And(Selector):
    items: tuple[Selector, ...]


@dataclass(frozen=True)
class Or(Selector):
    items: tuple[Selector, ...]


@dataclass(frozen=True)
class Traverse(Selector):
    source: Selector | None  # None draws from the whole universe
    predicate: Predicate
    direction: str  # "out" follows subject->object, "in" the reverse
    transitive: bool = False


@dataclass(frozen=True)
class FlagIs(Selector):
    flag: str
    value: bool


@dataclass(frozen=True)
class LeafOf(Selector):
    container_id: str  # contains-closure members with no contains-children


@dataclass(frozen=True)
class InContainer(Selector):
    container_id: str
    transitive: bool = True


# --- parsing -------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<kind>kind:(?P<kindname>[A-Za-z]*))
  | (?P<stmt>statement~(?P<str>"(?:\\.|[^"\\])*")?)
  | (?P<pub>published<(?P<ts>[0-9TZ:+.\-]*))
  | (?P<trav>/\s*(?P<pred>[A-Za-z]+)\s*(?P<dir>->|<-)\s*(?P<plus>\+)?)
  | (?P<punct>[!()&|])
    """,
    re.VERBOSE,
)


def _unescape(raw: str) -> str:
    return raw[1:-1].replace('\\"', '"').replace("\\\\", "\\")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", col=pos)
        kind = m.lastgroup if m.lastgroup != "kindname" else "kind"
        if kind == "ws":
            pos = m.end()
            continue
        if m.group("kind") is not None:
            name = m.group("kindname")
            if not name:
                raise ParseError("kind: requires a kind name", col=pos)
            tokens.append(("kind", name, pos))
        elif m.group("stmt") is not None:
            raw = m.group("str")
            if raw is None:
                raise ParseError("statement~ requires a quoted string", col=pos)
            tokens.append(("stmt", _unescape(raw), pos))
        elif m.group("pub") is not None:
            ts = m.group("ts")
            if not ts:
                raise ParseError("published< requires a timestamp", col=pos)
            try:
                tokens.append(("pub", parse_timestamp(ts), pos))
            except ValueError:
                raise ParseError(f"bad timestamp {ts!r}", col=pos) from None
        elif m.group("trav") is not None:
            tokens.append(
                ("trav", (m.group("pred"), m.group("dir"), bool(m.group("plus"))), pos)
            )
        else:
            tokens.append((m.group("punct"), m.group("punct"), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, object, int]], length: int):
        self.tokens = tokens
        self.i = 0
        self.length = length

    def peek(self) -> tuple[str, object, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, object, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of selector", col=self.length)
        self.i += 1
        return tok

    def parse_selector(self) -> Selector:
        acc = self._apply_traversals(self.parse_term())
        while True:
            tok = self.peek()
            if tok is None or tok[0] not in ("&", "|"):
                break
            op = self.take()[0]
            rhs = self.parse_term()
            if op == "&":
                acc = And((acc, rhs)) if not isinstance(acc, And) else And(acc.items + (rhs,))
            else:
                acc = Or((acc, rhs)) if not isinstance(acc, Or) else Or(acc.items + (rhs,))
            acc = self._apply_traversals(acc)
        return acc

    def _apply_traversals(self, acc: Selector) -> Selector:
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "trav":
                return acc
            pred_name, direction, plus = self.take()[1]
            try:
                predicate = Predicate(pred_name)
            except ValueError:
                raise ParseError(f"unknown predicate {pred_name!r}", col=tok[2]) from None
            acc = Traverse(
                source=acc,
                predicate=predicate,
                direction="out" if direction == "->" else "in",
                transitive=plus,
            )

    def parse_term(self) -> Selector:
        tok = self.take()
        kind, value, pos = tok
        if kind == "kind":
            try:
                return ByKind(str(value))
            except InvalidSelector as exc:
                raise ParseError(str(exc), col=pos) from None
        if kind == "stmt":
            return StatementContains(str(value))
        if kind == "pub":
            return PublishedBefore(value)  # type: ignore[arg-type]
        if kind == "!":
            return Not(self.parse_term())
        if kind == "(":
            inner = self.parse_selector()
            closing = self.take()
            if closing[0] != ")":
                raise ParseError("expected ')'", col=closing[2])
            return inner
        raise ParseError(f"unexpected token {value!r}", col=pos)


def parse_selector(text: str) -> Selector:
    """Parse DSL text to a selector AST."""
    if not text.strip():
        raise ParseError("empty selector", col=0)
    parser = _Parser(_tokenize(text), len(text))
    sel = parser.parse_selector()
    trailing = parser.peek()
    if trailing is not None:
        raise ParseError(f"trailing input {trailing[1]!r}", col=trailing[2])
    return sel


def print_selector(sel: Selector) -> str:
    """Canonical DSL text for a parse-produced AST; AST-only nodes and
    universe traversals have no textual form and are rejected."""
    if isinstance(sel, ByKind):
        return f"kind:{sel.kind}"
    if isinstance(sel, StatementContains):
        escaped = sel.text.replace("\\", "\\\\").replace('"', '\\"')
        return f'statement~"{escaped}"'
    if isinstance(sel, PublishedBefore):
        return f"published<{format_timestamp(sel.cutoff)}"
    if isinstance(sel, Not):
        return "!" + _wrap(sel.inner)
    if isinstance(sel, And):
        return "(" + " & ".join(_wrap(i) for i in sel.items) + ")"
    if isinstance(sel, Or):
        return "(" + " | ".join(_wrap(i) for i in sel.items) + ")"
    if isinstance(sel, Traverse):
        if sel.source is None:
            raise InvalidSelector("universe traversal has no DSL form")
        arrow = "->" if sel.direction == "out" else "<-"
        return f"{_wrap(sel.source)} / {sel.predicate.value}{arrow}{'+' if sel.transitive else ''}"
    raise InvalidSelector(f"{type(sel).__name__} has no DSL form")


def _wrap(sel: Selector) -> str:
    """Parenthesize wherever the flat left-associative grammar would
    otherwise capture a suffix or operator differently."""
    text = print_selector(sel)
    if isinstance(sel, Traverse):
        return f"({text})"
    return text


# --- evaluation ------------------------------------------------------------------


def _universe(snapshot: Snapshot) -> set[str]:
    return set(snapshot.elements) | set(snapshot.containers)


def _edges(snapshot: Snapshot, predicate: Predicate) -> list[tuple[str, str]]:
    pairs = [
        (r.subject, r.object)
        for rid in snapshot.rel_by_predicate.get(predicate.value, [])
        for r in (snapshot.relationships[rid],)
    ]
    if predicate is Predicate.CONTAINS:
        # Authored membership counts as containment alongside explicit edges.
        for holder, members in snapshot.membership.items():
            pairs.extend((holder, m) for m in members)
    return pairs


def _kind_members(snapshot: Snapshot, kind: str) -> set[str]:
    if kind == DEFEATER_KIND:
        out = set()
        for rid in snapshot.rel_by_predicate.get(Predicate.CHALLENGES.value, []):
            subject = snapshot.relationships[rid].subject
            e = snapshot.elements.get(subject)
            if e is not None and e.kind in (ElementKind.GOAL, ElementKind.SOLUTION):
                out.add(subject)
        return out
    if kind == ElementKind.ARTEFACT_REFERENCE.value:
        out = set()
        for k in ("ArtefactReference", "Context", "Solution", "InstantiationDataReference"):
            out.update(snapshot.by_kind.get(k, []))
        return out
    return set(snapshot.by_kind.get(kind, []))


def eval_selector(snapshot: Snapshot, sel: Selector) -> list[str]:
    """Evaluate to a deterministic, id-sorted list. Read-only."""
    return sorted(_eval(snapshot, sel))


def _eval(snapshot: Snapshot, sel: Selector) -> set[str]:
    if isinstance(sel, ByKind):
        return _kind_members(snapshot, sel.kind)
    if isinstance(sel, StatementContains):
        needle = sel.text.lower()
        return {rid for rid, text in snapshot.statement_index.items() if needle in text}
    if isinstance(sel, PublishedBefore):
        return {
            eid
            for eid, e in snapshot.elements.items()
            if e.published is not None and e.published < sel.cutoff
        }
    if isinstance(sel, Not):
        return _universe(snapshot) - _eval(snapshot, sel.inner)
    if isinstance(sel, And):
        result: set[str] | None = None
        for item in sel.items:
            got = _eval(snapshot, item)
            result = got if result is None else result & got
        return result or set()
    if isinstance(sel, Or):
        result = set()
        for item in sel.items:
            result |= _eval(snapshot, item)
        return result
    if isinstance(sel, Traverse):
        current = _universe(snapshot) if sel.source is None else _eval(snapshot, sel.source)
        pairs = _edges(snapshot, sel.predicate)
        forward = sel.direction == "out"

        def hop(sources: set[str]) -> set[str]:
            if forward:
                return {o for s, o in pairs if s in sources}
            return {s for s, o in pairs if o in sources}

        if not sel.transitive:
            return hop(current)
        reached: set[str] = set()
        frontier = current
        while frontier:
            step = hop(frontier) - reached
            reached |= step
            frontier = step
        return reached
    if isinstance(sel, FlagIs):
        out = set()
        for rid, e in snapshot.elements.items():
            if e.flags.get(sel.flag) == sel.value:
                out.add(rid)
        for rid, c in snapshot.containers.items():
            if c.flags.get(sel.flag) == sel.value:
                out.add(rid)
        return out
    if isinstance(sel, LeafOf):
        closure = snapshot.members_closure(sel.container_id)
        return {m for m in closure if not snapshot.membership.get(m)}
    if isinstance(sel, InContainer):
        if sel.transitive:
            return set(snapshot.members_closure(sel.container_id))
        return set(snapshot.membership.get(sel.container_id, ()))
    raise InvalidSelector(f"cannot evaluate {type(sel).__name__}")
