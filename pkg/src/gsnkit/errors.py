"""Exception types shared across the package."""

from __future__ import annotations


class GsnError(Exception):
    """Base class for all gsnkit errors."""


# --- construction / model ---------------------------------------------------


class DuplicateIdentifier(GsnError):
    def __init__(self, record_id: str):
        super().__init__(f"identifier already in use: {record_id!r}")
        self.record_id = record_id


class EmptyStatement(GsnError):
    def __init__(self, record_id: str):
        super().__init__(f"element {record_id!r} has an empty statement")
        self.record_id = record_id


class UnknownEndpoint(GsnError):
    def __init__(self, record_id: str):
        super().__init__(f"edge endpoint does not resolve: {record_id!r}")
        self.record_id = record_id


class UnknownPredicate(GsnError):
    def __init__(self, name: str):
        super().__init__(f"predicate outside the closed vocabulary: {name!r}")
        self.name = name


class DuplicateTriple(GsnError):
    def __init__(self, subject: str, predicate: str, obj: str):
        super().__init__(f"triple already asserted: ({subject}, {predicate}, {obj})")
        self.triple = (subject, predicate, obj)


class UnknownKind(GsnError):
    def __init__(self, kind: str):
        super().__init__(f"unknown node or container kind: {kind!r}")
        self.kind = kind


# --- parsing ----------------------------------------------------------------


class ParseError(GsnError):
    """Syntax error in a document or selector, with position information."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = "" if line is None else f" at line {line}" + ("" if col is None else f", col {col}")
        super().__init__(message + loc)
        self.line = line
        self.col = col


class DanglingReference(GsnError):
    def __init__(self, record_id: str):
        super().__init__(f"reference to undeclared record: {record_id!r}")
        self.record_id = record_id


class UnknownPredicateIRI(GsnError):
    def __init__(self, iri: str):
        super().__init__(f"predicate IRI outside vocabulary and declared prefixes: {iri!r}")
        self.iri = iri


class BadLiteralType(GsnError):
    def __init__(self, message: str):
        super().__init__(message)


# --- inference --------------------------------------------------------------


class NonTermination(GsnError):
    """Engine guard tripped: the fixpoint failed to settle under the iteration
    cap. Signals an engine bug, not a user error."""

    def __init__(self, iterations: int, cap: int):
        super().__init__(f"fixpoint did not converge after {iterations} iterations (cap {cap})")
        self.iterations = iterations
        self.cap = cap


class NotDerived(GsnError):
    def __init__(self, record_id: str, flag: str):
        super().__init__(f"flag {flag!r} on {record_id!r} was not derived by a rule")
        self.record_id = record_id
        self.flag = flag


class OracleSizeExceeded(GsnError):
    def __init__(self, records: int, guard: int):
        super().__init__(f"naive oracle limited to {guard} records, got {records}")


class DiagnosticsAsErrors(GsnError):
    """Raised in strict mode when an inference run emits diagnostics."""

    def __init__(self, diagnostics):
        super().__init__(f"{len(diagnostics)} diagnostic(s) in strict mode")
        self.diagnostics = list(diagnostics)


# --- queries ----------------------------------------------------------------


class UnknownQuery(GsnError):
    def __init__(self, query_id: str):
        super().__init__(f"no registered query with id {query_id!r}")
        self.query_id = query_id


class MissingParameter(GsnError):
    def __init__(self, query_id: str, name: str):
        super().__init__(f"query {query_id!r} requires parameter {name!r}")
        self.query_id = query_id
        self.name = name


# --- hooks / templates ------------------------------------------------------


class InvalidSelector(GsnError):
    def __init__(self, message: str):
        super().__init__(message)


class ActionTargetEmpty(GsnError):
    def __init__(self, what: str):
        super().__init__(f"action target selector matched nothing: {what}")


class UnknownTemplate(GsnError):
    def __init__(self, template_id: str):
        super().__init__(f"no template container with id {template_id!r}")
        self.template_id = template_id


class UnboundPlaceholder(GsnError):
    def __init__(self, placeholder: str):
        super().__init__(f"no binding supplied for placeholder {{{placeholder}}}")
        self.placeholder = placeholder


class PreconditionFailed(GsnError):
    def __init__(self, message: str):
        super().__init__(message)


# --- service ----------------------------------------------------------------


class Unparseable(GsnError):
    def __init__(self, message: str):
        super().__init__(message)


class StaleVersion(GsnError):
    def __init__(self, expected: int, actual: int):
        super().__init__(f"expected snapshot version {expected}, store is at {actual}")
        self.expected = expected
        self.actual = actual
