"""Selector DSL and competency-question registry."""

from .selector import (
    And,
    ByKind,
    FlagIs,
    InContainer,
    LeafOf,
    Not,
    Or,
    PublishedBefore,
    Selector,
    StatementContains,
    Traverse,
    eval_selector,
    parse_selector,
    print_selector,
)
from .cq import REGISTRY, NamedQuery, ParamSpec, list_queries, run_cq

__all__ = [
    "And",
    "ByKind",
    "FlagIs",
    "InContainer",
    "LeafOf",
    "NamedQuery",
    "Not",
    "Or",
    "ParamSpec",
    "PublishedBefore",
    "REGISTRY",
    "Selector",
    "StatementContains",
    "Traverse",
    "eval_selector",
    "list_queries",
    "parse_selector",
    "print_selector",
    "run_cq",
]
