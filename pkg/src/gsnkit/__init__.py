"""gsnkit: an assurance-case engine for Goal Structuring Notation graphs."""

from .model import (
    AwayTarget,
    Case,
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
    edge_type_allowed,
)
from .store import CaseDelta, Overlay, Snapshot, Store, load, save
from .inference import InferenceConfig, InferenceResult, apply_result, explain, run_fixpoint
from .oracle import naive_oracle

__all__ = [
    "AwayTarget",
    "Case",
    "CaseDelta",
    "Container",
    "ContainerKind",
    "Element",
    "ElementKind",
    "FlagSet",
    "Indicator",
    "InferenceConfig",
    "InferenceResult",
    "Multiplicity",
    "Overlay",
    "Predicate",
    "Relationship",
    "Snapshot",
    "Store",
    "ViewType",
    "apply_result",
    "edge_type_allowed",
    "explain",
    "load",
    "naive_oracle",
    "run_fixpoint",
    "save",
]

__version__ = "0.1.0"
