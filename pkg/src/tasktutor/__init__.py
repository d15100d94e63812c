"""Interactive task learning: hierarchical task knowledge from teaching dialogs."""

from .dialog import DialogSession, SessionConfig
from .htn import (
    ActionSchema,
    Const,
    KnowledgeBase,
    PrimitiveCall,
    Step,
    Var,
    add_schema,
    deserialize_kb,
    expand,
    serialize_kb,
    unique_name,
)

__all__ = [
    "ActionSchema",
    "Const",
    "DialogSession",
    "KnowledgeBase",
    "PrimitiveCall",
    "SessionConfig",
    "Step",
    "Var",
    "add_schema",
    "deserialize_kb",
    "expand",
    "serialize_kb",
    "unique_name",
]
