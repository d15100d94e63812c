"""Hierarchical task knowledge: action schemas, the knowledge base, grounding.

Tasks are named schemas whose bodies are ordered steps over previously known
actions; primitives have no body. Because a schema may only reference actions
that already existed when it was added, bodies always form a DAG and
expansion to primitive calls terminates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterator, Mapping

from .errors import (
    ArityMismatch,
    DanglingReference,
    DuplicateName,
    MalformedDocument,
    UnboundVariable,
)

PRIMITIVE = "primitive"
LEARNED = "learned"


@dataclass(frozen=True)
class Var:
    """A parameter slot, named by the enclosing schema."""

    name: str


@dataclass(frozen=True)
class Const:
    """A concrete world-object reference frozen into a body at learning time."""

    ref: str


Term = Var | Const


@dataclass(frozen=True)
class Step:
    """One body entry: an action name applied to ordered terms."""

    action: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class ActionSchema:
    """A named task with ordered parameter slots and (for learned tasks) a body."""

    name: str
    params: tuple[str, ...]
    kind: str  # PRIMITIVE or LEARNED
    body: tuple[Step, ...] = ()
    source_text: str = ""

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class PrimitiveCall:
    """A fully ground call to a primitive action."""

    action: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable ordered collection of schemas; updates return new values."""

    schemas: tuple[ActionSchema, ...] = ()

    def get(self, name: str) -> ActionSchema | None:
        for schema in self.schemas:
            if schema.name == name:
                return schema
        return None

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def __iter__(self) -> Iterator[ActionSchema]:
        return iter(self.schemas)

    def names(self) -> list[str]:
        return [schema.name for schema in self.schemas]


def _check_schema(kb: KnowledgeBase, schema: ActionSchema) -> None:
    if not schema.name or not schema.name.replace("_", "").isalnum():
        raise MalformedDocument(f"invalid schema name {schema.name!r}")
    if schema.name in kb:
        raise DuplicateName(schema.name)
    if len(set(schema.params)) != len(schema.params):
        raise MalformedDocument(f"{schema.name}: duplicate parameter names")
    if schema.kind == PRIMITIVE:
        if schema.body:
            raise MalformedDocument(f"{schema.name}: primitive schemas have no body")
        return
    if schema.kind != LEARNED:
        raise MalformedDocument(f"{schema.name}: unknown kind {schema.kind!r}")
    if not schema.body:
        raise MalformedDocument(f"{schema.name}: learned schemas need a non-empty body")
    declared = set(schema.params)
    for index, step in enumerate(schema.body):
        target = kb.get(step.action)
        if target is None:
            raise DanglingReference(step.action)
        if len(step.args) != target.arity:
            raise ArityMismatch(
                f"{schema.name} step {index}: {step.action} takes "
                f"{target.arity} args, got {len(step.args)}",
                step_index=index,
            )
        for term in step.args:
            if isinstance(term, Var) and term.name not in declared:
                raise UnboundVariable(
                    f"{schema.name} step {index}: undeclared variable {term.name!r}"
                )


def add_schema(kb: KnowledgeBase, schema: ActionSchema) -> KnowledgeBase:
    """Return a new knowledge base with ``schema`` appended.

    Rejects duplicate names, references to unknown actions, arity mismatches,
    and undeclared variables, so every stored body is expandable by
    construction.
    """
    _check_schema(kb, schema)
    return KnowledgeBase(schemas=kb.schemas + (schema,))


def unique_name(kb: KnowledgeBase, base: str) -> str:
    """Return ``base`` if unused, else the first free of base2, base3, ..."""
    if not base:
        raise MalformedDocument("empty base name")
    if base not in kb:
        return base
    suffix = 2
    while f"{base}{suffix}" in kb:
        suffix += 1
    return f"{base}{suffix}"


def expand(
    kb: KnowledgeBase, step: Step, binding: Mapping[str, str] | None = None
) -> list[PrimitiveCall]:
    """Ground ``step`` into its left-to-right depth-first primitive leaves."""
    binding = dict(binding or {})
    schema = kb.get(step.action)
    if schema is None:
        raise DanglingReference(step.action)
    resolved: list[str] = []
    for term in step.args:
        if isinstance(term, Const):
            resolved.append(term.ref)
        else:
            if term.name not in binding:
                raise UnboundVariable(term.name)
            resolved.append(binding[term.name])
    if len(resolved) != schema.arity:
        raise ArityMismatch(
            f"{step.action} takes {schema.arity} args, got {len(resolved)}"
        )
    if schema.kind == PRIMITIVE:
        return [PrimitiveCall(action=schema.name, args=tuple(resolved))]
    inner = dict(zip(schema.params, resolved))
    calls: list[PrimitiveCall] = []
    for child in schema.body:
        calls.extend(expand(kb, child, inner))
    return calls


def _term_to_doc(term: Term) -> dict[str, str]:
    if isinstance(term, Var):
        return {"var": term.name}
    return {"const": term.ref}


def _term_from_doc(doc: Any) -> Term:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise MalformedDocument(f"bad term {doc!r}")
    if "var" in doc:
        return Var(name=str(doc["var"]))
    if "const" in doc:
        return Const(ref=str(doc["const"]))
    raise MalformedDocument(f"bad term {doc!r}")


def to_document(kb: KnowledgeBase) -> dict[str, Any]:
    """Render the knowledge base as a JSON-safe document, insertion-ordered."""
    return {
        "schemas": [
            {
                "name": schema.name,
                "kind": schema.kind,
                "params": list(schema.params),
                "body": [
                    {
                        "action": step.action,
                        "args": [_term_to_doc(term) for term in step.args],
                    }
                    for step in schema.body
                ],
                "source_text": schema.source_text,
            }
            for schema in kb.schemas
        ]
    }


def from_document(doc: Any) -> KnowledgeBase:
    """Rebuild a knowledge base, re-validating every invariant on the way in."""
    if not isinstance(doc, dict) or not isinstance(doc.get("schemas"), list):
        raise MalformedDocument("expected {'schemas': [...]}")
    kb = KnowledgeBase()
    for entry in doc["schemas"]:
        if not isinstance(entry, dict):
            raise MalformedDocument(f"bad schema entry {entry!r}")
        try:
            schema = ActionSchema(
                name=str(entry["name"]),
                params=tuple(str(p) for p in entry.get("params", [])),
                kind=str(entry.get("kind", LEARNED)),
                body=tuple(
                    Step(
                        action=str(step["action"]),
                        args=tuple(_term_from_doc(t) for t in step.get("args", [])),
                    )
                    for step in entry.get("body", [])
                ),
                source_text=str(entry.get("source_text", "")),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedDocument(f"bad schema entry {entry!r}") from exc
        try:
            kb = add_schema(kb, schema)
        except (DuplicateName, DanglingReference, ArityMismatch, UnboundVariable) as exc:
            raise MalformedDocument(str(exc)) from exc
    return kb


def serialize_kb(kb: KnowledgeBase) -> str:
    """JSON-encode with a stable field order for golden-file comparisons."""
    return json.dumps(to_document(kb), indent=2, sort_keys=False)


def deserialize_kb(text: str) -> KnowledgeBase:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    return from_document(doc)
