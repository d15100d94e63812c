"""Strict structured-output parsing for backend responses.

Every subroutine asks the backend for a single JSON object. Parsing is
strict, with one lenient fallback: extracting the first balanced JSON object
substring from a chatty response. Anything else fails closed as malformed so
the dialog layer can degrade into a confirmation instead of crashing.
"""

from __future__ import annotations

import json
import re
from typing import Any

from ..errors import MalformedResponse

IDENTIFIER_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


def extract_json_object(text: str) -> dict[str, Any]:
    """Parse ``text`` as a JSON object, or pull the first {...} block out of it."""
    text = text.strip()
    try:
        value = json.loads(text)
        if isinstance(value, dict):
            return value
    except json.JSONDecodeError:
        pass
    start = text.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escape = False
        for index in range(start, len(text)):
            char = text[index]
            if in_string:
                if escape:
                    escape = False
                elif char == "\\":
                    escape = True
                elif char == '"':
                    in_string = False
                continue
            if char == '"':
                in_string = True
            elif char == "{":
                depth += 1
            elif char == "}":
                depth -= 1
                if depth == 0:
                    try:
                        value = json.loads(text[start : index + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(value, dict):
                        return value
                    break
        start = text.find("{", start + 1)
    raise MalformedResponse(f"no JSON object in response: {text[:120]!r}")


def _string_list(value: Any, field: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise MalformedResponse(f"{field} must be a list of strings")
    return [v.strip() for v in value]


def parse_segments(text: str) -> list[str]:
    doc = extract_json_object(text)
    steps = _string_list(doc.get("steps"), "steps")
    steps = [s for s in steps if s]
    if not steps:
        raise MalformedResponse("empty step list")
    return steps


def parse_mapping(text: str) -> str | None:
    doc = extract_json_object(text)
    if "action" not in doc:
        raise MalformedResponse("missing 'action'")
    action = doc["action"]
    if action is None or (isinstance(action, str) and action.lower() in ("", "none", "null")):
        return None
    if not isinstance(action, str):
        raise MalformedResponse("'action' must be a string or null")
    return action.strip()


def parse_grounding(text: str) -> list[str]:
    doc = extract_json_object(text)
    return _string_list(doc.get("args"), "args")


def parse_sentence(text: str) -> str:
    doc = extract_json_object(text)
    sentence = doc.get("sentence")
    if not isinstance(sentence, str) or not sentence.strip():
        raise MalformedResponse("missing 'sentence'")
    return sentence.strip()


def parse_paraphrase(text: str) -> bool:
    doc = extract_json_object(text)
    match = doc.get("match")
    if isinstance(match, bool):
        return match
    if isinstance(match, str) and match.lower() in ("true", "false", "yes", "no"):
        return match.lower() in ("true", "yes")
    raise MalformedResponse("missing boolean 'match'")


def sanitize_identifier(raw: str) -> str:
    """Squeeze arbitrary text into a lowerCamelCase identifier."""
    words = re.findall(r"[A-Za-z0-9]+", raw)
    while words and not words[0][0].isalpha():
        words.pop(0)
    if not words:
        raise MalformedResponse(f"no identifier in {raw!r}")
    head = words[0]
    head = head[0].lower() + head[1:]
    rest = [w[0].upper() + w[1:] for w in words[1:]]
    name = head + "".join(rest)
    if not IDENTIFIER_RE.match(name):
        raise MalformedResponse(f"no identifier in {raw!r}")
    return name


def parse_name(text: str) -> str:
    doc = extract_json_object(text)
    name = doc.get("name")
    if not isinstance(name, str) or not name.strip():
        raise MalformedResponse("missing 'name'")
    return sanitize_identifier(name)


def parse_generalization(text: str) -> list[str]:
    doc = extract_json_object(text)
    return _string_list(doc.get("generalize"), "generalize")
