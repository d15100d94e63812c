"""Backend abstraction: prompt documents, remote HTTP, scripted and replay backends.

A prompt document carries both rendered chat messages (for remote models) and
the structured payload that produced them (so the deterministic mock can
dispatch without parsing prose). Backends return raw text; parsing happens in
one shared place regardless of backend.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Protocol

import httpx

from ..errors import BadConfig, MalformedResponse

ENV_ENDPOINT = "TASKTUTOR_LM_ENDPOINT"
ENV_MODEL = "TASKTUTOR_LM_MODEL"
ENV_API_KEY = "TASKTUTOR_LM_API_KEY"


class LmBackend(Protocol):
    def complete(self, prompt: dict[str, Any]) -> str: ...


class PromptLibrary:
    """Versioned prompt templates loaded from a data file, not code."""

    def __init__(self, doc: dict[str, Any] | None = None) -> None:
        if doc is None:
            text = resources.files("tasktutor.data.prompts").joinpath("prompts.json").read_text()
            doc = json.loads(text)
        self.version: str = str(doc["version"])
        self._templates: dict[str, dict[str, str]] = doc["subroutines"]

    def render(self, subroutine: str, payload: dict[str, Any]) -> dict[str, Any]:
        template = self._templates[subroutine]
        fields = {
            key: json.dumps(value) if isinstance(value, (list, dict)) else str(value)
            for key, value in payload.items()
        }

        def fill(text: str) -> str:
            # Templates contain literal JSON braces, so only substitute
            # known placeholder keys.
            for key, value in fields.items():
                text = text.replace("{" + key + "}", value)
            return text

        return {
            "subroutine": subroutine,
            "version": self.version,
            "payload": payload,
            "messages": [
                {"role": "system", "content": fill(template["system"])},
                {"role": "user", "content": fill(template["user"])},
            ],
        }


@dataclass
class RemoteBackend:
    """Messages-style chat-completion client configured via environment variables."""

    endpoint: str
    model: str
    api_key: str = ""
    timeout: float = 30.0

    @classmethod
    def from_env(cls, timeout: float = 30.0) -> "RemoteBackend":
        endpoint = os.environ.get(ENV_ENDPOINT, "")
        model = os.environ.get(ENV_MODEL, "")
        if not endpoint or not model:
            raise BadConfig(
                f"remote backend needs {ENV_ENDPOINT} and {ENV_MODEL} set"
            )
        return cls(
            endpoint=endpoint,
            model=model,
            api_key=os.environ.get(ENV_API_KEY, ""),
            timeout=timeout,
        )

    def complete(self, prompt: dict[str, Any]) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = httpx.post(
            self.endpoint,
            json={"model": self.model, "messages": prompt["messages"]},
            headers=headers,
            timeout=self.timeout,
        )
        response.raise_for_status()
        body = response.json()
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(f"unexpected completion payload: {body!r}") from exc


@dataclass
class ScriptedBackend:
    """Returns a fixed queue of responses; used by fixtures and unit tests."""

    responses: list[str]
    consumed: list[dict[str, Any]] = field(default_factory=list)

    def complete(self, prompt: dict[str, Any]) -> str:
        self.consumed.append(prompt)
        if not self.responses:
            raise MalformedResponse("scripted backend exhausted")
        return self.responses.pop(0)


class ReplayBackend:
    """Feeds logged raw responses back in order; never re-queries a model.

    Built from the exchange records of a transcript: each logged attempt
    becomes one completion, so scold retries replay exactly.
    """

    def __init__(self, exchanges: list[dict[str, Any]]) -> None:
        self._queue: list[tuple[str, str]] = [
            (ex["subroutine"], attempt)
            for ex in exchanges
            for attempt in ex.get("attempts", [])
        ]
        self._cursor = 0

    def complete(self, prompt: dict[str, Any]) -> str:
        if self._cursor >= len(self._queue):
            raise MalformedResponse("replay ran past the recorded exchanges")
        subroutine, text = self._queue[self._cursor]
        if subroutine != prompt["subroutine"]:
            raise MalformedResponse(
                f"replay divergence: recorded {subroutine}, requested {prompt['subroutine']}"
            )
        self._cursor += 1
        return text
