"""Model clients: generic HTTP transports plus offline mocks.

The dialogue contract follows the common chat-completions shape (messages,
seed, max_completion_tokens, response_format with a JSON schema); the
embedding contract is the usual {model, input} POST.  Authentication comes
from the FOLBENCH_API_TOKEN environment variable.  Mock clients implement
the same interface for offline runs and tests; a file-backed mock keys
replies by the SHA-256 of the user prompt so fixtures stay reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .syntax import FolbenchError

AUTH_ENV_VAR = "FOLBENCH_API_TOKEN"


class ClientError(FolbenchError):
    pass


class DimensionMismatch(FolbenchError):
    pass


class ModelClient(ABC):
    """One model endpoint; dialogue and embedding operations.

    Subclasses implement whichever operations their kind supports and raise
    ClientError for transport or protocol failures.
    """

    def chat(
        self,
        system: str,
        user: str,
        seed: int,
        max_tokens: int,
        output_schema: dict,
    ) -> dict:
        raise ClientError(f"{type(self).__name__} does not support dialogue")

    def embed(self, text: str, instruction: str | None = None) -> list[float]:
        raise ClientError(f"{type(self).__name__} does not support embeddings")


def schema_for(answer_type: str) -> dict:
    """Structured-output schema: reasoning plus a typed answer field."""
    answers = {
        "text": {"type": "string"},
        "integer": {"type": "integer"},
        "integer_list": {"type": "array", "items": {"type": "integer"}},
    }
    return {
        "type": "object",
        "properties": {"reasoning": {"type": "string"}, "answer": answers[answer_type]},
        "required": ["reasoning", "answer"],
        "additionalProperties": False,
    }


def prompt_key(user_prompt: str) -> str:
    return hashlib.sha256(user_prompt.encode()).hexdigest()


# ---------------------------------------------------------------------------
# HTTP transports
# ---------------------------------------------------------------------------


def _auth_headers() -> dict[str, str]:
    token = os.environ.get(AUTH_ENV_VAR)
    headers = {"Content-Type": "application/json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    return headers


@dataclass
class HttpDialogueClient(ModelClient):
    endpoint: str
    model: str
    timeout_s: float = 120.0

    def chat(self, system, user, seed, max_tokens, output_schema):
        import requests

        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "seed": seed,
            "max_completion_tokens": max_tokens,
            "response_format": {
                "type": "json_schema",
                "json_schema": {"name": "reply", "strict": True, "schema": output_schema},
            },
        }
        try:
            resp = requests.post(
                self.endpoint, json=payload, headers=_auth_headers(), timeout=self.timeout_s
            )
            resp.raise_for_status()
            content = resp.json()["choices"][0]["message"]["content"]
            return json.loads(content)
        except (requests.RequestException, KeyError, IndexError, json.JSONDecodeError) as exc:
            raise ClientError(f"chat request failed: {exc}") from exc


@dataclass
class HttpEmbeddingClient(ModelClient):
    endpoint: str
    model: str
    timeout_s: float = 120.0

    def embed(self, text, instruction=None):
        import requests

        payload = {"model": self.model, "input": (instruction or "") + text}
        try:
            resp = requests.post(
                self.endpoint, json=payload, headers=_auth_headers(), timeout=self.timeout_s
            )
            resp.raise_for_status()
            return list(resp.json()["data"][0]["embedding"])
        except (requests.RequestException, KeyError, IndexError, json.JSONDecodeError) as exc:
            raise ClientError(f"embedding request failed: {exc}") from exc


# ---------------------------------------------------------------------------
# Mocks
# ---------------------------------------------------------------------------


class FileMockDialogueClient(ModelClient):
    """Replies looked up by SHA-256 of the user prompt.

    The mapping may come from a dict or a JSON file of the form
    {"<sha256>": {"reasoning": ..., "answer": ...}, "default": {...}}.
    """

    def __init__(self, replies: Mapping[str, dict] | str | Path):
        if isinstance(replies, (str, Path)):
            with open(replies, encoding="utf-8") as fh:
                replies = json.load(fh)
        self.replies = dict(replies)

    def chat(self, system, user, seed, max_tokens, output_schema):
        key = prompt_key(user)
        if key in self.replies:
            return self.replies[key]
        if "default" in self.replies:
            return self.replies["default"]
        raise ClientError(f"no canned reply for prompt key {key}")


class StaticDialogueClient(ModelClient):
    """Always returns the same answer; the adversarial fixed-answer mock."""

    def __init__(self, answer, reasoning: str = "fixed"):
        self.answer = answer
        self.reasoning = reasoning

    def chat(self, system, user, seed, max_tokens, output_schema):
        return {"reasoning": self.reasoning, "answer": self.answer}


class CallableDialogueClient(ModelClient):
    """Adapter for tests: reply computed by a function of (system, user, seed)."""

    def __init__(self, fn):
        self.fn = fn

    def chat(self, system, user, seed, max_tokens, output_schema):
        return self.fn(system, user, seed)


class MappingEmbeddingClient(ModelClient):
    """Embeddings from an explicit text -> vector mapping."""

    def __init__(self, mapping: Mapping[str, Sequence[float]]):
        self.mapping = {k: list(v) for k, v in mapping.items()}

    def embed(self, text, instruction=None):
        try:
            return list(self.mapping[text])
        except KeyError:
            raise ClientError(f"no embedding fixture for text {text!r}") from None


class OneHotEmbeddingClient(ModelClient):
    """Deterministic pairwise-orthogonal embeddings.

    Each distinct input gets the next basis vector of a fixed-dimension
    space, so every pair of distinct texts has cosine similarity zero.
    """

    def __init__(self, dimension: int = 4096):
        self.dimension = dimension
        self.index: dict[str, int] = {}

    def embed(self, text, instruction=None):
        key = (instruction or "") + text
        if key not in self.index:
            if len(self.index) >= self.dimension:
                raise ClientError("one-hot embedding space exhausted")
            self.index[key] = len(self.index)
        vec = [0.0] * self.dimension
        vec[self.index[key]] = 1.0
        return vec
