"""Chat-completion backends: a deterministic mock and a remote HTTP client.

The remote client speaks the chat-completions JSON shape (messages array of
{role, content}; assistant text read from the first choice) against any
compatible endpoint. Configuration comes from TUTORSTACK_LLM_URL /
TUTORSTACK_LLM_KEY / TUTORSTACK_LLM_MODEL.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Protocol

import requests

from tutorstack.rag.prompt import PromptBundle

REMOTE_TIMEOUT_SECONDS = 30.0
REMOTE_ATTEMPTS = 2  # one retry on transient failure
MAX_CONCURRENT_REMOTE = 4

ENV_URL = "TUTORSTACK_LLM_URL"
ENV_KEY = "TUTORSTACK_LLM_KEY"
ENV_MODEL = "TUTORSTACK_LLM_MODEL"


class BackendError(Exception):
    pass


class BackendAuthError(BackendError):
    pass


class BackendTimeoutError(BackendError):
    pass


class BackendProtocolError(BackendError):
    pass


class LlmBackend(Protocol):
    name: str

    def complete(self, bundle: PromptBundle) -> str: ...


class MockBackend:
    """Pure-deterministic echo-with-structure backend for hermetic runs."""

    name = "mock"

    def complete(self, bundle: PromptBundle) -> str:
        lines = [f"[mock tutor] Answering: {bundle.question}"]
        summary_first = bundle.learner_summary.splitlines()[0] if bundle.learner_summary else ""
        lines.append(f"Learner context: {summary_first}")
        if bundle.context_blocks:
            lines.append("Sources considered:")
            for block in bundle.context_blocks:
                preview = " ".join(block.text.split()[:12])
                lines.append(f"  {block.tag} {preview}")
        else:
            lines.append("Sources considered: none")
        return "\n".join(lines)


@dataclass(frozen=True)
class RemoteConfig:
    url: str
    api_key: str = ""
    model: str = "gpt-4"
    timeout: float = REMOTE_TIMEOUT_SECONDS

    @classmethod
    def from_env(cls, env=os.environ) -> "RemoteConfig":
        url = env.get(ENV_URL, "")
        if not url:
            raise BackendError(f"{ENV_URL} is not configured")
        return cls(
            url=url,
            api_key=env.get(ENV_KEY, ""),
            model=env.get(ENV_MODEL, "gpt-4"),
        )


class RemoteBackend:
    """One chat-completion POST per ask, with a single retry on transient
    failures and a bounded number of in-flight requests."""

    name = "remote"

    def __init__(self, config: RemoteConfig):
        self.config = config
        self._inflight = threading.Semaphore(MAX_CONCURRENT_REMOTE)

    def _payload(self, bundle: PromptBundle) -> dict:
        rendered = bundle.render()
        # the system instruction travels as the system message; everything
        # else (summary, context, question) as the user message
        user_content = rendered[len(bundle.system) :].lstrip("\n")
        return {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": bundle.system},
                {"role": "user", "content": user_content},
            ],
        }

    def complete(self, bundle: PromptBundle) -> str:
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        payload = self._payload(bundle)
        last_error: BackendError | None = None
        with self._inflight:
            for _ in range(REMOTE_ATTEMPTS):
                try:
                    resp = requests.post(
                        self.config.url,
                        json=payload,
                        headers=headers,
                        timeout=self.config.timeout,
                    )
                except requests.Timeout:
                    last_error = BackendTimeoutError(
                        f"chat completion timed out after {self.config.timeout}s"
                    )
                    continue
                except requests.RequestException as exc:
                    last_error = BackendError(f"chat completion failed: {exc}")
                    continue
                if resp.status_code in (401, 403):
                    raise BackendAuthError(f"backend rejected credentials ({resp.status_code})")
                if resp.status_code >= 500:
                    last_error = BackendError(f"backend error {resp.status_code}")
                    continue
                if resp.status_code != 200:
                    raise BackendProtocolError(f"unexpected status {resp.status_code}")
                try:
                    data = resp.json()
                    return data["choices"][0]["message"]["content"]
                except (ValueError, KeyError, IndexError, TypeError) as exc:
                    raise BackendProtocolError(f"malformed completion response: {exc}") from exc
        assert last_error is not None
        raise last_error


def make_backend(kind: str, env=os.environ) -> LlmBackend:
    if kind == "mock":
        return MockBackend()
    if kind == "remote":
        return RemoteBackend(RemoteConfig.from_env(env))
    raise ValueError(f"unknown backend {kind!r} (expected mock or remote)")
