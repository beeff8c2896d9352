# SPDX-License-Identifier: MIT

import os
from typing import Any, Optional, Protocol

import requests

from fcsynth.configuration import Configuration
from fcsynth.errors import BackendError, InputValidationError
from fcsynth.logger import get_logger
from fcsynth.model.chat import ChatMessage, ChatParams

logger = get_logger(__name__)

TOOL_OUTPUT_PREFIX = "Function output:"


class TransportError(BackendError):
    """Raised when a chat request fails; carries the per-attempt log when retried."""

    def __init__(self, message: str, attempts: Optional[list[str]] = None) -> None:
        self.attempts = list(attempts) if attempts else []
        super().__init__(message)


class ChatBackend(Protocol):
    def complete(self, messages: list[ChatMessage], params: ChatParams) -> str: ...


def to_wire_messages(messages: list[ChatMessage]) -> list[dict[str, str]]:
    """Tool results go out as user turns; provider tool-call APIs are not used."""
    wire: list[dict[str, str]] = []
    for message in messages:
        if message["role"] == "tool":
            wire.append(
                {"role": "user", "content": f"{TOOL_OUTPUT_PREFIX} {message['content']}"}
            )
        else:
            wire.append({"role": message["role"], "content": message["content"]})
    return wire


def extract_path(data: Any, path: str) -> Any:
    current = data
    for part in path.split("."):
        if isinstance(current, list):
            try:
                current = current[int(part)]
            except (ValueError, IndexError) as e:
                raise TransportError(f"response has no element {part!r} in {path!r}") from e
        elif isinstance(current, dict):
            if part not in current:
                raise TransportError(f"response has no key {part!r} in {path!r}")
            current = current[part]
        else:
            raise TransportError(f"cannot follow {path!r} into a scalar")
    return current


class HttpChatBackend:
    """JSON chat-completion transport over a shared requests session."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        token: Optional[str] = None,
        timeout: float = 60.0,
        temperature: float = 0.0,
        max_tokens: int = 2048,
        response_path: str = "choices.0.message.content",
        session: Optional[requests.Session] = None,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.response_path = response_path
        self.session = session or requests.Session()
        self.session.headers.update({"Content-Type": "application/json"})
        if token:
            self.session.headers.update({"Authorization": f"Bearer {token}"})

    def complete(self, messages: list[ChatMessage], params: ChatParams) -> str:
        body: dict[str, Any] = {
            "model": self.model,
            "messages": to_wire_messages(messages),
            "temperature": params.get("temperature", self.temperature),
            "max_tokens": params.get("max_tokens", self.max_tokens),
        }
        if "seed" in params:
            body["seed"] = params["seed"]

        try:
            response = self.session.post(self.endpoint, json=body, timeout=self.timeout)
        except requests.RequestException as e:
            raise TransportError(f"request to {self.endpoint} failed: {e}") from e

        if response.status_code >= 400:
            raise TransportError(
                f"{self.endpoint} answered {response.status_code}: {response.text[:200]}"
            )
        try:
            data = response.json()
        except ValueError as e:
            raise TransportError(f"{self.endpoint} returned non-JSON body") from e

        content = extract_path(data, self.response_path)
        if not isinstance(content, str) or not content.strip():
            raise TransportError(f"{self.endpoint} returned an empty completion")
        return content


def build_http_backend(config: Configuration) -> HttpChatBackend:
    endpoint = config["llm_endpoint"]
    if not endpoint:
        raise InputValidationError(
            "llm_endpoint is not configured; set it with 'fcsynth config set --llm-endpoint'"
        )
    token = os.environ.get(config["llm_token_env"])
    if not token:
        logger.warning("%s is not set; sending requests without a token", config["llm_token_env"])
    return HttpChatBackend(
        endpoint=endpoint,
        model=config["llm_model"],
        token=token,
        timeout=config["llm_timeout"],
        temperature=config["llm_temperature"],
        max_tokens=config["llm_max_tokens"],
        response_path=config["llm_response_path"],
    )
