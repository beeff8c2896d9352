# SPDX-License-Identifier: MIT

import threading
import time
from typing import Callable, Optional

import requests

from fcsynth.errors import BackendError
from fcsynth.llm.backend import ChatBackend, TransportError
from fcsynth.logger import get_logger
from fcsynth.model.chat import ChatMessage, ChatParams

logger = get_logger(__name__)


class InFlightLimiter:
    """Process-wide bound on concurrent chat requests."""

    def __init__(self, limit: int = 8) -> None:
        self.limit = max(1, limit)
        self._semaphore = threading.BoundedSemaphore(self.limit)

    def __enter__(self) -> "InFlightLimiter":
        self._semaphore.acquire()
        return self

    def __exit__(self, *exc: object) -> None:
        self._semaphore.release()


_limiter = InFlightLimiter()
_limiter_lock = threading.Lock()


def configure_in_flight(limit: int) -> None:
    global _limiter
    with _limiter_lock:
        _limiter = InFlightLimiter(limit)


def get_limiter() -> InFlightLimiter:
    return _limiter


def complete_with_retry(
    backend: ChatBackend,
    messages: list[ChatMessage],
    params: Optional[ChatParams] = None,
    max_retries: int = 2,
    backoff: float = 0.5,
    limiter: Optional[InFlightLimiter] = None,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """Call the backend at most max_retries + 1 times, doubling the wait each time."""
    gate = limiter or get_limiter()
    attempts: list[str] = []
    for attempt in range(max_retries + 1):
        try:
            with gate:
                return backend.complete(messages, params or {})
        except (BackendError, requests.RequestException) as e:
            attempts.append(f"attempt {attempt + 1}: {type(e).__name__}: {e}")
            if attempt == max_retries:
                break
            delay = backoff * (2**attempt)
            logger.warning("chat request failed (%s); retrying in %.2fs", e, delay)
            if delay > 0:
                sleep(delay)
    raise TransportError(
        f"chat request failed after {len(attempts)} attempts", attempts=attempts
    )
