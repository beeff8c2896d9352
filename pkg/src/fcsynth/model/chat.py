# SPDX-License-Identifier: MIT

from typing import Literal, TypedDict

Role = Literal["system", "user", "assistant", "tool"]


class ChatMessage(TypedDict):
    role: Role
    content: str


class ChatParams(TypedDict, total=False):
    temperature: float
    max_tokens: int
    seed: int
