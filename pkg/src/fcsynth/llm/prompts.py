# SPDX-License-Identifier: MIT

from functools import cache
from importlib import resources
from string import Formatter
from typing import Mapping, TypedDict

from fcsynth.errors import BackendError, InputValidationError
from fcsynth.model.chat import ChatMessage, Role
from fcsynth.model.prompt_id import PromptId

# Templates rendered into the system slot; the rest go out as user turns.
_SYSTEM_TEMPLATES = {PromptId.SYSTEM_PROMPT, PromptId.POSITIVE_DISTILL}


class PromptTemplate(TypedDict):
    id: PromptId
    text: str
    role: Role
    placeholders: list[str]


class PromptBindingError(InputValidationError):
    """Raised when a template is rendered without all of its placeholders bound."""

    pass


class JudgmentError(BackendError):
    """Raised when a judge answer cannot be interpreted."""

    pass


class ProtocolError(JudgmentError):
    """Raised when a judge answer does not follow the yes/no line protocol."""

    pass


def _placeholders(text: str) -> list[str]:
    names: list[str] = []
    for _, field, _, _ in Formatter().parse(text):
        if field and field not in names:
            names.append(field)
    return names


@cache
def get_template(template_id: PromptId | str) -> PromptTemplate:
    prompt_id = PromptId(template_id)
    text = (
        resources.files("fcsynth.llm")
        .joinpath("templates", f"{prompt_id.value}.txt")
        .read_text(encoding="utf-8")
    )
    return {
        "id": prompt_id,
        "text": text,
        "role": "system" if prompt_id in _SYSTEM_TEMPLATES else "user",
        "placeholders": _placeholders(text),
    }


def render_text(template_id: PromptId | str, bindings: Mapping[str, object]) -> str:
    template = get_template(template_id)
    missing = [name for name in template["placeholders"] if name not in bindings]
    if missing:
        raise PromptBindingError(
            f"template {template['id'].value} has unbound placeholders: {', '.join(missing)}"
        )
    return template["text"].format(**{name: bindings[name] for name in template["placeholders"]})


def render(template_id: PromptId | str, bindings: Mapping[str, object]) -> list[ChatMessage]:
    template = get_template(template_id)
    return [{"role": template["role"], "content": render_text(template_id, bindings)}]


def parse_yes_no_line(text: str) -> tuple[bool, str]:
    lines = text.strip().splitlines()
    if not lines:
        raise ProtocolError("empty judge answer")
    first = lines[0].strip().strip(".").lower()
    if first not in ("yes", "no"):
        raise ProtocolError(f"expected 'yes' or 'no' on the first line, got {lines[0]!r}")
    return (first == "yes", "\n".join(lines[1:]).strip())
