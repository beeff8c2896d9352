# SPDX-License-Identifier: MIT

from typing import Iterator, Optional

from fcsynth.model.function_signature import FunctionSignature


class FunctionPool:
    """Immutable collection of signatures indexed by id, api_name and group."""

    def __init__(self, functions: list[FunctionSignature]) -> None:
        self._functions = list(functions)
        self._by_id: dict[str, FunctionSignature] = {}
        self._by_api_name: dict[str, FunctionSignature] = {}
        self._groups: dict[tuple[str, str], list[str]] = {}
        for sig in self._functions:
            self._by_id[sig["id"]] = sig
            self._by_api_name[sig["api_name"]] = sig
            key = (sig["category"], sig["tool_class"])
            self._groups.setdefault(key, []).append(sig["id"])

    @property
    def functions(self) -> list[FunctionSignature]:
        return list(self._functions)

    def __len__(self) -> int:
        return len(self._functions)

    def __iter__(self) -> Iterator[FunctionSignature]:
        return iter(self._functions)

    def __contains__(self, function_id: object) -> bool:
        return function_id in self._by_id

    def ids(self) -> list[str]:
        return [sig["id"] for sig in self._functions]

    def get(self, function_id: str) -> Optional[FunctionSignature]:
        return self._by_id.get(function_id)

    def by_id(self, function_id: str) -> FunctionSignature:
        return self._by_id[function_id]

    def by_api_name(self, api_name: str) -> Optional[FunctionSignature]:
        return self._by_api_name.get(api_name)

    def group_of(self, function_id: str) -> tuple[str, str]:
        sig = self._by_id[function_id]
        return (sig["category"], sig["tool_class"])

    def group_members(self, category: str, tool_class: str) -> list[str]:
        return list(self._groups.get((category, tool_class), []))

    def groups(self) -> list[tuple[str, str]]:
        return list(self._groups.keys())
