# SPDX-License-Identifier: MIT

from typing import TypedDict


class LocalDependencyGraph(TypedDict):
    target: str
    neighbors: list[str]  # at most k_cand, never contains target
    edges: list[list[str]]  # [target, neighbor] pairs
    flagged: bool  # judgement failed, recorded edgeless


GraphSet = dict[str, LocalDependencyGraph]
