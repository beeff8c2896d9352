# SPDX-License-Identifier: MIT

import random
from typing import Optional

from fcsynth.errors import InputValidationError
from fcsynth.logger import get_logger
from fcsynth.model.dependency_graph import GraphSet
from fcsynth.model.fsp import Fsp
from fcsynth.service.concurrency import derive_seed
from fcsynth.service.dependency_graph import out_neighbors
from fcsynth.template.fsp import get_fsp_template, get_turn_group_template

logger = get_logger(__name__)


class WalkStartError(InputValidationError):
    """Raised when a walk starts from a node that has no graph."""

    pass


def random_walk(
    graphs: GraphSet,
    start: str,
    steps: int,
    rng: random.Random,
    forbid_backtrack: bool = False,
    fsp_id: Optional[str] = None,
    seed: int = 0,
) -> Fsp:
    if start not in graphs:
        raise WalkStartError(f"walk start {start!r} has no dependency graph")
    if steps < 1:
        raise ValueError("steps must be at least 1")

    fsp = get_fsp_template(fsp_id or start, start, seed)
    previous: Optional[str] = None
    current = start
    for _ in range(steps):
        options = out_neighbors(graphs, current)
        if forbid_backtrack and previous is not None:
            options = [node for node in options if node != previous]
        if not options:
            break
        previous, current = current, rng.choice(options)
        fsp["turns"].append(get_turn_group_template([current]))
    return fsp


def sample_fsps(
    graphs: GraphSet,
    count: int,
    steps: int,
    seed: int,
    min_turns: int = 2,
    forbid_backtrack: bool = False,
    max_attempts: Optional[int] = None,
) -> list[Fsp]:
    """Walk from each target in turn until count FSPs of at least min_turns are kept."""
    starts = sorted(graphs)
    if not starts or count <= 0:
        return []
    budget = max_attempts if max_attempts is not None else count * 10
    kept: list[Fsp] = []
    discarded = 0
    for attempt in range(budget):
        if len(kept) >= count:
            break
        start = starts[attempt % len(starts)]
        walk_seed = derive_seed(seed, f"walk:{attempt}")
        fsp = random_walk(
            graphs,
            start,
            steps,
            random.Random(walk_seed),
            forbid_backtrack=forbid_backtrack,
            fsp_id=f"fsp-{len(kept):06d}",
            seed=walk_seed,
        )
        if len(fsp["turns"]) < min_turns:
            discarded += 1
            continue
        kept.append(fsp)
    if discarded:
        logger.info("discarded %d walks shorter than %d turns", discarded, min_turns)
    if len(kept) < count:
        logger.warning("kept %d of %d requested FSPs after %d walks", len(kept), count, budget)
    return kept


def is_edge_consistent(fsp: Fsp, graphs: GraphSet) -> bool:
    """True when every consecutive pair of single-function turns follows an edge."""
    turns = fsp["turns"]
    for prev, nxt in zip(turns, turns[1:]):
        if len(prev["functions"]) != 1 or len(nxt["functions"]) != 1:
            return False
        if nxt["functions"][0] not in out_neighbors(graphs, prev["functions"][0]):
            return False
    return True
