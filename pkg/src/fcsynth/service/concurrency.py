# SPDX-License-Identifier: MIT

import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from fcsynth import state as app_state

T = TypeVar("T")
R = TypeVar("R")


def derive_rng(seed: int | str, key: str) -> random.Random:
    return random.Random(f"{seed}:{key}")


def derive_seed(seed: int | str, key: str) -> int:
    return derive_rng(seed, key).getrandbits(64)


def map_ordered(
    fn: Callable[[T], R], items: Iterable[T], jobs: Optional[int] = None
) -> list[R]:
    """Apply fn to every item on a thread pool, returning results in input order."""
    items = list(items)
    workers = app_state.get_jobs() if jobs is None else max(1, jobs)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
