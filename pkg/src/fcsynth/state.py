# SPDX-License-Identifier: MIT

import os
from contextvars import ContextVar

_jobs: ContextVar[int] = ContextVar("jobs", default=os.cpu_count() or 1)


def set_jobs(value: int) -> None:
    _jobs.set(max(1, value))


def get_jobs() -> int:
    return _jobs.get()
