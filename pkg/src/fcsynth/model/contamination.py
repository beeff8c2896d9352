# SPDX-License-Identifier: MIT

from typing import Literal, TypedDict

Granularity = Literal["function", "turn"]


class ContaminationReport(TypedDict):
    exact_match_pct: float
    ngram_pct: float
    n: int
    granularity: Granularity
    train_size: int
    test_size: int
