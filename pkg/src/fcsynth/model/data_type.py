# SPDX-License-Identifier: MIT

from enum import StrEnum


class DataType(StrEnum):
    SINGLE_TURN = "single_turn"
    MULTI_TURN = "multi_turn"
    IRRELEVANCE = "irrelevance"
    PREFERENCE = "preference"


class SingleTurnSubtype(StrEnum):
    SINGLE = "single"
    PARALLEL = "parallel"
    MULTIPLE = "multiple"
