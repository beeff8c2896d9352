# SPDX-License-Identifier: MIT

from enum import StrEnum


class MissLabel(StrEnum):
    MISS_PARAMS = "miss params"
    MISS_FUNC = "miss func"
