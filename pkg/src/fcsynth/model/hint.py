# SPDX-License-Identifier: MIT

from enum import StrEnum
from typing import Final, TypedDict

HINT_MARKER: Final = "[Hint]:"
MISS_FUNCTION_HINT: Final = "miss function"
MISS_PARAMS_HINT: Final = "missed params"


class HintKind(StrEnum):
    CORRECT = "correct"
    MISS_FUNCTION = "miss_function"
    MISS_PARAMS = "miss_params"
    MISLEADING = "misleading"


class Hint(TypedDict):
    kind: HintKind
    content: str
