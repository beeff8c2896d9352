# SPDX-License-Identifier: MIT

from enum import StrEnum


class PromptId(StrEnum):
    NESTED_JUDGE = "nested_judge"
    DEPENDENCY_JUDGE = "dependency_judge"
    DOMAIN_CLASSIFY = "domain_classify"
    BACK_TRANSLATE = "back_translate"
    FORTH_TRANSLATE = "forth_translate"
    POSITIVE_DISTILL = "positive_distill"
    NEGATIVE_JUDGE = "negative_judge"
    SYSTEM_PROMPT = "system_prompt"
