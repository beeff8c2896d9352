# SPDX-License-Identifier: MIT

from fcsynth.fclang.parser import (
    FcSyntaxError,
    parse_fc_answer,
    parse_fc_list,
    try_parse_fc_list,
)
from fcsynth.fclang.serializer import (
    canonical_args,
    serialize_fc_list,
    serialize_hint_calls,
    serialize_value,
)
from fcsynth.fclang.validate import CallNameMismatch, validate_args

__all__ = [
    "CallNameMismatch",
    "FcSyntaxError",
    "canonical_args",
    "parse_fc_answer",
    "parse_fc_list",
    "serialize_fc_list",
    "serialize_hint_calls",
    "serialize_value",
    "try_parse_fc_list",
    "validate_args",
]
