# SPDX-License-Identifier: MIT

"""Recursive-descent parser for the bracketed function-call language.

    fc_list := "[" (call ("," call)*)? "]"
    call    := name "(" (param "=" value ("," param "=" value)*)? ")"
    value   := string | number | true | false | null | "[" values "]" | bareword

Parsing is lenient where model output tends to be sloppy: single-quoted
strings, Python literals (True/False/None) and unquoted barewords are
accepted. Serialization is always canonical.
"""

import re
from typing import Optional

from fcsynth.errors import InputValidationError
from fcsynth.model.fc import FcList, FunctionCall, Value

_NAME_START = re.compile(r"[A-Za-z_]")
_NAME_CHAR = re.compile(r"[A-Za-z0-9_.]")
_NUMBER = re.compile(r"-?(?:\d+)(?:\.\d+)?(?:[eE][+-]?\d+)?")

_ESCAPES = {
    '"': '"',
    "'": "'",
    "\\": "\\",
    "/": "/",
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "b": "\b",
    "f": "\f",
}

_KEYWORDS: dict[str, Value] = {
    "true": True,
    "false": False,
    "null": None,
    "True": True,
    "False": False,
    "None": None,
}


class FcSyntaxError(InputValidationError):
    """Raised when text does not follow the call-list grammar."""

    def __init__(self, message: str, position: int, text: str) -> None:
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def error(self, message: str, position: Optional[int] = None) -> FcSyntaxError:
        return FcSyntaxError(
            message, self.pos if position is None else position, self.text
        )

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        found = self.peek()
        if found != char:
            shown = repr(found) if found else "end of input"
            raise self.error(f"expected {char!r}, found {shown}")
        self.pos += 1

    def parse_list(self) -> FcList:
        self.expect("[")
        calls: FcList = []
        if self.peek() == "]":
            self.pos += 1
            return calls
        while True:
            calls.append(self.parse_call())
            char = self.peek()
            if char == ",":
                self.pos += 1
                continue
            if char == "]":
                self.pos += 1
                return calls
            raise self.error("expected ',' or ']' after call")

    def parse_name(self, what: str) -> str:
        self.skip_ws()
        start = self.pos
        if self.pos >= len(self.text) or not _NAME_START.match(self.text[self.pos]):
            raise self.error(f"expected {what}")
        self.pos += 1
        while self.pos < len(self.text) and _NAME_CHAR.match(self.text[self.pos]):
            self.pos += 1
        return self.text[start : self.pos]

    def parse_call(self) -> FunctionCall:
        name = self.parse_name("function name")
        self.expect("(")
        args: dict[str, Value] = {}
        if self.peek() == ")":
            self.pos += 1
            return {"name": name, "args": args}
        while True:
            param_pos = self.pos
            param = self.parse_name("parameter name")
            if param in args:
                raise self.error(f"duplicate parameter {param!r}", param_pos)
            if self.peek() != "=":
                raise self.error(f"missing '=' after parameter {param!r}")
            self.pos += 1
            args[param] = self.parse_value()
            char = self.peek()
            if char == ",":
                self.pos += 1
                continue
            if char == ")":
                self.pos += 1
                return {"name": name, "args": args}
            raise self.error("expected ',' or ')' after argument")

    def parse_value(self) -> Value:
        char = self.peek()
        if char in ('"', "'"):
            return self.parse_string(char)
        if char == "[":
            return self.parse_value_list()
        if char == "":
            raise self.error("expected value, found end of input")
        return self.parse_bareword()

    def parse_value_list(self) -> list[Value]:
        self.expect("[")
        values: list[Value] = []
        if self.peek() == "]":
            self.pos += 1
            return values
        while True:
            values.append(self.parse_value())
            char = self.peek()
            if char == ",":
                self.pos += 1
                continue
            if char == "]":
                self.pos += 1
                return values
            raise self.error("expected ',' or ']' in list value")

    def parse_string(self, quote: str) -> str:
        start = self.pos
        self.pos += 1
        chunks: list[str] = []
        while self.pos < len(self.text):
            char = self.text[self.pos]
            if char == quote:
                self.pos += 1
                return "".join(chunks)
            if char == "\\":
                chunks.append(self.parse_escape())
                continue
            chunks.append(char)
            self.pos += 1
        raise self.error("unterminated string", start)

    def parse_escape(self) -> str:
        escape_pos = self.pos
        self.pos += 1
        if self.pos >= len(self.text):
            raise self.error("bad string escape", escape_pos)
        code = self.text[self.pos]
        if code == "u":
            digits = self.text[self.pos + 1 : self.pos + 5]
            if len(digits) != 4 or not all(c in "0123456789abcdefABCDEF" for c in digits):
                raise self.error("bad unicode escape", escape_pos)
            self.pos += 5
            return chr(int(digits, 16))
        if code not in _ESCAPES:
            raise self.error(f"bad string escape '\\{code}'", escape_pos)
        self.pos += 1
        return _ESCAPES[code]

    def parse_bareword(self) -> Value:
        start = self.pos
        depth = 0
        while self.pos < len(self.text):
            char = self.text[self.pos]
            if char in "([{":
                depth += 1
            elif char in ")]}":
                if depth == 0:
                    break
                depth -= 1
            elif char == "," and depth == 0:
                break
            self.pos += 1
        raw = self.text[start : self.pos].strip()
        if not raw:
            raise self.error("expected value", start)
        if raw in _KEYWORDS:
            return _KEYWORDS[raw]
        if _NUMBER.fullmatch(raw):
            if any(c in raw for c in ".eE"):
                return float(raw)
            return int(raw)
        return raw

    def finish(self) -> None:
        if self.peek() != "":
            raise self.error("unexpected trailing text")


def parse_fc_list(text: str) -> FcList:
    parser = _Parser(text)
    calls = parser.parse_list()
    parser.finish()
    return calls


def parse_fc_answer(text: str) -> FcList:
    """Parse an answer line that may omit the surrounding brackets."""
    stripped = text.strip()
    if not stripped.startswith("["):
        stripped = f"[{stripped}]"
    return parse_fc_list(stripped)


def try_parse_fc_list(text: str) -> Optional[FcList]:
    stripped = text.strip()
    if not stripped.startswith("["):
        return None
    try:
        return parse_fc_list(stripped)
    except FcSyntaxError:
        return None
