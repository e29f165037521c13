"""Tokenizer for the snippet language."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import MiniParseError

KEYWORDS = frozenset({
    "func", "let", "if", "else", "while", "for", "in", "range",
    "return", "print", "true", "false", "and", "or", "not",
    "int", "real", "bool", "str", "list",
})

# Longest first so <= wins over <, -> over -.
SYMBOLS = ("->", "==", "!=", "<=", ">=",
           "(", ")", "{", "}", "[", "]", ",", ";", ":",
           "=", "<", ">", "+", "-", "*", "/", "%")

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str      # IDENT, INT, REAL, STRING, EOF, or the keyword/symbol itself
    text: str
    value: object  # parsed payload for INT / REAL / STRING
    line: int
    column: int
    offset: int
    length: int


def _error(message: str, line: int, column: int, **detail) -> MiniParseError:
    return MiniParseError(message, line=line, column=column, **detail)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    col = 1
    n = len(source)

    def advance(count: int) -> None:
        nonlocal pos, line, col
        for _ in range(count):
            if source[pos] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            pos += 1

    while pos < n:
        ch = source[pos]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", pos):
            while pos < n and source[pos] != "\n":
                advance(1)
            continue

        start_line, start_col, start = line, col, pos

        if ch.isdigit():
            while pos < n and source[pos].isdigit():
                advance(1)
            is_real = False
            if pos + 1 < n and source[pos] == "." and source[pos + 1].isdigit():
                is_real = True
                advance(1)
                while pos < n and source[pos].isdigit():
                    advance(1)
            text = source[start:pos]
            if is_real:
                tokens.append(Token("REAL", text, float(text), start_line, start_col, start, pos - start))
            else:
                tokens.append(Token("INT", text, int(text), start_line, start_col, start, pos - start))
            continue

        if ch.isalpha() or ch == "_":
            while pos < n and (source[pos].isalnum() or source[pos] == "_"):
                advance(1)
            text = source[start:pos]
            kind = text if text in KEYWORDS else "IDENT"
            tokens.append(Token(kind, text, text, start_line, start_col, start, pos - start))
            continue

        if ch == '"':
            advance(1)
            chars: list[str] = []
            while True:
                if pos >= n or source[pos] == "\n":
                    raise _error("unterminated string literal", start_line, start_col,
                                 expected=['"'], found="end of line")
                c = source[pos]
                if c == '"':
                    advance(1)
                    break
                if c == "\\":
                    advance(1)
                    if pos >= n or source[pos] not in _ESCAPES:
                        raise _error("invalid escape sequence", line, col,
                                     expected=sorted("\\" + e for e in _ESCAPES), found=source[pos:pos + 1])
                    chars.append(_ESCAPES[source[pos]])
                    advance(1)
                else:
                    chars.append(c)
                    advance(1)
            tokens.append(Token("STRING", source[start:pos], "".join(chars),
                                start_line, start_col, start, pos - start))
            continue

        for sym in SYMBOLS:
            if source.startswith(sym, pos):
                advance(len(sym))
                tokens.append(Token(sym, sym, sym, start_line, start_col, start, len(sym)))
                break
        else:
            raise _error(f"unexpected character {ch!r}", line, col,
                         expected=[], found=ch)

    tokens.append(Token("EOF", "", None, line, col, pos, 0))
    return tokens
