"""Tokenizer shared by the query, script, schema, and graph-file parsers."""

from __future__ import annotations

from dataclasses import dataclass

from gretlite.errors import ParseError

# Longest first so maximal munch falls out of a linear scan.
_SYMBOLS = (
    "<>--", "<==", "-->", "<->", "<--", ":=", "<=", ">=", "<>", "++", "->",
    "(", ")", "{", "}", "[", "]", ",", ";", ":", ".", "|", "?", "$", "!",
    "+", "-", "*", "/", "%", "=", "<", ">",
)

_STRING_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, STRING, SYMBOL, EOF
    text: str
    value: object
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def error(msg):
        raise ParseError(msg, line, col)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(Token("IDENT", word, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            word = text[i:j]
            value = float(word) if is_float else int(word)
            tokens.append(Token("NUMBER", word, value, start_line, start_col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            out = []
            while True:
                if j >= n:
                    error("unterminated string literal")
                ch = text[j]
                if ch == '"':
                    j += 1
                    break
                if ch == "\n":
                    error("unterminated string literal")
                if ch == "\\":
                    if j + 1 >= n or text[j + 1] not in _STRING_ESCAPES:
                        error("invalid string escape")
                    out.append(_STRING_ESCAPES[text[j + 1]])
                    j += 2
                    continue
                out.append(ch)
                j += 1
            tokens.append(
                Token("STRING", text[i:j], "".join(out), start_line, start_col)
            )
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYMBOL", sym, sym, start_line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            error(f"unexpected character {c!r}")
    tokens.append(Token("EOF", "", None, line, col))
    return tokens


class TokenStream:
    """Cursor over a token list with the usual expect/peek helpers."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self._tokens[min(self._pos + ahead, len(self._tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self._pos += 1
        return tok

    def at_symbol(self, *symbols: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYMBOL" and tok.text in symbols

    def at_ident(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and (not words or tok.text in words)

    def at_eof(self) -> bool:
        return self.peek().kind == "EOF"

    def expect_symbol(self, symbol: str) -> Token:
        if not self.at_symbol(symbol):
            self.error(f"expected '{symbol}'")
        return self.next()

    def expect_ident(self, word: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != "IDENT" or (word is not None and tok.text != word):
            self.error(f"expected {word or 'identifier'}")
        return self.next()

    def expect_eof(self):
        if not self.at_eof():
            self.error("unexpected trailing input")

    def error(self, message: str):
        tok = self.peek()
        found = tok.text if tok.kind != "EOF" else "end of input"
        raise ParseError(f"{message}, found '{found}'", tok.line, tok.column)
