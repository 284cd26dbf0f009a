"""Lexer for MiniLang (.ml0) source files."""

from dataclasses import dataclass


KEYWORDS = {
    "type", "extends", "fn", "var", "if", "else", "while", "return",
    "true", "false",
}

# Multi-char operators must be tried before their single-char prefixes.
OPERATORS = ["->", "==", "!=", "<=", ">=", "&&", "||",
             "=", "<", ">", "+", "-", "*", "/", "!"]

PUNCT = set("(){},;:")


class LexError(Exception):
    def __init__(self, message, offset):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str          # keyword | identifier | literal | punct | operator
    text: str
    start: int
    end: int
    file_id: str = ""

    @property
    def span(self):
        return (self.start, self.end)


def _is_ident_start(c):
    return c.isalpha() or c == "_"


def _is_ident_char(c):
    return c.isalnum() or c == "_"


def tokenize(source, file_id=""):
    """Scan `source` into a token list; whitespace and // comments are skipped."""
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c in " \t\r\n":
            i += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if _is_ident_start(c):
            j = i + 1
            while j < n and _is_ident_char(source[j]):
                j += 1
            text = source[i:j]
            kind = "keyword" if text in KEYWORDS else "identifier"
            tokens.append(Token(kind, text, i, j, file_id))
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("literal", source[i:j], i, j, file_id))
            i = j
            continue
        if c == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    raise LexError("unterminated string", i)
                j += 1
            if j >= n:
                raise LexError("unterminated string", i)
            tokens.append(Token("literal", source[i:j + 1], i, j + 1, file_id))
            i = j + 1
            continue
        if c in PUNCT:
            tokens.append(Token("punct", c, i, i + 1, file_id))
            i += 1
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("operator", op, i, i + len(op), file_id))
                i += len(op)
                break
        else:
            raise LexError(f"illegal character {c!r}", i)
    return tokens
