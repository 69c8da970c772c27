"""Recursive-descent parser for the surface grammar.

    formula := iff
    iff     := imp ("<->" imp)*          left-associative
    imp     := or ("->" imp)?            right-associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | quantified | atom | "(" formula ")"
    quantified := ("all" | "ex") name "." formula   -- scope extends maximally
    atom    := UPPER "(" lower ")" | lower ("=" | "~=") lower
             | IDENT | "true" | "false"

"#" starts a comment running to end of line; whitespace is insignificant.
An `all`/`ex` binder introduces an individual variable when the name is
lowercase and a predicate variable when it is uppercase.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .syntax import (And, Equal, ExistsInd, ExistsPred, ForallInd, ForallPred,
                     Formula, Iff, Implies, Not, Or, PredApp, TruthConst,
                     is_predicate_name, validate)

_KEYWORDS = {"all", "ex", "true", "false"}
_SYMBOLS = ("<->", "->", "~=", "(", ")", ".", "~", "&", "|", "=")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "keyword", one of _SYMBOLS, or "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            if ch.isalpha():
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                word = text[i:j]
                kind = "keyword" if word in _KEYWORDS else "ident"
                tokens.append(Token(kind, word, line, col))
                col += j - i
                i = j
            else:
                raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: tuple[str, ...]) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            got = tok.text or "end of input"
            raise ParseError(f"unexpected {got!r}", tok.line, tok.col, expected)
        return self.advance()

    def fail(self, expected: tuple[str, ...]):
        tok = self.peek()
        got = tok.text or "end of input"
        raise ParseError(f"unexpected {got!r}", tok.line, tok.col, expected)

    def formula(self) -> Formula:
        out = self.imp()
        while self.peek().kind == "<->":
            self.advance()
            out = Iff(out, self.imp())
        return out

    def imp(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.advance()
            return Implies(left, self.imp())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek().kind == "|":
            self.advance()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek().kind == "&":
            self.advance()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.advance()
            return Not(self.unary())
        if tok.kind == "keyword" and tok.text in ("all", "ex"):
            return self.quantified()
        if tok.kind == "(":
            self.advance()
            out = self.formula()
            self.expect(")", ("')'",))
            return out
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.advance()
            return TruthConst(tok.text == "true")
        if tok.kind == "ident":
            return self.atom()
        self.fail(("'~'", "'all'", "'ex'", "'('", "identifier", "'true'", "'false'"))

    def quantified(self) -> Formula:
        kw = self.advance()
        name = self.expect("ident", ("identifier",))
        self.expect(".", ("'.'",))
        body = self.formula()  # maximal scope
        if is_predicate_name(name.text):
            return (ForallPred if kw.text == "all" else ExistsPred)(name.text, body)
        return (ForallInd if kw.text == "all" else ExistsInd)(name.text, body)

    def atom(self) -> Formula:
        name = self.advance()
        nxt = self.peek()
        if nxt.kind == "(":
            if not is_predicate_name(name.text):
                raise ParseError(
                    f"individual name {name.text!r} applied like a predicate",
                    name.line, name.col)
            self.advance()
            arg = self.expect("ident", ("individual name",))
            if is_predicate_name(arg.text):
                raise ParseError(
                    f"predicate {arg.text!r} used as individual", arg.line, arg.col)
            self.expect(")", ("')'",))
            return PredApp(name.text, arg.text)
        if nxt.kind in ("=", "~="):
            if is_predicate_name(name.text):
                raise ParseError(
                    f"predicate {name.text!r} used as individual", name.line, name.col)
            self.advance()
            other = self.expect("ident", ("individual name",))
            if is_predicate_name(other.text):
                raise ParseError(
                    f"predicate {other.text!r} used as individual", other.line, other.col)
            eq = Equal(name.text, other.text)
            return Not(eq) if nxt.kind == "~=" else eq
        return PredApp(name.text)


def parse(text: str) -> Formula:
    """Parse and validate a formula; raises ParseError / WellFormednessError."""
    parser = _Parser(tokenize(text))
    f = parser.formula()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected {tok.text!r} after formula", tok.line, tok.col)
    return validate(f)
