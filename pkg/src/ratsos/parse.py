"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace insensitive, ``**`` is accepted for ``^``, ``−`` for ``-``):

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary | unary)*      # juxtaposition multiplies
    unary  := ("+" | "-") unary | power
    power  := atom ("^" exponent)?
    atom   := number | identifier | "(" expr ")"
    exponent := integer | "(" integer ")"

Division is only allowed by nonzero constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import ParseError
from .poly import MPoly

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def _normalize(text: str) -> str:
    return text.replace("−", "-").replace("·", "*").replace("×", "*")


def tokenize(text: str) -> List[Token]:
    text = _normalize(text)
    out: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind == "ws":
            for k, ch in enumerate(tok):
                if ch == "\n":
                    line += 1
                    line_start = pos + k + 1
        else:
            if kind == "op" and tok == "**":
                tok = "^"
            out.append(Token(kind, tok, line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("end", "", line, pos - line_start + 1))
    return out


# AST nodes are tuples: ("num", Fraction) | ("var", name) | (op, left, right) | ("neg", x) | ("pow", x, n)


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.cur
        return ParseError(msg, tok.line, tok.col)

    def eat(self, text: str) -> Token:
        tok = self.cur
        if tok.text != text or tok.kind not in ("op",):
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        self.i += 1
        return tok

    def parse(self):
        if self.cur.kind == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.cur.kind != "end":
            raise self.error(f"unexpected {self.cur.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.cur.text in ("+", "-") and self.cur.kind == "op":
            op = self.cur.text
            self.i += 1
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while True:
            tok = self.cur
            if tok.kind == "op" and tok.text in ("*", "/"):
                self.i += 1
                rhs = self.unary()
                node = (tok.text, node, rhs) if tok.text == "*" else ("/", node, rhs, tok)
            elif tok.kind in ("num", "id") or (tok.kind == "op" and tok.text == "("):
                node = ("*", node, self.power())
            else:
                return node

    def unary(self):
        tok = self.cur
        if tok.kind == "op" and tok.text in ("+", "-"):
            self.i += 1
            inner = self.unary()
            return ("neg", inner) if tok.text == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.cur.kind == "op" and self.cur.text == "^":
            self.i += 1
            return ("pow", base, self.exponent())
        return base

    def exponent(self) -> int:
        tok = self.cur
        paren = tok.kind == "op" and tok.text == "("
        if paren:
            self.i += 1
            tok = self.cur
        if tok.kind != "num" or not tok.text.isdigit():
            raise self.error("exponent must be a nonnegative integer literal", tok)
        self.i += 1
        if paren:
            if self.cur.text != ")":
                raise self.error("exponent must be a nonnegative integer literal")
            self.i += 1
        return int(tok.text)

    def atom(self):
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            return ("num", Fraction(tok.text))
        if tok.kind == "id":
            self.i += 1
            return ("var", tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            self.eat(")")
            return node
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise self.error(f"expected a number, variable or '(', found {found}")


def _collect_vars(node, out: List[str]) -> None:
    kind = node[0]
    if kind == "var":
        if node[1] not in out:
            out.append(node[1])
    elif kind == "num":
        return
    elif kind in ("neg", "pow"):
        _collect_vars(node[1], out)
    else:
        _collect_vars(node[1], out)
        _collect_vars(node[2], out)


def _build(node, index, nvars: int) -> MPoly:
    kind = node[0]
    if kind == "num":
        return MPoly.const(nvars, node[1])
    if kind == "var":
        return MPoly.var(nvars, index[node[1]])
    if kind == "neg":
        return -_build(node[1], index, nvars)
    if kind == "pow":
        return _build(node[1], index, nvars) ** node[2]
    a = _build(node[1], index, nvars)
    b = _build(node[2], index, nvars)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    tok = node[3]
    if b.degree > 0:
        raise ParseError("division by a non-constant polynomial", tok.line, tok.col)
    if b.is_zero():
        raise ParseError("division by zero", tok.line, tok.col)
    return a * MPoly.const(nvars, 1 / b.coeff((0,) * nvars))


def parse_ast(text: str):
    return _Parser(tokenize(text)).parse()


def parse_polys(texts: Sequence[str], variables: Optional[Sequence[str]] = None) -> Tuple[List[MPoly], Tuple[str, ...]]:
    """Parse several expressions over one shared variable list.

    Without ``variables`` the order is first appearance across the texts (a
    constant-only input gets the single variable ``X``).
    """
    trees = [parse_ast(t) for t in texts]
    found: List[str] = []
    for t in trees:
        _collect_vars(t, found)
    if variables is not None:
        names = list(variables)
        if len(set(names)) != len(names):
            raise ParseError("duplicate variable in the declared order")
        extra = [v for v in found if v not in names]
        if extra:
            raise ParseError(f"undeclared variable {extra[0]!r}")
    else:
        names = found or ["X"]
    if not names:
        raise ParseError("empty variable declaration")
    index = {v: k for k, v in enumerate(names)}
    return [_build(t, index, len(names)) for t in trees], tuple(names)


def parse_poly(text: str, variables: Optional[Sequence[str]] = None) -> MPoly:
    return parse_polys([text], variables)[0][0]


def parse_poly_with_vars(text: str, variables: Optional[Sequence[str]] = None) -> Tuple[MPoly, Tuple[str, ...]]:
    polys, names = parse_polys([text], variables)
    return polys[0], names
