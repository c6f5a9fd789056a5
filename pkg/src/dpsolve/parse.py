"""Recursive-descent parser for rational expressions in x and y.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' INT)?
    atom   := INT | 'x' | 'y' | '(' expr ')'

Whitespace is ignored and there is no implicit multiplication.  Offsets in
errors are byte offsets into the UTF-8 encoded input.
"""

from __future__ import annotations

from typing import List, Tuple

from .errors import DivisionByZeroPoly, NonRational, ParseError
from .poly import BivarPoly
from .ratfunc import RatFunc

_OPS = "+-*/^()"


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], i))
            i = j
            continue
        if ch in "xy":
            if i + 1 < n and (text[i + 1].isalnum() or text[i + 1] == "_"):
                raise ParseError(f"unknown identifier starting with {ch!r}", _boff(text, i), ("x", "y"))
            toks.append(("var", ch, i))
            i += 1
            continue
        if ch in _OPS:
            toks.append((ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", _boff(text, i),
                         ("integer", "x", "y", "(", "+", "-", "*", "/", "^", ")"))
    toks.append(("end", "", n))
    return toks


def _boff(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, msg, expected):
        t = self.peek()
        raise ParseError(msg, _boff(self.text, t[2]), expected)

    def parse(self) -> RatFunc:
        v = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}", ("+", "-", "*", "/", "end of input"))
        return v

    def expr(self) -> RatFunc:
        v = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            r = self.term()
            v = v + r if op == "+" else v - r
        return v

    def term(self) -> RatFunc:
        v = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, off = self.advance()
            r = self.unary()
            if op == "*":
                v = v * r
            else:
                if r.is_zero():
                    raise ParseError("division by zero", _boff(self.text, off), ())
                v = v / r
        return v

    def unary(self) -> RatFunc:
        k = self.peek()[0]
        if k == "-":
            self.advance()
            return -self.unary()
        if k == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            kind, val, off = self.peek()
            if kind == "var":
                raise NonRational("variable in exponent", _boff(self.text, off), ("integer",))
            if kind == "(":
                # a parenthesized exponent is accepted only if it is an integer literal
                save = self.pos
                self.advance()
                if self.peek()[0] == "int" and self.toks[self.pos + 1][0] == ")":
                    n = int(self.advance()[1])
                    self.advance()
                    return base ** n
                self.pos = save
                self._scan_exponent_vars()
                self.error("exponent must be a nonnegative integer literal", ("integer",))
            if kind != "int":
                self.error("exponent must be a nonnegative integer literal", ("integer",))
            self.advance()
            return base ** int(val)
        return base

    def _scan_exponent_vars(self):
        depth = 0
        for kind, _, off in self.toks[self.pos:]:
            if kind == "(":
                depth += 1
            elif kind == ")":
                depth -= 1
                if depth == 0:
                    return
            elif kind == "var":
                raise NonRational("variable in exponent", _boff(self.text, off), ("integer",))
            elif kind == "end":
                return

    def atom(self) -> RatFunc:
        kind, val, off = self.peek()
        if kind == "int":
            self.advance()
            return RatFunc(BivarPoly.const(int(val)))
        if kind == "var":
            self.advance()
            return RatFunc(BivarPoly.x() if val == "x" else BivarPoly.y())
        if kind == "(":
            self.advance()
            v = self.expr()
            if self.peek()[0] != ")":
                self.error("missing ')'", (")", "+", "-", "*", "/"))
            self.advance()
            return v
        what = "end of input" if kind == "end" else repr(val)
        self.error(f"unexpected {what}", ("integer", "x", "y", "(", "-"))


def parse_expr(text: str) -> RatFunc:
    """Parse ``text`` into a canonical :class:`RatFunc`."""
    try:
        return _Parser(text).parse()
    except DivisionByZeroPoly as exc:
        raise ParseError(str(exc), len(text.encode("utf-8")), ()) from exc


def parse_poly(text: str) -> BivarPoly:
    r = parse_expr(text)
    if not r.is_polynomial():
        raise ParseError("expected a polynomial", 0, ())
    return r.as_poly()
