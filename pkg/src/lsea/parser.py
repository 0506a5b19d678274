"""Surface syntax for elements: parse and format.

Grammar (whitespace insignificant, no implicit multiplication):

    expr    := term (('+' | '-') term)*
    term    := atom ('*' atom)*
    atom    := '-' atom | power
    power   := primary ('^' INT)?
    primary := INT ('/' INT)? | GEN | '(' expr ')'

GEN tokens are l<k> / r<k> with the index part of the token, so `l12` is the
twelfth l-generator and `l1*2` is a product.  `^` takes non-negative integer
exponents and binds tightest.  Rational literals are INT '/' INT; `/` has no
other role.

`format_element` prints the canonical form: terms in descending order,
coefficients as p/q with positive denominators, l-parts with exponents and
r-parts as spelled-out letters, e.g. `l1^2*r1 + 2*l1*r1*r1`.  Parsing a
formatted string returns the identical element.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import DomainError, Element, gen_l, gen_r


class ExprSyntaxError(ValueError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<gen>[lr]\d+)|(?P<int>\d+)|(?P<op>[-+*^()/]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = pos + len(text[pos:]) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        if m.group("gen"):
            g = m.group("gen")
            tokens.append(("gen", (g[0], int(g[1:])), m.start("gen")))
        elif m.group("int"):
            tokens.append(("int", int(m.group("int")), m.start("int")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.tokens = _tokenize(text)
        self.n = n
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)

    def parse(self) -> Element:
        out = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError("trailing input", pos)
        return out

    def expr(self) -> Element:
        out = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                out = out + rhs if val == "+" else out - rhs
            else:
                return out

    def term(self) -> Element:
        out = self.atom()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                out = out * self.atom()
            else:
                return out

    def atom(self) -> Element:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.atom()
        return self.power()

    def power(self) -> Element:
        base = self.primary()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            ekind, exp, pos = self.take()
            if ekind != "int":
                raise ExprSyntaxError("exponent must be a non-negative integer", pos)
            return base**exp
        return base

    def primary(self) -> Element:
        kind, val, pos = self.take()
        if kind == "int":
            nkind, nval, _ = self.peek()
            if nkind == "op" and nval == "/":
                self.take()
                dkind, den, dpos = self.take()
                if dkind != "int":
                    raise ExprSyntaxError("expected integer denominator", dpos)
                if den == 0:
                    raise ExprSyntaxError("zero denominator", dpos)
                return Element.one(self.n) * Fraction(val, den)
            return Element.one(self.n) * val
        if kind == "gen":
            letter, idx = val
            try:
                return gen_l(self.n, idx) if letter == "l" else gen_r(self.n, idx)
            except DomainError as exc:
                raise ExprSyntaxError(str(exc), pos) from exc
        if kind == "op" and val == "(":
            out = self.expr()
            self.expect_op(")")
            return out
        raise ExprSyntaxError("expected a literal, generator, or '('", pos)


def parse_element(text: str, n: int) -> Element:
    """Parse expression text into a canonical element of U_n."""
    return _Parser(text, n).parse()


def _word_str(word) -> str:
    factors = [
        f"l{i + 1}" if e == 1 else f"l{i + 1}^{e}"
        for i, e in enumerate(word.lexp)
        if e
    ]
    factors.extend(f"r{j}" for j in word.rword)
    return "*".join(factors)


def format_element(g: Element) -> str:
    """Canonical text form; parse(format(g)) == g."""
    if g.is_zero:
        return "0"
    pieces = []
    for word, c in g.canonical_terms():
        ws = _word_str(word)
        mag = abs(c)
        if not ws:
            body = str(mag)
        elif mag == 1:
            body = ws
        else:
            body = f"{mag}*{ws}"
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
