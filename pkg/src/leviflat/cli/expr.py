"""Expression syntax for defining functions.

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | base ('^' uint)?
    base   := 'Re(' expr ')' | 'Im(' expr ')' | 'conj(' expr ')'
            | 'z' uint | rational | 'i' | '(' expr ')'
    rational := uint ('/' uint)?
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from ..algebra.numbers import GaussianRational, Q, rational_str
from ..algebra.poly import ConjPolynomial


class ExpressionError(ValueError):
    def __init__(self, message: str, line: int, col: int, text: str = ""):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.text = text


# -- AST ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Rational:
    value: Q


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Re:
    arg: "Node"


@dataclass(frozen=True)
class Im:
    arg: "Node"


@dataclass(frozen=True)
class Conj:
    arg: "Node"


Node = Union[Var, Rational, ImagUnit, Neg, Add, Sub, Mul, Pow, Re, Im, Conj]

# -- tokenizer ---------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def _line_col(text: str, pos: int) -> tuple:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            line, col = _line_col(text, pos)
            raise ExpressionError(f"unexpected character {text[pos]!r}", line, col, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        line, col = _line_col(self.text, tok.pos)
        raise ExpressionError(message, line, col, self.text)

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek().kind == "op" and self.peek().text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            tok = self.peek()
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            self.error(f"expected {text!r}, found {found}")

    def parse(self) -> Node:
        if self.peek().kind == "end":
            self.error("empty expression")
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while self.accept("*"):
            node = Mul(node, self.factor())
        return node

    def factor(self) -> Node:
        if self.accept("-"):
            return Neg(self.factor())
        node = self.base()
        if self.accept("^"):
            tok = self.peek()
            if tok.kind == "op" and tok.text in "-(":
                if tok.text == "-" or self._negative_in_parens():
                    self.error("negative exponents are not allowed", tok)
            if tok.kind != "num":
                self.error("exponent must be a non-negative integer", tok)
            self.advance()
            node = Pow(node, int(tok.text))
        return node

    def _negative_in_parens(self) -> bool:
        nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
        return nxt is not None and nxt.kind == "op" and nxt.text == "-"

    def base(self) -> Node:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            num = int(tok.text)
            if self.peek().kind == "op" and self.peek().text == "/" and self.tokens[self.i + 1].kind == "num":
                self.advance()
                den_tok = self.advance()
                den = int(den_tok.text)
                if den == 0:
                    self.error("division by zero", den_tok)
                return Rational(Q(num, den))
            return Rational(Q(num))
        if tok.kind == "name":
            self.advance()
            name = tok.text
            if name in ("Re", "Im", "conj"):
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return {"Re": Re, "Im": Im, "conj": Conj}[name](arg)
            if name == "i":
                return ImagUnit()
            m = re.fullmatch(r"z(\d+)", name)
            if m and int(m.group(1)) >= 1:
                return Var(int(m.group(1)))
            self.error(f"unknown identifier {name!r}", tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        self.error(f"expected an operand, found {found}")


def parse_expression(text: str) -> Node:
    return _Parser(text).parse()


# -- printing ----------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Neg: 3, Pow: 4}


def _prec(node) -> int:
    return _PREC.get(type(node), 5)


def print_expression(node: Node) -> str:
    """Source text that parses back to the same tree."""
    t = type(node)
    if t is Var:
        return f"z{node.index}"
    if t is Rational:
        return rational_str(node.value)
    if t is ImagUnit:
        return "i"
    if t in (Re, Im, Conj):
        return {Re: "Re", Im: "Im", Conj: "conj"}[t] + "(" + print_expression(node.arg) + ")"
    if t is Neg:
        return "-" + _wrap(node.arg, _prec(node.arg) < 3)
    if t is Pow:
        # a rational base "1/2" must be bracketed, as must anything below atom level
        base = node.base
        needs = _prec(base) < 5 or (type(base) is Rational and "/" in rational_str(base.value))
        return _wrap(base, needs) + "^" + str(node.exponent)
    if t is Mul:
        left = _wrap(node.left, _prec(node.left) < 2)
        right = _wrap(node.right, _prec(node.right) <= 2 or t_is_rational_fraction(node.right))
        return f"{left}*{right}"
    if t in (Add, Sub):
        op = "+" if t is Add else "-"
        left = print_expression(node.left)
        right = _wrap(node.right, _prec(node.right) <= 1)
        return f"{left} {op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


def t_is_rational_fraction(node) -> bool:
    return type(node) is Rational and "/" in rational_str(node.value)


def _wrap(node, needed: bool) -> str:
    s = print_expression(node)
    return f"({s})" if needed else s


# -- lowering ----------------------------------------------------------------------


def max_variable(node: Node) -> int:
    t = type(node)
    if t is Var:
        return node.index
    if t in (Rational, ImagUnit):
        return 0
    if t in (Neg, Re, Im, Conj):
        return max_variable(node.arg)
    if t is Pow:
        return max_variable(node.base)
    return max(max_variable(node.left), max_variable(node.right))


def lower(node: Node, nvars: int | None = None) -> ConjPolynomial:
    """Exact polynomial in ``(z, conj z)``; ``Re e = (e + conj e)/2``, ``Im e = (e - conj e)/(2i)``."""
    n = max(max_variable(node), 1) if nvars is None else nvars
    if max_variable(node) > n:
        raise ValueError(f"expression uses z{max_variable(node)} but only {n} variables were requested")
    return _lower(node, n)


def _lower(node, n) -> ConjPolynomial:
    t = type(node)
    if t is Var:
        return ConjPolynomial.z(n, node.index)
    if t is Rational:
        return ConjPolynomial.constant(n, node.value)
    if t is ImagUnit:
        return ConjPolynomial.constant(n, GaussianRational(0, 1))
    if t is Neg:
        return -_lower(node.arg, n)
    if t is Add:
        return _lower(node.left, n) + _lower(node.right, n)
    if t is Sub:
        return _lower(node.left, n) - _lower(node.right, n)
    if t is Mul:
        return _lower(node.left, n) * _lower(node.right, n)
    if t is Pow:
        return _lower(node.base, n) ** node.exponent
    if t is Conj:
        return _lower(node.arg, n).conj()
    if t is Re:
        return _lower(node.arg, n).real_part()
    if t is Im:
        return _lower(node.arg, n).imag_part()
    raise TypeError(f"not an expression node: {node!r}")


def parse_polynomial(text: str, nvars: int | None = None) -> ConjPolynomial:
    return lower(parse_expression(text), nvars)
