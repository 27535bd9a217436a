"""
Recursive-descent parser for the potential expression language.

    spec   := expr ("where" expr ">" "0")?
    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | power
    power  := atom ("^" number)?
    atom   := number | var | func "(" expr ")" | "(" expr ")"
    func   := "exp" | "log" | "cosh" | "sqrt"
    var    := ("u"|"x"|"y") digit+

Exponentiation binds tighter than unary minus, so ``-u1^2`` is ``-(u1^2)``.
"""

import re
from typing import Iterable, NamedTuple

from ..errors import ExpressionSyntaxError
from .expression import FUNCTIONS, BinOp, Call, Expr, Neg, Num, Pow, Var

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>[uxy]\d+)(?![A-Za-z_])
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()>])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(
                f"unexpected character {text[position]!r}", position
            )
        kind = match.lastgroup or ""
        if kind != "ws":
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: Iterable[str]) -> None:
        self.tokens = tokenize(text)
        self.pos = 0
        self.symbols = frozenset(symbols)

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        token = self.current
        if token.kind == kind and (text is None or token.text == text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        token = self.accept(kind, text)
        if token is None:
            wanted = text or kind
            found = self.current.text or "end of input"
            raise ExpressionSyntaxError(
                f"expected {wanted!r}, found {found!r}", self.current.position
            )
        return token

    def expr(self) -> Expr:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            node = BinOp(op=op, left=node, right=self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance().text
            node = BinOp(op=op, left=node, right=self.factor())
        return node

    def factor(self) -> Expr:
        if self.accept("op", "-"):
            return Neg(operand=self.factor())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self.accept("op", "^"):
            exponent = self.expect("number")
            node = Pow(base=node, exponent=float(exponent.text))
        return node

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Num(value=float(token.text))
        if token.kind == "var":
            self.advance()
            symbol, index = token.text[0], int(token.text[1:])
            if symbol not in self.symbols:
                raise ExpressionSyntaxError(
                    f"variable {token.text!r} is not allowed here", token.position
                )
            if index == 0:
                raise ExpressionSyntaxError("variable index 0", token.position)
            return Var(symbol=symbol, index=index)
        if token.kind == "ident":
            if token.text not in FUNCTIONS:
                raise ExpressionSyntaxError(
                    f"unknown function {token.text!r}", token.position
                )
            self.advance()
            self.expect("op", "(")
            arg = self.expr()
            self.expect("op", ")")
            return Call(func=token.text, arg=arg)
        if self.accept("op", "("):
            node = self.expr()
            self.expect("op", ")")
            return node
        found = token.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected {found!r}", token.position)


def parse_expression(text: str, symbols: Iterable[str] = ("u",)) -> Expr:
    """Parse a bare expression (no ``where`` clause)."""
    parser = _Parser(text, symbols)
    node = parser.expr()
    parser.expect("eof")
    return node


def parse_with_domain(text: str) -> tuple[Expr, Expr | None]:
    """Parse ``expr ("where" expr ">" "0")?`` over the ``u`` variables."""
    parser = _Parser(text, ("u",))
    node = parser.expr()
    predicate = None
    if parser.accept("ident", "where"):
        predicate = parser.expr()
        parser.expect("op", ">")
        zero = parser.expect("number")
        if float(zero.text) != 0.0:
            raise ExpressionSyntaxError("domain clause must compare with 0", zero.position)
    parser.expect("eof")
    return node, predicate
