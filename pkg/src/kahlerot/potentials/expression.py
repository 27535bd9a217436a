"""
Expression trees for potentials and raw costs.

Nodes are frozen pydantic models, so a spec can be dumped straight into a report.
``evaluate`` runs a tree over jets (for derivatives) or over floats and numpy
arrays (for values on point clouds); ``format_expr`` prints a fully
parenthesised text that parses back to an equivalent tree.
"""

from typing import Annotated, Literal, Mapping, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field

from ..errors import SpecError
from ..jets import Jet4, Scalar, apply_primitive

Value = Jet4 | Scalar | float
FUNCTIONS = ("exp", "log", "cosh", "sqrt")


class _Node(BaseModel):
    model_config = ConfigDict(frozen=True)


class Num(_Node):
    kind: Literal["num"] = "num"
    value: float


class Var(_Node):
    kind: Literal["var"] = "var"
    symbol: Literal["u", "x", "y"] = "u"
    index: int = Field(ge=1)


class Neg(_Node):
    kind: Literal["neg"] = "neg"
    operand: "Expr"


class BinOp(_Node):
    kind: Literal["binop"] = "binop"
    op: Literal["+", "-", "*", "/"]
    left: "Expr"
    right: "Expr"


class Pow(_Node):
    kind: Literal["pow"] = "pow"
    base: "Expr"
    exponent: float


class Call(_Node):
    kind: Literal["call"] = "call"
    func: Literal["exp", "log", "cosh", "sqrt"]
    arg: "Expr"


Expr = Annotated[Union[Num, Var, Neg, BinOp, Pow, Call], Field(discriminator="kind")]

for _model in (Neg, BinOp, Pow, Call):
    _model.model_rebuild()

_BINARY = {"+": "add", "-": "sub", "*": "mul", "/": "div"}


def evaluate(expr: Expr, variables: Mapping[str, Sequence[Value]]) -> Value:
    """Evaluate ``expr`` with ``variables[symbol][index - 1]`` bound to each variable."""
    match expr:
        case Num(value=value):
            return value
        case Var(symbol=symbol, index=index):
            bound = variables.get(symbol)
            if bound is None or index > len(bound):
                raise SpecError(f"variable {symbol}{index} is not bound")
            return bound[index - 1]
        case Neg(operand=operand):
            return apply_primitive("neg", evaluate(operand, variables))
        case BinOp(op=op, left=left, right=right):
            return apply_primitive(
                _BINARY[op], evaluate(left, variables), evaluate(right, variables)
            )
        case Pow(base=base, exponent=exponent):
            return apply_primitive("pow_const", evaluate(base, variables), exponent)
        case Call(func=func, arg=arg):
            return apply_primitive(func, evaluate(arg, variables))
    raise SpecError(f"unsupported expression node {expr!r}")


def format_expr(expr: Expr) -> str:
    match expr:
        case Num(value=value):
            text = repr(float(value))
            return f"(-{text[1:]})" if value < 0 else text
        case Var(symbol=symbol, index=index):
            return f"{symbol}{index}"
        case Neg(operand=operand):
            return f"(-{format_expr(operand)})"
        case BinOp(op=op, left=left, right=right):
            return f"({format_expr(left)} {op} {format_expr(right)})"
        case Pow(base=base, exponent=exponent):
            return f"({format_expr(base)}^{float(exponent)!r})"
        case Call(func=func, arg=arg):
            return f"{func}({format_expr(arg)})"
    raise SpecError(f"unsupported expression node {expr!r}")


def variables_used(expr: Expr) -> set[tuple[str, int]]:
    match expr:
        case Num():
            return set()
        case Var(symbol=symbol, index=index):
            return {(symbol, index)}
        case Neg(operand=operand):
            return variables_used(operand)
        case BinOp(left=left, right=right):
            return variables_used(left) | variables_used(right)
        case Pow(base=base):
            return variables_used(base)
        case Call(arg=arg):
            return variables_used(arg)
    return set()
