import logging
import math
from typing import Callable, Dict, Sequence

import numpy as np

from . import ast, exceptions, visitor
from .special_fns import semicircle_density

log = logging.getLogger(__name__)

Env = Dict[str, np.ndarray]
Evaluator = Callable[[Env], np.ndarray]

CONSTANT_VALUES = {"pi": math.pi, "e": math.e}

NUMPY_FUNCTIONS: Dict[str, Callable[..., np.ndarray]] = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "arctan": np.arctan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "min": np.minimum,
    "max": np.maximum,
    "where": lambda cond, a, b: np.where(cond != 0, a, b),
    "semicircle": semicircle_density,
}


def _as_float(value) -> np.ndarray:
    return np.asarray(value, dtype=float)


class AstToNumpyVisitor(visitor.NodeVisitor):
    """
    :class:`NodeVisitor` that turns an expression tree into a closure over a
    mapping of variable names to arrays. Comparisons and boolean operators
    yield ``0.0``/``1.0`` so that indicator functions can be multiplied.

    Args:
        variables: Names the expression may refer to besides the constants.
    """

    def __init__(self, variables: Sequence[str] = ("x",)):
        super().__init__()
        self.variables = tuple(variables)

    def visit_Identifier(self, node: ast.Identifier) -> Evaluator:
        ":meta private:"
        if node.name in self.variables:
            name = node.name
            return lambda env: _as_float(env[name])
        if node.name in CONSTANT_VALUES:
            value = CONSTANT_VALUES[node.name]
            return lambda env: _as_float(value)
        raise exceptions.UnknownVariableException(node.name, self.variables)

    def _visit_Literal(self, node: ast._Literal) -> Evaluator:
        ":meta private:"
        value = float(node.py_val)
        return lambda env: _as_float(value)

    visit_Integer = _visit_Literal
    visit_Float = _visit_Literal
    visit_Boolean = _visit_Literal

    def visit_Add(self, node: ast.Add) -> Callable:
        ":meta private:"
        return np.add

    def visit_Sub(self, node: ast.Sub) -> Callable:
        ":meta private:"
        return np.subtract

    def visit_Mult(self, node: ast.Mult) -> Callable:
        ":meta private:"
        return np.multiply

    def visit_Div(self, node: ast.Div) -> Callable:
        ":meta private:"
        return np.divide

    def visit_Pow(self, node: ast.Pow) -> Callable:
        ":meta private:"
        return np.power

    def visit_BinOp(self, node: ast.BinOp) -> Evaluator:
        ":meta private:"
        op = self.visit(node.op)
        left, right = self.visit(node.left), self.visit(node.right)
        return lambda env: op(left(env), right(env))

    def visit_Eq(self, node: ast.Eq) -> Callable:
        ":meta private:"
        return np.equal

    def visit_NotEq(self, node: ast.NotEq) -> Callable:
        ":meta private:"
        return np.not_equal

    def visit_Lt(self, node: ast.Lt) -> Callable:
        ":meta private:"
        return np.less

    def visit_LtE(self, node: ast.LtE) -> Callable:
        ":meta private:"
        return np.less_equal

    def visit_Gt(self, node: ast.Gt) -> Callable:
        ":meta private:"
        return np.greater

    def visit_GtE(self, node: ast.GtE) -> Callable:
        ":meta private:"
        return np.greater_equal

    def visit_Compare(self, node: ast.Compare) -> Evaluator:
        ":meta private:"
        op = self.visit(node.comparator)
        left, right = self.visit(node.left), self.visit(node.right)
        return lambda env: _as_float(op(left(env), right(env)))

    def visit_And(self, node: ast.And) -> Callable:
        ":meta private:"
        return np.logical_and

    def visit_Or(self, node: ast.Or) -> Callable:
        ":meta private:"
        return np.logical_or

    def visit_BoolOp(self, node: ast.BoolOp) -> Evaluator:
        ":meta private:"
        op = self.visit(node.op)
        left, right = self.visit(node.left), self.visit(node.right)
        return lambda env: _as_float(op(left(env) != 0, right(env) != 0))

    def visit_UnaryOp(self, node: ast.UnaryOp) -> Evaluator:
        ":meta private:"
        operand = self.visit(node.operand)
        if isinstance(node.op, ast.Not):
            return lambda env: _as_float(operand(env) == 0)
        return lambda env: np.negative(operand(env))

    def visit_Call(self, node: ast.Call) -> Evaluator:
        ":meta private:"
        try:
            func = NUMPY_FUNCTIONS[node.name]
        except KeyError:
            raise exceptions.UnknownFunctionException(node.name)
        args = [self.visit(a) for a in node.args]
        return lambda env: _as_float(func(*(a(env) for a in args)))
