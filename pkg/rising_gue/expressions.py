"""
Test functions written as text, e.g. ``"exp(-x^2)"`` or ``"abs(x) < 1"``,
parsed into an expression tree and compiled to vectorized numpy callables.
"""

import logging
from typing import Callable, Mapping, Sequence, Set

import numpy as np

from . import ast, exceptions
from .grammar import ExpressionLexer, ExpressionParser  # type: ignore
from .numeric import AstToNumpyVisitor
from .rewrite import ConstantFolder, FreeVariables
from .roundtrip import AstToExpressionVisitor

log = logging.getLogger(__name__)

TestFunction = Callable[..., np.ndarray]


def parse(text: str) -> ast._Node:
    """
    Parses an expression.

    Raises:
        TokenizingException, ParsingException, UnknownFunctionException,
        ArgumentCountException
    """
    lexer = ExpressionLexer()
    parser = ExpressionParser()
    if not text.strip():
        raise exceptions.ParsingException(None, eof=True)
    return parser.parse(lexer.tokenize(text))


def fold_constants(tree: ast._Node) -> ast._Node:
    return ConstantFolder().visit(tree)


def free_variables(tree: ast._Node) -> Set[str]:
    return FreeVariables().visit(tree)


def unparse(tree: ast._Node) -> str:
    return AstToExpressionVisitor().visit(tree)


def normalize(text: str) -> str:
    """
    ``text`` with its constants folded, printed by :func:`unparse`:
    ``"2*pi*x"`` becomes ``"6.283185307179586 * x"``.
    """
    return unparse(fold_constants(parse(text)))


def compile_function(text: str, variables: Sequence[str] = ("x",)) -> TestFunction:
    """
    Compiles an expression to a function of one array per entry of
    ``variables``, evaluated elementwise with broadcasting. Comparisons and
    boolean operators give ``0.0``/``1.0``.

    Args:
        text: The expression.
        variables: Names the expression may use, in argument order.
    Returns:
        A callable returning a float array of the broadcast argument shape.
    Raises:
        UnknownVariableException: For names that are neither declared nor
            constants.
        ExpressionSyntaxError, FunctionCallException
    """
    tree = fold_constants(parse(text))
    unknown = free_variables(tree) - set(variables)
    if unknown:
        raise exceptions.UnknownVariableException(sorted(unknown)[0], variables)
    evaluate = AstToNumpyVisitor(variables).visit(tree)
    names = tuple(variables)
    log.debug("Compiled %r as %s", text, unparse(tree))

    def f(*args) -> np.ndarray:
        if len(args) != len(names):
            raise exceptions.ArgumentCountException(text, len(names), len(args))
        arrays = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
        with np.errstate(divide="ignore", invalid="ignore"):
            value = evaluate(dict(zip(names, arrays)))
        shape = arrays[0].shape if arrays else ()
        return np.broadcast_to(value, shape).astype(float)

    return f


def compile_functions(
    texts: Mapping[str, str], variables: Sequence[str] = ("x",)
) -> Mapping[str, TestFunction]:
    """:func:`compile_function` for every value, keyed like ``texts``."""
    return {name: compile_function(text, variables) for name, text in texts.items()}
