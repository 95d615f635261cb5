import logging
import math
from typing import Set

import numpy as np

from . import ast
from .numeric import CONSTANT_VALUES, AstToNumpyVisitor
from .visitor import NodeTransformer, NodeVisitor, iter_child_nodes

log = logging.getLogger(__name__)


class ConstantFolder(NodeTransformer):
    """
    A :class:`NodeTransformer` that replaces every subtree without free
    variables by its value, e.g. ``2 * pi`` -> ``Float('6.283185307179586')``.

    Named constants are folded into :class:`Float` literals. Subtrees whose
    value is not finite (``1 / 0``, ``log(-1)``) are left as they are.
    """

    def __init__(self):
        self._evaluator = AstToNumpyVisitor(variables=())

    def visit_Identifier(self, node: ast.Identifier) -> ast._Node:
        """:meta private:"""
        if node.name in CONSTANT_VALUES:
            return ast.Float(repr(CONSTANT_VALUES[node.name]))
        return node

    def _fold(self, node: ast._Node, boolean: bool = False) -> ast._Node:
        new = self.generic_visit(node)
        if FreeVariables().visit(new):
            return new
        with np.errstate(all="ignore"):
            value = float(self._evaluator.visit(new)({}))
        if not math.isfinite(value):
            log.debug("Not folding %s: value %s", new, value)
            return new
        if boolean:
            return ast.Boolean("true" if value else "false")
        return ast.Float(repr(value))

    def visit_BinOp(self, node: ast.BinOp) -> ast._Node:
        """:meta private:"""
        return self._fold(node)

    def visit_Call(self, node: ast.Call) -> ast._Node:
        """:meta private:"""
        return self._fold(node)

    def visit_Compare(self, node: ast.Compare) -> ast._Node:
        """:meta private:"""
        return self._fold(node, boolean=True)

    def visit_BoolOp(self, node: ast.BoolOp) -> ast._Node:
        """:meta private:"""
        return self._fold(node, boolean=True)

    def visit_UnaryOp(self, node: ast.UnaryOp) -> ast._Node:
        """:meta private:"""
        return self._fold(node, boolean=isinstance(node.op, ast.Not))


class FreeVariables(NodeVisitor):
    """
    A :class:`NodeVisitor` collecting the names an expression depends on,
    leaving out the named constants and the called functions.
    """

    def visit_Identifier(self, node: ast.Identifier) -> Set[str]:
        """:meta private:"""
        if node.name in CONSTANT_VALUES:
            return set()
        return {node.name}

    def visit_Call(self, node: ast.Call) -> Set[str]:
        """:meta private:"""
        names: Set[str] = set()
        for arg in node.args:
            names |= self.visit(arg)
        return names

    def generic_visit(self, node: ast._Node) -> Set[str]:
        names: Set[str] = set()
        for child in iter_child_nodes(node):
            names |= self.visit(child)
        return names
