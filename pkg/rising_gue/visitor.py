from dataclasses import fields
from typing import Any, Iterator, Tuple

from . import ast


def iter_dataclass_fields(node: ast._Node) -> Iterator[Tuple[str, Any]]:
    """``(name, value)`` for every field of ``node``, in declaration order."""
    for f in fields(node):
        yield f.name, getattr(node, f.name)


def iter_child_nodes(node: ast._Node) -> Iterator[ast._Node]:
    """
    The direct children of ``node``: node-valued fields and the nodes inside
    list-valued ones (call arguments). Operator tokens are children too.
    """
    for _, value in iter_dataclass_fields(node):
        if isinstance(value, ast._Node):
            yield value
        elif isinstance(value, list):
            yield from (item for item in value if isinstance(item, ast._Node))


class NodeVisitor:
    """
    Base class for visitors that walk an expression tree, calling
    ``visit_<ClassName>`` for every node found and :func:`generic_visit` when no
    such method exists. The return value of the visitor method is forwarded by
    :func:`visit`.
    """

    def visit(self, node: ast._Node) -> Any:
        visitor = getattr(self, "visit_" + type(node).__name__, self.generic_visit)
        return visitor(node)

    def generic_visit(self, node: ast._Node) -> Any:
        """Visits the children of ``node``, depth first."""
        for child in iter_child_nodes(node):
            self.visit(child)


class NodeTransformer(NodeVisitor):
    """
    A :class:`NodeVisitor` whose visitor methods return the nodes that replace
    the visited ones. The default rebuilds every node from its visited fields,
    so a transformer without methods returns an equal tree.
    """

    def _replace(self, value: Any) -> Any:
        if isinstance(value, ast._Node):
            return self.visit(value)
        if isinstance(value, list):
            return [self._replace(item) for item in value]
        return value

    def generic_visit(self, node: ast._Node) -> ast._Node:
        new_fields = {
            name: self._replace(value) for name, value in iter_dataclass_fields(node)
        }
        return type(node)(**new_fields)
