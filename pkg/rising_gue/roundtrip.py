from . import ast, visitor


class AstToExpressionVisitor(visitor.NodeVisitor):
    """
    :class:`NodeVisitor` that prints an expression tree back as text that
    parses to the same tree. Parentheses are only added where the
    :attr:`precedence` of a child is lower than that of its parent.

    Folded constants come back with full precision, e.g.
    ``unparse(fold_constants(parse("2 * pi")))`` gives ``"6.283185307179586"``.
    """

    def visit_Identifier(self, node: ast.Identifier) -> str:
        """:meta private:"""
        return node.name

    def _visit_Literal(self, node: ast._Literal) -> str:
        """:meta private:"""
        return node.val

    visit_Integer = _visit_Literal
    visit_Float = _visit_Literal
    visit_Boolean = _visit_Literal

    def generic_visit(self, node: ast._Node) -> str:
        """Operator tokens print as their symbol.

        :meta private:
        """
        return node.symbol  # type: ignore[attr-defined]

    def _infix(self, op: ast._Token, left: ast._Node, right: ast._Node) -> str:
        # Equal precedence needs parentheses on the side the operator does not
        # associate to; comparisons do not chain at all.
        right_assoc = getattr(op, "right_assoc", False)
        chains = not isinstance(op, ast._Comparator)
        lhs = self._paren(left, op.precedence, not (chains and not right_assoc))
        rhs = self._paren(right, op.precedence, not (chains and right_assoc))
        return f"{lhs} {self.visit(op)} {rhs}"

    def visit_BinOp(self, node: ast.BinOp) -> str:
        """:meta private:"""
        return self._infix(node.op, node.left, node.right)

    def visit_Compare(self, node: ast.Compare) -> str:
        """:meta private:"""
        return self._infix(node.comparator, node.left, node.right)

    def visit_BoolOp(self, node: ast.BoolOp) -> str:
        """:meta private:"""
        return self._infix(node.op, node.left, node.right)

    def visit_UnaryOp(self, node: ast.UnaryOp) -> str:
        """:meta private:"""
        return self.visit(node.op) + self._paren(
            node.operand, node.op.precedence, False
        )

    def visit_Call(self, node: ast.Call) -> str:
        """:meta private:"""
        args = ", ".join(self.visit(n) for n in node.args)
        return f"{node.name}({args})"

    def _paren(self, node: ast._Node, parent: int, strict: bool) -> str:
        """
        Visits ``node`` and wraps it in parentheses if it binds weaker than
        ``parent`` (or equally, when ``strict``).

        :meta private:
        """
        text = self.visit(node)
        if node.precedence < parent or (strict and node.precedence == parent):
            return "(" + text + ")"
        return text
