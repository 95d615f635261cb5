import pytest

from rising_gue.expressions import parse, unparse
from rising_gue.roundtrip import AstToExpressionVisitor


@pytest.mark.parametrize(
    "expression",
    [
        "x",
        "1.5",
        "1e-05",
        "true",
        "x + 1",
        "x - 1 - 2",
        "2 - (3 - x)",
        "x / (2 * y)",
        "(x + 1) * y",
        "2 ^ 3 ^ x",
        "(2 ^ 3) ^ x",
        "-x ^ 2",
        "(-x) ^ 2",
        "-(x + 1)",
        "x - -1",
        "x + 1 < 2",
        "(x < 1) * x",
        "abs(x) <= 1",
        "x == 0 or x != 1 and true",
        "(x == 0 or x != 1) and true",
        "x > 0 and (x < 1 and y < 1)",
        "not x < 1",
        "not (x < 1 and y > 0)",
        "exp(-x ^ 2 / 2)",
        "max(x, 0) + min(y, 1)",
        "where(x > 0, sqrt(x), 0)",
        "2 * semicircle(x)",
        # Precedence checks:
        "1 * (2 + -3 - 4) / 5",
    ],
)
def test_expression_roundtrip(expression: str, lexer, parser):
    tree = parser.parse(lexer.tokenize(expression))
    res = AstToExpressionVisitor().visit(tree)

    assert res == expression


@pytest.mark.parametrize(
    "expression",
    ["x ** 2", "((x))", "x^(-2.0)", "NOT x>1 AND x<3", "exp( - x )"],
)
def test_unparse_reparses_to_same_tree(expression: str):
    tree = parse(expression)

    assert parse(unparse(tree)) == tree
