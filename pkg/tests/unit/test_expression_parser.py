import pytest

from rising_gue import ast, exceptions
from rising_gue.expressions import parse


@pytest.mark.parametrize(
    "value, expected_type",
    [
        ("12", ast.Integer),
        ("0", ast.Integer),
        ("1.0", ast.Float),
        ("1.", ast.Float),
        (".5", ast.Float),
        ("1e5", ast.Float),
        ("1e-5", ast.Float),
        ("1.0e5", ast.Float),
        ("1.5E+3", ast.Float),
        ("true", ast.Boolean),
        ("false", ast.Boolean),
        ("True", ast.Boolean),
        ("x", ast.Identifier),
        ("pi", ast.Identifier),
        ("_u1", ast.Identifier),
    ],
)
def test_primitive_parsing(lexer, parser, value: str, expected_type: type):
    res = parser.parse(lexer.tokenize(value))

    assert isinstance(res, expected_type)


@pytest.mark.parametrize(
    "value, expected",
    [
        ("1", 1),
        ("2.5", 2.5),
        ("1e3", 1000.0),
        ("TRUE", True),
        ("False", False),
    ],
)
def test_literal_values(value: str, expected):
    assert parse(value).py_val == expected


@pytest.mark.parametrize(
    "value, expected",
    [
        (
            "1 + 2 * x",
            ast.BinOp(
                ast.Add(),
                ast.Integer("1"),
                ast.BinOp(ast.Mult(), ast.Integer("2"), ast.Identifier("x")),
            ),
        ),
        (
            "(1 + 2) * x",
            ast.BinOp(
                ast.Mult(),
                ast.BinOp(ast.Add(), ast.Integer("1"), ast.Integer("2")),
                ast.Identifier("x"),
            ),
        ),
        (
            "x - 1 - 2",
            ast.BinOp(
                ast.Sub(),
                ast.BinOp(ast.Sub(), ast.Identifier("x"), ast.Integer("1")),
                ast.Integer("2"),
            ),
        ),
        (
            "x / 2 / 3",
            ast.BinOp(
                ast.Div(),
                ast.BinOp(ast.Div(), ast.Identifier("x"), ast.Integer("2")),
                ast.Integer("3"),
            ),
        ),
        (
            "2 ^ 3 ^ x",
            ast.BinOp(
                ast.Pow(),
                ast.Integer("2"),
                ast.BinOp(ast.Pow(), ast.Integer("3"), ast.Identifier("x")),
            ),
        ),
        (
            "x ** 2",
            ast.BinOp(ast.Pow(), ast.Identifier("x"), ast.Integer("2")),
        ),
        (
            "-x ^ 2",
            ast.UnaryOp(
                ast.USub(), ast.BinOp(ast.Pow(), ast.Identifier("x"), ast.Integer("2"))
            ),
        ),
        (
            "-x * 2",
            ast.BinOp(
                ast.Mult(),
                ast.UnaryOp(ast.USub(), ast.Identifier("x")),
                ast.Integer("2"),
            ),
        ),
        (
            "x - -1",
            ast.BinOp(
                ast.Sub(),
                ast.Identifier("x"),
                ast.UnaryOp(ast.USub(), ast.Integer("1")),
            ),
        ),
    ],
)
def test_arithmetic_precedence(value: str, expected: ast._Node):
    assert parse(value) == expected


@pytest.mark.parametrize(
    "value, expected",
    [
        (
            "x + 1 < 2",
            ast.Compare(
                ast.Lt(),
                ast.BinOp(ast.Add(), ast.Identifier("x"), ast.Integer("1")),
                ast.Integer("2"),
            ),
        ),
        (
            "x >= 0 and x <= 1",
            ast.BoolOp(
                ast.And(),
                ast.Compare(ast.GtE(), ast.Identifier("x"), ast.Integer("0")),
                ast.Compare(ast.LtE(), ast.Identifier("x"), ast.Integer("1")),
            ),
        ),
        (
            "x == 0 or x != 1 and true",
            ast.BoolOp(
                ast.Or(),
                ast.Compare(ast.Eq(), ast.Identifier("x"), ast.Integer("0")),
                ast.BoolOp(
                    ast.And(),
                    ast.Compare(ast.NotEq(), ast.Identifier("x"), ast.Integer("1")),
                    ast.Boolean("true"),
                ),
            ),
        ),
        (
            "not x > 1",
            ast.UnaryOp(
                ast.Not(), ast.Compare(ast.Gt(), ast.Identifier("x"), ast.Integer("1"))
            ),
        ),
        (
            "NOT x > 1 AND x < 3",
            ast.BoolOp(
                ast.And(),
                ast.UnaryOp(
                    ast.Not(),
                    ast.Compare(ast.Gt(), ast.Identifier("x"), ast.Integer("1")),
                ),
                ast.Compare(ast.Lt(), ast.Identifier("x"), ast.Integer("3")),
            ),
        ),
    ],
)
def test_comparisons_and_boolean_logic(value: str, expected: ast._Node):
    assert parse(value) == expected


@pytest.mark.parametrize(
    "value, expected",
    [
        (
            "exp(-x)",
            ast.Call(
                ast.Identifier("exp"), [ast.UnaryOp(ast.USub(), ast.Identifier("x"))]
            ),
        ),
        (
            "max(x, 0)",
            ast.Call(ast.Identifier("max"), [ast.Identifier("x"), ast.Integer("0")]),
        ),
        (
            "where(x < 0, 0, sqrt(x))",
            ast.Call(
                ast.Identifier("where"),
                [
                    ast.Compare(ast.Lt(), ast.Identifier("x"), ast.Integer("0")),
                    ast.Integer("0"),
                    ast.Call(ast.Identifier("sqrt"), [ast.Identifier("x")]),
                ],
            ),
        ),
        (
            "2 * semicircle(x)",
            ast.BinOp(
                ast.Mult(),
                ast.Integer("2"),
                ast.Call(ast.Identifier("semicircle"), [ast.Identifier("x")]),
            ),
        ),
    ],
)
def test_function_calls(value: str, expected: ast._Node):
    assert parse(value) == expected


def test_whitespace_is_ignored():
    assert parse(" x\t+\n1 ") == parse("x+1")


@pytest.mark.parametrize("value", ["x $ 1", "x # 2", "x ; 1", "'x'"])
def test_tokenizing_errors(value: str):
    with pytest.raises(exceptions.TokenizingException):
        parse(value)


@pytest.mark.parametrize("value", ["x +", "(x", "x)", "1 < x < 2", "2 x", "* x"])
def test_parsing_errors(value: str):
    with pytest.raises(exceptions.ParsingException):
        parse(value)


@pytest.mark.parametrize("value", ["", "   "])
def test_empty_expression_is_a_parsing_error(value: str):
    with pytest.raises(exceptions.ParsingException) as e:
        parse(value)

    assert e.value.eof


@pytest.mark.parametrize("value", ["foo(x)", "gamma(1)", "x + erf(x)"])
def test_unknown_function(value: str):
    with pytest.raises(exceptions.UnknownFunctionException):
        parse(value)


@pytest.mark.parametrize(
    "value, exp_args, given_args",
    [("exp()", 1, 0), ("exp(x, 1)", 1, 2), ("min(x)", 2, 1), ("where(x, 1)", 3, 2)],
)
def test_argument_count(value: str, exp_args: int, given_args: int):
    with pytest.raises(exceptions.ArgumentCountException) as e:
        parse(value)

    assert e.value.exp_args == exp_args
    assert e.value.n_args_given == given_args
