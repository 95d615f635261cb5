"""
Grammar of the test-function expressions, e.g. ``exp(-x^2/2)`` or
``abs(x) < 1 and x != 0``.
Implemented with `SLY <https://sly.readthedocs.io/en/latest/>`_.
"""

from typing import Any, Callable, List, Optional, TypeVar

from sly import Lexer, Parser
from sly.lex import Token

from . import ast, exceptions

RuleDecorator = TypeVar("RuleDecorator", bound=Callable[..., Any])

# Defines known functions and their nr of args:
FUNCTIONS = {
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "arctan": 1,
    "sinh": 1,
    "cosh": 1,
    "tanh": 1,
    "min": 2,
    "max": 2,
    "where": 3,
    "semicircle": 1,
}


class ExpressionLexer(Lexer):
    tokens = {
        "NAME",
        "FLOAT",
        "INTEGER",
        "BOOLEAN",
        "ADD",
        "SUB",
        "POW",
        "MUL",
        "DIV",
        "AND",
        "OR",
        "NOT",
        "EQ",
        "NE",
        "LE",
        "LT",
        "GE",
        "GT",
    }
    literals = {"(", ")", ","}
    ignore = " \t\n"

    # Ensure MyPy doesn't lose its mind:
    _: Callable[..., Callable[[RuleDecorator], RuleDecorator]]

    def error(self, token: Token):
        """
        Error handler during tokenization

        Args:
            token: The token that failed to tokenize.
        Raises:
            TokenizingException
        """
        raise exceptions.TokenizingException(token)

    # NOTE: Ordering of tokens is important! Longer tokens first

    ####################################################################################
    # Numbers
    ####################################################################################
    @_(
        r"\d+\.\d*(?:[eE][-+]?\d+)?",
        r"\.\d+(?:[eE][-+]?\d+)?",
        r"\d+[eE][-+]?\d+",
    )
    def FLOAT(self, t):
        ":meta private:"
        t.value = ast.Float(t.value)
        return t

    @_(r"\d+")
    def INTEGER(self, t):
        ":meta private:"
        t.value = ast.Integer(t.value)
        return t

    ####################################################################################
    # Operators
    ####################################################################################
    @_(r"\*\*", r"\^")
    def POW(self, t):
        ":meta private:"
        t.value = ast.Pow()
        return t

    @_(r"\+")
    def ADD(self, t):
        ":meta private:"
        t.value = ast.Add()
        return t

    @_(r"-")
    def SUB(self, t):
        ":meta private:"
        t.value = ast.Sub()
        return t

    @_(r"\*")
    def MUL(self, t):
        ":meta private:"
        t.value = ast.Mult()
        return t

    @_(r"/")
    def DIV(self, t):
        ":meta private:"
        t.value = ast.Div()
        return t

    @_(r"==")
    def EQ(self, t):
        ":meta private:"
        t.value = ast.Eq()
        return t

    @_(r"!=")
    def NE(self, t):
        ":meta private:"
        t.value = ast.NotEq()
        return t

    @_(r"<=")
    def LE(self, t):
        ":meta private:"
        t.value = ast.LtE()
        return t

    @_(r"<")
    def LT(self, t):
        ":meta private:"
        t.value = ast.Lt()
        return t

    @_(r">=")
    def GE(self, t):
        ":meta private:"
        t.value = ast.GtE()
        return t

    @_(r">")
    def GT(self, t):
        ":meta private:"
        t.value = ast.Gt()
        return t

    ####################################################################################
    # Names and keywords
    ####################################################################################
    @_(r"[A-Za-z_]\w*")
    def NAME(self, t):
        ":meta private:"
        keyword = t.value.lower()
        if keyword == "and":
            t.type, t.value = "AND", ast.And()
        elif keyword == "or":
            t.type, t.value = "OR", ast.Or()
        elif keyword == "not":
            t.type, t.value = "NOT", ast.Not()
        elif keyword in ("true", "false"):
            t.type, t.value = "BOOLEAN", ast.Boolean(t.value)
        else:
            t.value = ast.Identifier(t.value)
        return t


class ExpressionParser(Parser):
    debugfile = None
    tokens = ExpressionLexer.tokens

    # Predecence from low to high.
    precedence = (
        ("left", "OR"),
        ("left", "AND"),
        ("right", "NOT"),
        ("nonassoc", "EQ", "NE", "LT", "LE", "GT", "GE"),
        ("left", "ADD", "SUB"),
        ("left", "MUL", "DIV"),
        ("right", "UMINUS"),
        ("right", "POW"),
    )

    # Ensure MyPy doesn't lose its mind:
    _: Callable[..., Callable[[RuleDecorator], RuleDecorator]]

    def error(self, token: Optional[Token]):
        """
        Error handler during parsing.

        Args:
            token: The token at which point parsing failed.
        Raises:
            ParsingException
        """
        eof = token is None
        raise exceptions.ParsingException(token, eof)

    @_('"(" expr ")"')
    def expr(self, p):
        ":meta private:"
        return p.expr

    @_("INTEGER", "FLOAT", "BOOLEAN", "NAME")  # type:ignore[no-redef]
    def expr(self, p):
        ":meta private:"
        return p[0]

    ####################################################################################
    # Arithmetic
    ####################################################################################
    @_("SUB expr %prec UMINUS")  # type:ignore[no-redef]
    def expr(self, p):
        ":meta private:"
        return ast.UnaryOp(ast.USub(), p.expr)

    @_(  # type:ignore[no-redef]
        "expr ADD expr",
        "expr SUB expr",
        "expr MUL expr",
        "expr DIV expr",
        "expr POW expr",
    )
    def expr(self, p):
        ":meta private:"
        return ast.BinOp(p[1], p[0], p[2])

    ####################################################################################
    # Comparisons
    ####################################################################################
    @_(  # type:ignore[no-redef]
        "expr EQ expr",
        "expr NE expr",
        "expr LT expr",
        "expr LE expr",
        "expr GT expr",
        "expr GE expr",
    )
    def expr(self, p):
        ":meta private:"
        return ast.Compare(p[1], p[0], p[2])

    ####################################################################################
    # Boolean logic
    ####################################################################################
    @_("expr AND expr", "expr OR expr")  # type:ignore[no-redef]
    def expr(self, p):
        ":meta private:"
        return ast.BoolOp(p[1], p[0], p[2])

    @_("NOT expr")  # type:ignore[no-redef]
    def expr(self, p):
        ":meta private:"
        return ast.UnaryOp(p[0], p.expr)

    ####################################################################################
    # Function calls
    ####################################################################################
    def _function_call(self, func: ast.Identifier, args: List[ast._Node]):
        ":meta private:"
        try:
            n_args_exp = FUNCTIONS[func.name]
        except KeyError:
            raise exceptions.UnknownFunctionException(func.name)

        if len(args) != n_args_exp:
            raise exceptions.ArgumentCountException(func.name, n_args_exp, len(args))

        return ast.Call(func, args)

    @_('NAME "(" ")"')  # type:ignore[no-redef]
    def expr(self, p):
        ":meta private:"
        return self._function_call(p[0], [])

    @_('NAME "(" args ")"')  # type:ignore[no-redef]
    def expr(self, p):
        ":meta private:"
        return self._function_call(p[0], p.args)

    @_("expr")
    def args(self, p):
        ":meta private:"
        return [p.expr]

    @_('args "," expr')  # type:ignore[no-redef]
    def args(self, p):
        ":meta private:"
        return p.args + [p.expr]
