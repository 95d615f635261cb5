"""
Expression trees for test functions.

Operator tokens are separate nodes so visitors can dispatch on them
(``visit_Add``, ``visit_Lt``, ...). Each token knows how it is written and how
tightly it binds; compound nodes report the precedence of their operator.
"""

from dataclasses import dataclass
from typing import ClassVar, List as ListType

# Binding strength, loosest first.
OR, AND, NOT, COMPARE, SUM, PRODUCT, NEGATE, POWER, ATOM = range(2, 11)


@dataclass(frozen=True)
class _Node:
    @property
    def precedence(self) -> int:
        return ATOM


@dataclass(frozen=True)
class Identifier(_Node):
    """A variable (``x``), a named constant (``pi``) or a function name."""

    name: str


###############################################################################
# Numbers
###############################################################################
@dataclass(frozen=True)
class _Literal(_Node):
    """Literals keep their source text in ``val``."""

    val: str

    @property
    def py_val(self):
        raise NotImplementedError()


@dataclass(frozen=True)
class Integer(_Literal):
    @property
    def py_val(self) -> int:
        return int(self.val)


@dataclass(frozen=True)
class Float(_Literal):
    @property
    def py_val(self) -> float:
        return float(self.val)

    @property
    def precedence(self) -> int:
        # Folded constants can be negative and then print like ``-x``.
        return NEGATE if self.val.startswith("-") else ATOM


@dataclass(frozen=True)
class Boolean(_Literal):
    @property
    def py_val(self) -> bool:
        return self.val.lower() == "true"


###############################################################################
# Operator tokens
###############################################################################
@dataclass(frozen=True)
class _Token(_Node):
    symbol: ClassVar[str]
    binding: ClassVar[int]

    @property
    def precedence(self) -> int:
        return self.binding


@dataclass(frozen=True)
class _BinOpToken(_Token):
    right_assoc: ClassVar[bool] = False


@dataclass(frozen=True)
class Add(_BinOpToken):
    symbol = "+"
    binding = SUM


@dataclass(frozen=True)
class Sub(_BinOpToken):
    symbol = "-"
    binding = SUM


@dataclass(frozen=True)
class Mult(_BinOpToken):
    symbol = "*"
    binding = PRODUCT


@dataclass(frozen=True)
class Div(_BinOpToken):
    symbol = "/"
    binding = PRODUCT


@dataclass(frozen=True)
class Pow(_BinOpToken):
    symbol = "^"
    binding = POWER
    right_assoc = True


@dataclass(frozen=True)
class _Comparator(_Token):
    binding = COMPARE


@dataclass(frozen=True)
class Eq(_Comparator):
    symbol = "=="


@dataclass(frozen=True)
class NotEq(_Comparator):
    symbol = "!="


@dataclass(frozen=True)
class Lt(_Comparator):
    symbol = "<"


@dataclass(frozen=True)
class LtE(_Comparator):
    symbol = "<="


@dataclass(frozen=True)
class Gt(_Comparator):
    symbol = ">"


@dataclass(frozen=True)
class GtE(_Comparator):
    symbol = ">="


@dataclass(frozen=True)
class _BoolOpToken(_Token):
    pass


@dataclass(frozen=True)
class And(_BoolOpToken):
    symbol = "and"
    binding = AND


@dataclass(frozen=True)
class Or(_BoolOpToken):
    symbol = "or"
    binding = OR


@dataclass(frozen=True)
class _UnaryOpToken(_Token):
    pass


@dataclass(frozen=True)
class Not(_UnaryOpToken):
    symbol = "not "
    binding = NOT


@dataclass(frozen=True)
class USub(_UnaryOpToken):
    symbol = "-"
    binding = NEGATE


###############################################################################
# Compound expressions
###############################################################################
@dataclass(frozen=True)
class BinOp(_Node):
    """``left op right`` for arithmetic, ``^`` included."""

    op: _BinOpToken
    left: _Node
    right: _Node

    @property
    def precedence(self) -> int:
        return self.op.precedence


@dataclass(frozen=True)
class Compare(_Node):
    """A comparison, ``1.0`` where it holds and ``0.0`` elsewhere."""

    comparator: _Comparator
    left: _Node
    right: _Node

    @property
    def precedence(self) -> int:
        return self.comparator.precedence


@dataclass(frozen=True)
class BoolOp(_Node):
    op: _BoolOpToken
    left: _Node
    right: _Node

    @property
    def precedence(self) -> int:
        return self.op.precedence


@dataclass(frozen=True)
class UnaryOp(_Node):
    op: _UnaryOpToken
    operand: _Node

    @property
    def precedence(self) -> int:
        return self.op.precedence


@dataclass(frozen=True)
class Call(_Node):
    """``func(args...)``; the grammar has already checked the arity."""

    func: Identifier
    args: ListType[_Node]

    @property
    def name(self) -> str:
        return self.func.name
