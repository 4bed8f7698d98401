from __future__ import annotations

from dataclasses import dataclass
from typing import Union

__all__ = [
    'Num', 'Const', 'Var', 'Neg', 'BinOp', 'Call',
    'Node',

    'FUNCTIONS', 'CONSTANTS', 'BINARY_OPS', 'ALLOWED_VARIABLES',

    'to_source', 'free_variables'
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Node


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Node, ...]


Node = Union[Num, Const, Var, Neg, BinOp, Call]

# name -> arity
FUNCTIONS = {
    'exp': 1, 'log': 1, 'sin': 1, 'cos': 1, 'sqrt': 1, 'abs': 1,
    'min': 2, 'max': 2, 'pow': 2
}

CONSTANTS = ('pi', 'e')

BINARY_OPS = ('+', '-', '*', '/', '^')

ALLOWED_VARIABLES = frozenset({'t', 's', 'u', 'v'})


def to_source(node: Node) -> str:
    """Fully parenthesised source text; parsing it gives back an equal tree."""

    if isinstance(node, Num):
        return repr(float(node.value))

    if isinstance(node, (Const, Var)):
        return node.name

    if isinstance(node, Neg):
        return f'(-{to_source(node.operand)})'

    if isinstance(node, BinOp):
        return f'({to_source(node.left)} {node.op} {to_source(node.right)})'

    return f'{node.name}({", ".join(to_source(arg) for arg in node.args)})'


def free_variables(node: Node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset({node.name})

    if isinstance(node, Neg):
        return free_variables(node.operand)

    if isinstance(node, BinOp):
        return free_variables(node.left) | free_variables(node.right)

    if isinstance(node, Call):
        return frozenset().union(*(free_variables(arg) for arg in node.args))

    return frozenset()
