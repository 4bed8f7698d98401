from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from ..exceptions import CustomValueError, ExprArityError, ExprNameError, ExprSyntaxError
from .nodes import (
    ALLOWED_VARIABLES, CONSTANTS, FUNCTIONS, BinOp, Call, Const, Neg, Node, Num, Var, free_variables, to_source
)

__all__ = [
    'Expr',

    'parse'
]


_TOKEN = re.compile(
    r'\s*(?:'
    r'(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
    r'|(?P<name>[A-Za-z_][A-Za-z_0-9]*)'
    r'|(?P<op>[-+*/^(),])'
    r')'
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


@dataclass(frozen=True)
class Expr:
    """A parsed scalar expression over a declared set of variables."""

    root: Node
    variables: frozenset[str]
    source: str = ''

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expr) and self.root == other.root and self.variables == other.variables

    def __hash__(self) -> int:
        return hash((self.root, self.variables))

    def __str__(self) -> str:
        return self.source or to_source(self.root)

    @property
    def variables_used(self) -> frozenset[str]:
        return free_variables(self.root)


def _tokenize(source: str) -> Iterator[_Token]:
    pos = 0

    while pos < len(source):
        if source[pos:].strip() == '':
            break

        if not (match := _TOKEN.match(source, pos)) or match.end() == pos:
            offset = len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprSyntaxError(f'unexpected character "{source[pos + offset]}"', pos + offset, source, parse)

        kind = str(match.lastgroup)

        yield _Token(kind, match.group(kind), match.start(kind))

        pos = match.end()

    yield _Token('end', '', len(source))


class _Parser:
    def __init__(self, source: str, variables: frozenset[str]) -> None:
        self.source = source
        self.variables = variables
        self.tokens = list(_tokenize(source))
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def _error(self, message: str, token: _Token | None = None) -> ExprSyntaxError:
        token = token or self.current
        return ExprSyntaxError(message, token.pos, self.source, parse)

    def _expect(self, text: str) -> _Token:
        if self.current.text != text:
            found = f'"{self.current.text}"' if self.current.kind != 'end' else 'end of input'
            raise self._error(f'expected "{text}", found {found}')

        return self._advance()

    def parse(self) -> Node:
        node = self._additive()

        if self.current.kind != 'end':
            raise self._error(f'unexpected "{self.current.text}"')

        return node

    def _additive(self) -> Node:
        node = self._multiplicative()

        while self.current.text in ('+', '-'):
            op = self._advance().text
            node = BinOp(op, node, self._multiplicative())

        return node

    def _multiplicative(self) -> Node:
        node = self._unary()

        while self.current.text in ('*', '/'):
            op = self._advance().text
            node = BinOp(op, node, self._unary())

        return node

    def _unary(self) -> Node:
        if self.current.text == '-':
            self._advance()
            return Neg(self._unary())

        return self._power()

    def _power(self) -> Node:
        base = self._primary()

        if self.current.text == '^':
            self._advance()
            # right operand re-enters _unary, which makes ^ right associative
            return BinOp('^', base, self._unary())

        return base

    def _primary(self) -> Node:
        token = self.current

        if token.kind == 'num':
            self._advance()
            return Num(float(token.text))

        if token.kind == 'name':
            self._advance()

            if self.current.text == '(':
                return self._call(token)

            if token.text in self.variables:
                return Var(token.text)

            if token.text in CONSTANTS:
                return Const(token.text)

            raise ExprNameError(token.text, parse)

        if token.text == '(':
            self._advance()
            node = self._additive()
            self._expect(')')
            return node

        if token.kind == 'end':
            raise self._error('unexpected end of input')

        raise self._error(f'unexpected "{token.text}"')

    def _call(self, name: _Token) -> Node:
        if name.text not in FUNCTIONS:
            raise ExprNameError(name.text, parse)

        self._expect('(')

        args = list[Node]()

        if self.current.text != ')':
            args.append(self._additive())

            while self.current.text == ',':
                self._advance()
                args.append(self._additive())

        self._expect(')')

        if len(args) != (arity := FUNCTIONS[name.text]):
            raise ExprArityError(
                f'{name.text} takes {arity} argument{"s" if arity > 1 else ""}, got {len(args)}', parse
            )

        return Call(name.text, tuple(args))


def parse(source: str, variables: Iterable[str] = ('t',)) -> Expr:
    """
    Parse ``source`` into an :py:class:`Expr`.

    Precedence from loosest: ``+ -``, ``* /``, unary ``-``, ``^`` (right associative).
    ``pi`` and ``e`` are predefined; implicit multiplication is not supported.
    """

    declared = frozenset(variables)

    if not declared <= ALLOWED_VARIABLES:
        raise CustomValueError(
            f'variables must come from {sorted(ALLOWED_VARIABLES)}, got {sorted(declared)}', parse
        )

    if not source.strip():
        raise ExprSyntaxError('empty expression', 0, source, parse)

    return Expr(_Parser(source, declared).parse(), declared, source.strip())
