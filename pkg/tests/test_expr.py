from __future__ import annotations

import random

import numpy as np
import pytest

from thermobvp import (
    FUNCTIONS, BinOp, Call, Const, CustomValueError, ExprArityError, ExprEvaluationError, ExprNameError,
    ExprSyntaxError, Neg, Num, Var, eval_expr, parse, to_function, to_source
)

VARIABLES = ('t', 'u', 'v')


def random_tree(rng: random.Random, depth: int = 4):
    if depth == 0 or rng.random() < 0.25:
        pick = rng.random()

        if pick < 0.45:
            return Var(rng.choice(VARIABLES))

        if pick < 0.9:
            return Num(round(rng.uniform(0.1, 3.0), 3))

        return Const(rng.choice(('pi', 'e')))

    kind = rng.random()

    if kind < 0.15:
        return Neg(random_tree(rng, depth - 1))

    if kind < 0.7:
        return BinOp(rng.choice('+-*/^'), random_tree(rng, depth - 1), random_tree(rng, depth - 1))

    name = rng.choice(sorted(FUNCTIONS))

    return Call(name, tuple(random_tree(rng, depth - 1) for _ in range(FUNCTIONS[name])))


class _Invalid(Exception):
    ...


def _finite(x: float) -> float:
    if not np.isfinite(x):
        raise _Invalid

    return x


def reference(node, env: dict[str, float]) -> float:
    """Plain float arithmetic with explicit domain checks, numpy only for the elementary functions."""

    if isinstance(node, Num):
        return node.value

    if isinstance(node, Const):
        return float(np.pi) if node.name == 'pi' else float(np.e)

    if isinstance(node, Var):
        return env[node.name]

    if isinstance(node, Neg):
        return -reference(node.operand, env)

    if isinstance(node, BinOp):
        name = {'^': 'pow'}.get(node.op, node.op)
        args = [reference(node.left, env), reference(node.right, env)]
    else:
        name = node.name
        args = [reference(arg, env) for arg in node.args]

    x = args[0]

    if name == '+':
        return _finite(x + args[1])

    if name == '-':
        return _finite(x - args[1])

    if name == '*':
        return _finite(x * args[1])

    if name == '/':
        if args[1] == 0:
            raise _Invalid

        return _finite(x / args[1])

    if name == 'pow':
        y = args[1]

        if (x == 0 and y < 0) or (x < 0 and not float(y).is_integer()):
            raise _Invalid

        with np.errstate(all='ignore'):
            return _finite(float(np.power(x, y)))

    if name in ('log', 'sqrt') and (x < 0 or (name == 'log' and x == 0)):
        raise _Invalid

    if name == 'min':
        return min(x, args[1])

    if name == 'max':
        return max(x, args[1])

    with np.errstate(all='ignore'):
        return _finite(float(getattr(np, name)(x)))


class TestParse:
    """Grammar, precedence and error reporting."""

    @pytest.mark.parametrize('source, value', [
        ('2 + 3 * 4', 14.0),
        ('2^3^2', 512.0),
        ('-2^2', -4.0),
        ('(2 + 3) * 4', 20.0),
        ('2^-1', 0.5),
        ('8 / 4 / 2', 1.0),
        ('10 - 4 - 3', 3.0),
        ('max(1, min(2, 3)) + pow(2, 3)', 10.0),
        ('1.5e1 + .5', 15.5)
    ])
    def test_precedence(self, source, value):
        assert eval_expr(parse(source), {}) == value

    def test_constants(self):
        assert eval_expr(parse('pi'), {}) == np.pi
        assert eval_expr(parse('e'), {}) == np.e

    def test_problem_expressions(self):
        f = parse('t*exp(u+2*v)', VARIABLES)

        assert eval_expr(f, {'t': 1.0, 'u': 0.0, 'v': 0.0}) == 1.0
        assert eval_expr(parse('sqrt(1+t)'), {'t': 0.0}) == 1.0
        assert eval_expr(parse('-t'), {'t': 0.25}) == -0.25
        assert eval_expr(parse('t - 0.25'), {'t': 0.1}) == pytest.approx(-0.15, abs=1e-16)

    def test_variables(self):
        e = parse('t*u + 1', VARIABLES)

        assert e.variables == frozenset(VARIABLES)
        assert e.variables_used == frozenset({'t', 'u'})

    @pytest.mark.parametrize('source, position', [
        ('t**2', 2),
        ('2t', 1),
        ('(t + 1', 6),
        ('t +', 3),
        ('t $ 2', 2),
        ('min(t,)', 6)
    ])
    def test_syntax_error(self, source, position):
        with pytest.raises(ExprSyntaxError) as info:
            parse(source)

        assert info.value.position == position
        assert info.value.source == source

    def test_empty(self):
        with pytest.raises(ExprSyntaxError):
            parse('   ')

    @pytest.mark.parametrize('source, name', [('x + 1', 'x'), ('foo(t)', 'foo'), ('u', 'u')])
    def test_unknown_name(self, source, name):
        with pytest.raises(ExprNameError) as info:
            parse(source, ('t',))

        assert info.value.name == name

    @pytest.mark.parametrize('source', ['min(t)', 'exp(t, t)', 'pow(t)', 'sqrt()'])
    def test_arity(self, source):
        with pytest.raises(ExprArityError):
            parse(source)

    def test_variable_set(self):
        with pytest.raises(CustomValueError):
            parse('x', ('x',))

    def test_round_trip(self):
        rng = random.Random(11)

        for _ in range(1000):
            tree = random_tree(rng)

            assert parse(to_source(tree), VARIABLES).root == tree


class TestEvaluate:
    """Double precision evaluation with trapped floating point errors."""

    @pytest.mark.parametrize('source, bindings', [
        ('1/t', {'t': 0.0}),
        ('log(t)', {'t': -1.0}),
        ('log(t)', {'t': 0.0}),
        ('sqrt(t)', {'t': -1.0}),
        ('exp(t)', {'t': 1000.0}),
        ('t^0.5', {'t': -2.0})
    ])
    def test_errors(self, source, bindings):
        with pytest.raises(ExprEvaluationError):
            eval_expr(parse(source), bindings)

    def test_missing_binding(self):
        with pytest.raises(ExprEvaluationError):
            eval_expr(parse('t + u', ('t', 'u')), {'t': 1.0})

    def test_vectorised(self):
        t = np.linspace(0, 1, 11)

        np.testing.assert_allclose(eval_expr(parse('t^2 + 1'), {'t': t}), t ** 2 + 1, rtol=0, atol=1e-15)

    def test_broadcast(self):
        t = np.linspace(0, 1, 5)[:, None]
        u = np.linspace(-1, 1, 3)[None, :]

        assert eval_expr(parse('t*u', VARIABLES), {'t': t, 'u': u}).shape == (5, 3)

    def test_to_function(self):
        f = to_function(parse('t*exp(u+2*v)', VARIABLES), VARIABLES)

        assert f(1.0, 0.0, 0.0) == 1.0
        assert f(0.5, 1.0, -0.5) == pytest.approx(0.5, rel=1e-15)

        with pytest.raises(ExprEvaluationError):
            to_function(parse('t*u', VARIABLES), ('t',))

    def test_against_reference(self):
        rng = random.Random(5)
        compared = failed = 0

        for _ in range(1000):
            tree = random_tree(rng)
            env = {name: round(rng.uniform(-2.0, 2.0), 4) for name in VARIABLES}

            try:
                expected = reference(tree, env)
            except _Invalid:
                failed += 1

                with pytest.raises(ExprEvaluationError):
                    eval_expr(parse(to_source(tree), VARIABLES), env)

                continue

            compared += 1
            assert eval_expr(parse(to_source(tree), VARIABLES), env) == pytest.approx(expected, rel=1e-12, abs=1e-300)

        assert compared > 300
        assert failed > 0
