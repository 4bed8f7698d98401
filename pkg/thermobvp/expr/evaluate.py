from __future__ import annotations

from typing import Any, Callable, Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..exceptions import ExprEvaluationError
from ..utils import FloatArray, RealLike, as_float_array, squeeze_scalar
from .nodes import BinOp, Call, Const, Neg, Node, Num, Var, to_source
from .parser import Expr

__all__ = [
    'eval_expr',
    'to_function'
]


_CONSTANTS = {'pi': np.pi, 'e': np.e}

_UNARY: dict[str, Callable[[FloatArray], FloatArray]] = {
    'exp': np.exp, 'log': np.log, 'sin': np.sin, 'cos': np.cos, 'sqrt': np.sqrt, 'abs': np.abs
}

_BINARY: dict[str, Callable[[FloatArray, FloatArray], FloatArray]] = {
    '+': np.add, '-': np.subtract, '*': np.multiply, '/': np.divide, '^': np.power,
    'min': np.minimum, 'max': np.maximum, 'pow': np.power
}


def _eval(node: Node, env: Mapping[str, FloatArray]) -> FloatArray:
    if isinstance(node, Num):
        return np.float64(node.value)  # type: ignore[return-value]

    if isinstance(node, Const):
        return np.float64(_CONSTANTS[node.name])  # type: ignore[return-value]

    if isinstance(node, Var):
        return env[node.name]

    try:
        if isinstance(node, Neg):
            return np.negative(_eval(node.operand, env))

        if isinstance(node, BinOp):
            return _BINARY[node.op](_eval(node.left, env), _eval(node.right, env))

        if isinstance(node, Call):
            args = [_eval(arg, env) for arg in node.args]

            if len(args) == 1:
                return _UNARY[node.name](args[0])

            return _BINARY[node.name](*args)
    except FloatingPointError as e:
        raise ExprEvaluationError(f'floating point error ({e})', to_source(node), eval_expr)

    raise ExprEvaluationError(f'unknown node {node!r}', func=eval_expr)


def eval_expr(e: Expr, bindings: Mapping[str, ArrayLike]) -> RealLike:
    """
    Evaluate ``e`` in double precision, element-wise over array bindings.

    Division by zero, invalid operations (log of a negative, sqrt of a negative,
    ...) and overflow raise :py:class:`ExprEvaluationError` instead of producing NaN or inf.
    """

    if missing := sorted(e.variables_used - set(bindings)):
        raise ExprEvaluationError(f'missing binding for {", ".join(missing)}', str(e), eval_expr)

    env = {name: as_float_array(value) for name, value in bindings.items()}

    with np.errstate(divide='raise', invalid='raise', over='raise', under='ignore'):
        result = as_float_array(_eval(e.root, env))

    return squeeze_scalar(result)


def to_function(e: Expr, names: Sequence[str]) -> Callable[..., Any]:
    """Vectorised positional callable ``f(*arrays)`` over ``names``."""

    if extra := sorted(e.variables_used - set(names)):
        raise ExprEvaluationError(f'{", ".join(extra)} cannot be bound by ({", ".join(names)})', str(e), to_function)

    def _function(*args: ArrayLike) -> RealLike:
        return eval_expr(e, dict(zip(names, args)))

    _function.__qualname__ = _function.__name__ = f'<{e}>'

    return _function
