from __future__ import annotations

import os
from typing import Any, Callable, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    'debug_print',

    'FloatArray', 'RealLike', 'Evaluable',

    'as_float_array', 'squeeze_scalar', 'evaluate_on'
]


THERMOBVP_DEBUG = 'THERMOBVP_DEBUG' in os.environ

FloatArray = NDArray[np.float64]
RealLike = Union[float, FloatArray]

# vectorised callable: numpy arrays in, numpy array (or broadcastable scalar) out
Evaluable = Callable[..., Any]


def debug_print(*args: Any, **kwargs: Any) -> None:
    if THERMOBVP_DEBUG:
        print(*args, **kwargs)


def as_float_array(x: ArrayLike) -> FloatArray:
    return np.asarray(x, dtype=np.float64)


def squeeze_scalar(x: FloatArray) -> RealLike:
    return x[()] if x.ndim == 0 else x  # type: ignore[no-any-return]


def evaluate_on(func: Evaluable, *args: FloatArray) -> FloatArray:
    """Call a vectorised evaluable and broadcast its result to the shape of the arguments."""

    shape = np.broadcast_shapes(*(a.shape for a in args))

    return np.broadcast_to(as_float_array(func(*args)), shape).astype(np.float64)
