from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np
from scipy.integrate import simpson

from ..exceptions import QuadratureError
from ..utils import Evaluable, FloatArray, as_float_array, evaluate_on

__all__ = [
    'QuadratureKind',
    'QuadratureRule',

    'integrate'
]


QuadratureKind = Literal['simpson', 'gauss']


@lru_cache
def _simpson_pattern(m: int) -> FloatArray:
    pattern = np.full(m + 1, 2.0)
    pattern[1::2] = 4.0
    pattern[0] = pattern[-1] = 1.0
    return pattern


@dataclass(frozen=True)
class QuadratureRule:
    """
    Composite rule over panels.

    :param kind:            ``simpson`` or panel ``gauss`` (Gauss–Legendre).
    :param breakpoints:     Panel boundaries; kinks of the integrand must be among them.
    :param subdivisions:    Sub-intervals per panel, even for Simpson.
    :param order:           Gauss–Legendre points per sub-interval.
    """

    kind: QuadratureKind = 'simpson'
    breakpoints: tuple[float, ...] = (0.0, 1.0)
    subdivisions: int = 2
    order: int = 4

    def __post_init__(self) -> None:
        if self.kind not in ('simpson', 'gauss'):
            raise QuadratureError(f'unknown quadrature kind "{self.kind}"', self.__class__)

        if len(self.breakpoints) < 2 or any(
            lo >= hi for lo, hi in zip(self.breakpoints[:-1], self.breakpoints[1:])
        ):
            raise QuadratureError('panel boundaries must be strictly increasing', self.__class__)

        if self.subdivisions < 1 or (self.kind == 'simpson' and self.subdivisions % 2):
            raise QuadratureError(
                f'{self.kind} needs a positive{" even" if self.kind == "simpson" else ""} '
                f'subdivision count, got {self.subdivisions}', self.__class__
            )

        if self.order < 1:
            raise QuadratureError(f'Gauss order must be positive, got {self.order}', self.__class__)

    @property
    def lo(self) -> float:
        return self.breakpoints[0]

    @property
    def hi(self) -> float:
        return self.breakpoints[-1]

    def on(self, breakpoints: Sequence[float] | FloatArray) -> QuadratureRule:
        """Same kind and resolution over other panels."""
        return replace(self, breakpoints=tuple(float(x) for x in breakpoints))

    def check_kinks(self, kinks: Sequence[float]) -> None:
        edges = np.asarray(self.breakpoints)
        scale = max(1.0, self.hi - self.lo) * 1e-12

        for kink in kinks:
            if self.lo + scale < kink < self.hi - scale and np.min(np.abs(edges - kink)) > scale:
                raise QuadratureError(f'integrand kink at {kink} lies inside a panel', self.check_kinks)

    def nodes_weights(self) -> tuple[FloatArray, FloatArray]:
        edges = as_float_array(self.breakpoints)
        m = self.subdivisions
        h = np.diff(edges) / m

        if self.kind == 'simpson':
            x = edges[:-1, None] + h[:, None] * np.arange(m + 1)[None, :]
            w = h[:, None] / 3 * _simpson_pattern(m)[None, :]

            # panels share end points; fold each closing weight into the next opening one
            merged = w[:, :-1].copy()
            merged[1:, 0] += w[:-1, -1]

            return (
                np.concatenate([x[:, :-1].ravel(), edges[-1:]]),
                np.concatenate([merged.ravel(), w[-1:, -1]])
            )

        gx, gw = np.polynomial.legendre.leggauss(self.order)

        lo = (edges[:-1, None] + h[:, None] * np.arange(m)[None, :]).ravel()
        half = np.repeat(h, m) / 2

        return (
            ((lo + half)[:, None] + half[:, None] * gx[None, :]).ravel(),
            (half[:, None] * gw[None, :]).ravel()
        )


def integrate(
    integrand: Evaluable | tuple[FloatArray, FloatArray], rule: QuadratureRule, kinks: Sequence[float] = ()
) -> float:
    """
    Integrate over ``[rule.lo, rule.hi]``.

    ``integrand`` is either a vectorised callable or a ``(x, y)`` pair of samples,
    the latter only with the Simpson kind.
    """

    rule.check_kinks(kinks)

    if isinstance(integrand, tuple):
        if rule.kind != 'simpson':
            raise QuadratureError('sampled integrands need the Simpson rule', integrate)

        x, y = map(as_float_array, integrand)

        if x.size < 3 or x.size % 2 == 0:
            raise QuadratureError('Simpson on samples needs an odd number (>= 3) of points', integrate)

        return float(simpson(y, x=x))

    x, w = rule.nodes_weights()

    return float(w @ evaluate_on(integrand, x))
