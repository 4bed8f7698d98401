from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy.interpolate import CubicSpline, PchipInterpolator, PPoly

from ..exceptions import DomainError, MeshError
from ..utils import Evaluable, FloatArray, RealLike, as_float_array, evaluate_on, squeeze_scalar
from .mesh import Mesh

__all__ = [
    'InterpolationRule',
    'GridFunction',

    'interp_eval', 'sup_norm', 'min_on'
]


InterpolationRule = Literal['linear', 'cubic', 'pchip']

_DOMAIN_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class GridFunction:
    """
    A continuous function on [-r, 1] known by its values at the mesh nodes.

    On (0, 1] values between nodes follow ``rule``; on [-r, 0] they are linear,
    unless ``history`` holds the exact evaluable the history values came from.
    """

    mesh: Mesh
    values: FloatArray
    rule: InterpolationRule = 'cubic'
    history: Evaluable | None = None

    def __post_init__(self) -> None:
        if self.values.shape != self.mesh.nodes.shape:
            raise MeshError(
                f'{self.values.size} values given for a mesh of {len(self.mesh)} nodes', self.__class__
            )

        if self.rule not in ('linear', 'cubic', 'pchip'):
            raise MeshError(f'unknown interpolation rule "{self.rule}"', self.__class__)

        self.values.setflags(write=False)

    @classmethod
    def sample(
        cls, mesh: Mesh, func: Evaluable, rule: InterpolationRule = 'cubic', exact_history: bool = False
    ) -> GridFunction:
        values = evaluate_on(func, mesh.nodes).copy()

        return cls(mesh, values, rule, func if exact_history else None)

    @classmethod
    def zeros(cls, mesh: Mesh, rule: InterpolationRule = 'cubic') -> GridFunction:
        return cls(mesh, np.zeros(len(mesh)), rule)

    @property
    def r(self) -> float:
        return self.mesh.r

    @property
    def unit_values(self) -> FloatArray:
        return self.values[self.mesh.zero:]

    @property
    def history_values(self) -> FloatArray:
        return self.values[:self.mesh.zero + 1]

    @cached_property
    def interpolant(self) -> PPoly | None:
        """Piecewise cubic on [0, 1], ``None`` for the linear rule."""

        if self.rule == 'linear':
            return None

        if self.rule == 'pchip':
            return PchipInterpolator(self.mesh.unit, self.unit_values, extrapolate=False)

        return CubicSpline(self.mesh.unit, self.unit_values, bc_type='not-a-knot', extrapolate=False)

    def _eval_history(self, t: FloatArray) -> FloatArray:
        if self.history is not None:
            return evaluate_on(self.history, t)

        return np.interp(t, self.mesh.history, self.history_values)

    def _eval_unit(self, t: FloatArray) -> FloatArray:
        if (spline := self.interpolant) is None:
            return np.interp(t, self.mesh.unit, self.unit_values)

        return as_float_array(spline(t))

    def __call__(self, t: ArrayLike) -> RealLike:
        return interp_eval(self, t)

    def with_values(self, values: FloatArray, history: Evaluable | None = None) -> GridFunction:
        return GridFunction(self.mesh, values, self.rule, history)

    def _combine(self, other: GridFunction, op: Callable[[FloatArray, FloatArray], FloatArray]) -> GridFunction:
        if not self.mesh.same_as(other.mesh):
            raise MeshError('grid functions live on different meshes', self._combine)

        history: Evaluable | None = None

        if self.history is not None or other.history is not None:
            def history(t: FloatArray) -> FloatArray:
                return op(self._eval_history(t), other._eval_history(t))

        return self.with_values(op(self.values, other.values), history)

    def __add__(self, other: GridFunction) -> GridFunction:
        return self._combine(other, np.add)

    def __sub__(self, other: GridFunction) -> GridFunction:
        return self._combine(other, np.subtract)

    def __mul__(self, scalar: float) -> GridFunction:
        history: Evaluable | None = None

        if (exact := self.history) is not None:
            def history(t: FloatArray) -> FloatArray:
                return scalar * evaluate_on(exact, t)

        return self.with_values(scalar * self.values, history)

    __rmul__ = __mul__

    def __neg__(self) -> GridFunction:
        return self * -1.0

    def restrict(self, lo: float, hi: float) -> tuple[FloatArray, FloatArray]:
        """Nodes and values inside [lo, hi]."""

        mask = (self.mesh.nodes >= lo) & (self.mesh.nodes <= hi)

        return self.mesh.nodes[mask], self.values[mask]

    def to_csv(self, path: str, header: str = 't,u') -> None:
        np.savetxt(
            path, np.column_stack([self.mesh.nodes, self.values]),
            delimiter=',', header=header, comments='', fmt='%.17g'
        )

    @classmethod
    def from_csv(cls, path: str, mesh: Mesh, rule: InterpolationRule = 'cubic') -> GridFunction:
        data = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)

        if data.shape[0] != len(mesh) or not np.allclose(data[:, 0], mesh.nodes, rtol=0, atol=1e-15):
            raise MeshError(f'"{path}" was not written on this mesh', cls.from_csv)

        return cls(mesh, data[:, 1].copy(), rule)


def interp_eval(u: GridFunction, t: ArrayLike) -> RealLike:
    tt = as_float_array(t)

    if tt.size and (
        np.any(~np.isfinite(tt)) or tt.min() < -u.r - _DOMAIN_EPS or tt.max() > 1.0 + _DOMAIN_EPS
    ):
        raise DomainError(f'evaluation outside [{-u.r:g}, 1]', interp_eval)

    tt = np.clip(tt, -u.r, 1.0)

    return squeeze_scalar(np.where(tt <= 0, u._eval_history(np.minimum(tt, 0.0)), u._eval_unit(np.maximum(tt, 0.0))))


def _candidates(u: GridFunction, lo: float, hi: float, func: object) -> FloatArray:
    if not lo < hi:
        raise DomainError(f'degenerate interval [{lo}, {hi}]', func)  # type: ignore[arg-type]

    if lo < -u.r - _DOMAIN_EPS or hi > 1.0 + _DOMAIN_EPS:
        raise DomainError(f'[{lo}, {hi}] is not inside [{-u.r:g}, 1]', func)  # type: ignore[arg-type]

    lo, hi = max(lo, -u.r), min(hi, 1.0)

    nodes = u.mesh.nodes
    points = [nodes[(nodes > lo) & (nodes < hi)], np.array([lo, hi])]

    # extrema of the cubic pieces sit where their derivative vanishes
    if (spline := u.interpolant) is not None and hi > 0:
        roots = as_float_array(spline.derivative().roots(extrapolate=False))
        roots = roots[np.isfinite(roots)]
        points.append(roots[(roots > max(lo, 0.0)) & (roots < hi)])

    return np.concatenate(points)


def sup_norm(u: GridFunction, lo: float, hi: float) -> float:
    return float(np.max(np.abs(interp_eval(u, _candidates(u, lo, hi, sup_norm)))))


def min_on(u: GridFunction, lo: float, hi: float) -> float:
    return float(np.min(interp_eval(u, _candidates(u, lo, hi, min_on))))
