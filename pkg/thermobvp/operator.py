from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import FunctionalSignWarning, MeshError, SpecViolationError
from .geometry import ProblemGeometry, gamma_eval, kernel_eval, psi_eval
from .grid import GridFunction, InterpolationRule, Mesh, QuadratureRule, interp_eval
from .utils import Evaluable, FloatArray, RealLike, as_float_array, debug_print, evaluate_on, squeeze_scalar

__all__ = [
    'BFunctionalKind',
    'BFunctional',
    'ProblemSpec',

    'HammersteinOperator',

    'deviated_value', 'eval_functional', 'apply_hammerstein',

    'vertex', 'boundary_operator'
]


BFunctionalKind = Literal['zero', 'square', 'linear', 'custom']

_RANGE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class BFunctional:
    """
    The functional B of the boundary condition βu'(1) + u(η) = λB[u].

    Integral kinds integrate over the whole of [-r, 1]:
    ``square`` is ∫ w·u², ``linear`` is ∫ w·u.
    """

    kind: BFunctionalKind = 'zero'
    weight: Evaluable | None = None
    custom: Callable[[GridFunction], float] | None = None
    label: str = ''

    def __post_init__(self) -> None:
        if self.kind not in ('zero', 'square', 'linear', 'custom'):
            raise SpecViolationError(f'unknown functional kind "{self.kind}"', self.__class__)

        if self.kind in ('square', 'linear') and self.weight is None:
            raise SpecViolationError(f'the {self.kind} functional needs a weight', self.__class__)

        if self.kind == 'custom' and self.custom is None:
            raise SpecViolationError('the custom functional needs a callable', self.__class__)

    @classmethod
    def zero(cls) -> BFunctional:
        return cls('zero', label='0')

    @classmethod
    def square(cls, weight: Evaluable, label: str = '') -> BFunctional:
        return cls('square', weight, label=label or 'int w*u^2')

    @classmethod
    def linear(cls, weight: Evaluable, label: str = '') -> BFunctional:
        return cls('linear', weight, label=label or 'int w*u')

    @classmethod
    def from_callable(cls, func: Callable[[GridFunction], float], label: str = '') -> BFunctional:
        return cls('custom', custom=func, label=label or getattr(func, '__name__', 'custom'))

    @classmethod
    def constant(cls, value: float) -> BFunctional:
        def _constant(u: GridFunction) -> float:
            return value

        return cls.from_callable(_constant, f'{value:g}')

    def __str__(self) -> str:
        return self.label or self.kind


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """
    One instance of u'' + λf(t, u(t), u(σ(t))) = 0 on [0, 1], u = ω on [-r, 0], βu'(1) + u(η) = λB[u].

    :param geometry:    β, η, r and the sensor interval [a, b].
    :param f:           Vectorised ``f(t, u, v)``, nonnegative.
    :param sigma:       Vectorised deviation ``σ(t)`` mapping [0, 1] into [-r, 1].
    :param omega:       History on [-r, 0].
    :param B:           Boundary functional.
    :param g:           Nonnegative weight of the Hammerstein integral, ``None`` for g ≡ 1.
    :param delta:       Optional ρ ↦ δ_ρ giving a known lower bound of f on [a, b].
    :param eta_rho:     Optional ρ ↦ η_ρ, a known lower bound of B on the cone sphere.
    """

    geometry: ProblemGeometry
    f: Evaluable
    sigma: Evaluable
    omega: Evaluable
    B: BFunctional = field(default_factory=BFunctional.zero)
    g: Evaluable | None = None
    name: str = 'custom'
    delta: Callable[[float], Evaluable] | None = None
    eta_rho: Callable[[float], float] | None = None

    @property
    def r(self) -> float:
        return self.geometry.r

    def sigma_on(self, s: FloatArray) -> FloatArray:
        """σ(s) checked against [-r, 1], clipped onto it."""

        dev = evaluate_on(self.sigma, s)

        if dev.size and (
            np.any(~np.isfinite(dev)) or dev.min() < -self.r - _RANGE_EPS or dev.max() > 1.0 + _RANGE_EPS
        ):
            worst = s[np.argmax(np.maximum(-self.r - dev, dev - 1.0))]
            raise SpecViolationError(
                f'sigma leaves [{-self.r:g}, 1], e.g. at s={worst:g}', self.sigma_on, 'C6'
            )

        return np.clip(dev, -self.r, 1.0)

    def g_on(self, s: FloatArray) -> FloatArray:
        if self.g is None:
            return np.ones_like(s)

        values = evaluate_on(self.g, s)

        if np.any(values < 0):
            raise SpecViolationError(f'g is negative at s={s[np.argmin(values)]:g}', self.g_on, 'C4')

        return values

    def f_on(self, t: FloatArray, u: FloatArray, v: FloatArray) -> FloatArray:
        values = evaluate_on(self.f, t, u, v)

        if np.any(~(values >= 0)):
            i = np.unravel_index(np.argmin(np.nan_to_num(values, nan=-np.inf)), values.shape)
            raise SpecViolationError(
                f'f must be nonnegative, got {values[i]:g} at t={np.broadcast_to(t, values.shape)[i]:g}',
                self.f_on, 'C5'
            )

        return values


def deviated_value(u: GridFunction, sigma: Evaluable, s: ArrayLike) -> RealLike:
    """u(σ(s))."""

    ss = as_float_array(s)
    dev = evaluate_on(sigma, ss)

    if dev.size and (np.any(~np.isfinite(dev)) or dev.min() < -u.r - _RANGE_EPS or dev.max() > 1.0 + _RANGE_EPS):
        raise SpecViolationError(f'sigma(s) must lie in [{-u.r:g}, 1]', deviated_value, 'C6')

    return interp_eval(u, np.clip(dev, -u.r, 1.0))


def _functional_rule(u: GridFunction, rule: QuadratureRule | None) -> QuadratureRule:
    return (rule or QuadratureRule()).on(u.mesh.nodes)


def eval_functional(B: BFunctional, u: GridFunction, rule: QuadratureRule | None = None) -> float:
    """
    B[u]. Integral kinds use ``rule`` (Simpson by default) with every mesh node as a panel boundary.

    A negative value is returned as is, with a :py:class:`FunctionalSignWarning`.
    """

    if B.kind == 'zero':
        return 0.0

    if B.kind == 'custom':
        value = float(B.custom(u))  # type: ignore[misc]
    else:
        weight = B.weight

        if B.kind == 'square':
            def integrand(t: FloatArray) -> FloatArray:
                return evaluate_on(weight, t) * as_float_array(interp_eval(u, t)) ** 2  # type: ignore[arg-type]
        else:
            def integrand(t: FloatArray) -> FloatArray:
                return evaluate_on(weight, t) * as_float_array(interp_eval(u, t))  # type: ignore[arg-type]

        value = _integrate_over_mesh(integrand, u, rule)

    if value < 0:
        warnings.warn(
            f'eval_functional: B[u] = {value:g} is negative, the functional must be nonnegative on the cone',
            FunctionalSignWarning
        )

    return value


def _integrate_over_mesh(integrand: Evaluable, u: GridFunction, rule: QuadratureRule | None = None) -> float:
    x, w = _functional_rule(u, rule).nodes_weights()

    return float(w @ evaluate_on(integrand, x))


class HammersteinOperator:
    """
    F u(t) = ∫₀¹ k(t, s)g(s)f(s, u(s), u(σ(s))) ds + γ(t)B[u] at every mesh node.

    The s-nodes come from ``rule`` laid over the mesh nodes on [0, 1]; since every t-node
    and η is a mesh node, k(t, ·) is smooth inside each quadrature panel.
    The kernel and weight product is assembled once.
    """

    def __init__(self, spec: ProblemSpec, mesh: Mesh, rule: QuadratureRule | None = None) -> None:
        if not np.isclose(mesh.r, spec.r, rtol=0, atol=1e-14):
            raise MeshError(f'mesh starts at {-mesh.r:g} but the problem history is [{-spec.r:g}, 0]', self.__class__)

        self.spec = spec
        self.mesh = mesh
        self.rule = (rule or QuadratureRule()).on(mesh.unit)

        self.s, weights = self.rule.nodes_weights()
        self.sigma_s = spec.sigma_on(self.s)

        self.matrix = kernel_eval(spec.geometry, mesh.nodes[:, None], self.s[None, :]) * (
            weights * spec.g_on(self.s)
        )[None, :]
        self.gamma = as_float_array(gamma_eval(spec.geometry, mesh.nodes))

        debug_print(f'HammersteinOperator: {len(mesh)} x {self.s.size} kernel matrix ({self.rule.kind})')

    def source(self, u: GridFunction) -> FloatArray:
        """f(s, u(s), u(σ(s))) on the quadrature nodes."""

        return self.spec.f_on(
            self.s, as_float_array(interp_eval(u, self.s)), as_float_array(interp_eval(u, self.sigma_s))
        )

    def __call__(self, u: GridFunction) -> GridFunction:
        if not u.mesh.same_as(self.mesh):
            raise MeshError('the grid function lives on another mesh', self.__class__)

        values = self.matrix @ self.source(u)

        if self.spec.B.kind != 'zero':
            values += self.gamma * eval_functional(self.spec.B, u, self.rule)

        values[:self.mesh.zero + 1] = 0.0

        return GridFunction(self.mesh, values, u.rule)


def apply_hammerstein(
    spec: ProblemSpec, u: GridFunction, mesh: Mesh, rule: QuadratureRule | None = None
) -> GridFunction:
    return HammersteinOperator(spec, mesh, rule)(u)


def vertex(spec: ProblemSpec, mesh: Mesh, rule: InterpolationRule = 'cubic') -> GridFunction:
    """ψ on ``mesh``, keeping ω as its exact history."""

    values = as_float_array(psi_eval(spec.geometry, spec.omega, mesh.nodes)).copy()

    return GridFunction(mesh, values, rule, spec.omega)


def boundary_operator(geom: ProblemGeometry, u: GridFunction | Evaluable, h: float | None = None) -> float:
    """
    βu'(1) + u(η).

    For a grid function u'(1) is the three-point one-sided difference on the last nodes;
    any other evaluable is differenced with step ``h`` (default 1e-5).
    """

    if isinstance(u, GridFunction):
        x0, x1, x2 = u.mesh.nodes[-3:]
        u0, u1, u2 = u.values[-3:]
        h0, h1 = x1 - x0, x2 - x1

        slope = (
            u0 * h1 / (h0 * (h0 + h1))
            - u1 * (h0 + h1) / (h0 * h1)
            + u2 * (h0 + 2 * h1) / (h1 * (h0 + h1))
        )

        return float(geom.beta * slope + interp_eval(u, geom.eta))

    step = 1e-5 if h is None else h
    ends = evaluate_on(u, np.array([1.0 - 2 * step, 1.0 - step, 1.0]))
    slope = (ends[0] - 4 * ends[1] + 3 * ends[2]) / (2 * step)

    return float(geom.beta * slope + squeeze_scalar(evaluate_on(u, np.array(geom.eta))))
