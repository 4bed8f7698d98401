from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import CustomValueError
from .expr import parse, to_function
from .geometry import ProblemGeometry
from .operator import BFunctional, BFunctionalKind, ProblemSpec
from .utils import Evaluable, FloatArray

__all__ = [
    'STANDARD_GEOMETRY',

    'BuiltinProblem',
    'BUILTINS', 'BUILTIN_ALIASES',

    'spec_from_expressions',
    'builtin_problem', 'resolve_builtin'
]


STANDARD_GEOMETRY = ProblemGeometry(beta=0.25, eta=0.25, r=1.0, a=0.125, b=0.25)


def spec_from_expressions(
    geometry: ProblemGeometry, f: str, sigma: str, omega: str, g: str | None = None,
    b_kind: BFunctionalKind = 'zero', b_weight: str | None = None, b_value: float | None = None,
    name: str = 'custom',
    delta: Callable[[float], Evaluable] | None = None, eta_rho: Callable[[float], float] | None = None
) -> ProblemSpec:
    """
    A :py:class:`ProblemSpec` from expression strings.

    ``f`` is in t, u, v (v standing for u(σ(t))); ``sigma``, ``omega``, ``g`` and ``b_weight`` are in t.
    ``b_kind='custom'`` is the constant functional ``b_value``.
    """

    def _of_t(source: str) -> Evaluable:
        return to_function(parse(source, ('t',)), ('t',))

    if b_kind == 'zero':
        B = BFunctional.zero()
    elif b_kind in ('square', 'linear'):
        if b_weight is None:
            raise CustomValueError(f'the {b_kind} functional needs a weight expression', spec_from_expressions)

        factory = BFunctional.square if b_kind == 'square' else BFunctional.linear
        B = factory(_of_t(b_weight), f'{b_kind} weight {b_weight}')
    elif b_kind == 'custom':
        if b_value is None:
            raise CustomValueError('the custom functional needs a value', spec_from_expressions)

        B = BFunctional.constant(b_value)
    else:
        raise CustomValueError(f'unknown functional kind "{b_kind}"', spec_from_expressions)

    return ProblemSpec(
        geometry,
        to_function(parse(f, ('t', 'u', 'v')), ('t', 'u', 'v')),
        _of_t(sigma),
        _of_t(omega),
        B,
        None if g is None else _of_t(g),
        name,
        delta,
        eta_rho
    )


@dataclass(frozen=True)
class BuiltinProblem:
    name: str
    description: str
    geometry: ProblemGeometry
    f: str
    sigma: str
    omega: str
    g: str | None = None
    b_kind: BFunctionalKind = 'zero'
    b_weight: str | None = None
    delta: Callable[[float], Evaluable] | None = None
    eta_rho: Callable[[float], float] | None = None

    def spec(self, geometry: ProblemGeometry | None = None) -> ProblemSpec:
        return spec_from_expressions(
            geometry or self.geometry, self.f, self.sigma, self.omega, self.g,
            self.b_kind, self.b_weight, None, self.name, self.delta, self.eta_rho
        )


def _constant_delta(value: float) -> Callable[[float], Evaluable]:
    def _factory(rho: float) -> Evaluable:
        def _delta(t: FloatArray) -> FloatArray:
            return np.full_like(np.asarray(t, dtype=np.float64), value)

        return _delta

    return _factory


def _exp_reflection_delta(rho: float) -> Evaluable:
    # f = t e^{u + 2v} at the corner u = v = -(ρ + ‖ψ‖), ‖ψ‖ = 1
    def _delta(t: FloatArray) -> FloatArray:
        return np.asarray(t, dtype=np.float64) * np.exp(-3 * (1 + rho))

    return _delta


def _delay_delta(rho: float) -> Evaluable:
    def _delta(t: FloatArray) -> FloatArray:
        return np.exp(-np.asarray(t, dtype=np.float64))

    return _delta


def _zero_eta(rho: float) -> float:
    return 0.0


BUILTINS = {
    problem.name: problem for problem in (
        BuiltinProblem(
            'paper_example',
            'u\'\' + lambda t exp(u(t) + 2u(-t)) = 0, u = sqrt(1 + t) on [-1, 0], '
            'u\'(1)/4 + u(1/4) = lambda int_{-1}^{1} t^2 u^2',
            STANDARD_GEOMETRY, 't*exp(u+2*v)', '-t', 'sqrt(1+t)',
            b_kind='square', b_weight='t^2', delta=_exp_reflection_delta, eta_rho=_zero_eta
        ),
        BuiltinProblem(
            'lightbulb_reflection',
            'heated bar with reflection, u\'\' + lambda (1 + t u(-t)^2) = 0, u = cos(pi t / 2) on [-1, 0], '
            'u\'(1)/4 + u(1/4) = 0',
            STANDARD_GEOMETRY, '1 + t*v^2', '-t', 'cos(pi*t/2)',
            delta=_constant_delta(1.0), eta_rho=_zero_eta
        ),
        BuiltinProblem(
            'delay',
            'spatial delay tau = 1/4, u\'\' + lambda (exp(-t) + u(t - 1/4)^2) = 0, u = 1 + t on [-1/4, 0], '
            'u\'(1)/4 + u(1/4) = lambda int u^2 / 10',
            ProblemGeometry(beta=0.25, eta=0.25, r=0.25, a=0.125, b=0.25),
            'exp(-t) + v^2', 't - 0.25', '1 + t',
            b_kind='square', b_weight='0.1', delta=_delay_delta, eta_rho=_zero_eta
        ),
        BuiltinProblem(
            'linear_oracle',
            'u\'\' + lambda = 0, u = 0 on [-1, 0], u\'(1)/4 + u(1/4) = 0; lambda = 512 rho / 81',
            STANDARD_GEOMETRY, '1', 't', '0',
            delta=_constant_delta(1.0), eta_rho=_zero_eta
        )
    )
}


BUILTIN_ALIASES = {
    'exp_reflection': 'paper_example'
}


def resolve_builtin(name: str) -> BuiltinProblem:
    """Look a built-in up by its name or one of its aliases."""

    if (key := BUILTIN_ALIASES.get(name, name)) not in BUILTINS:
        raise CustomValueError(f'unknown built-in problem "{name}", pick one of {sorted(BUILTINS)}', resolve_builtin)

    return BUILTINS[key]


def builtin_problem(name: str, geometry: ProblemGeometry | None = None) -> ProblemSpec:
    return resolve_builtin(name).spec(geometry)
