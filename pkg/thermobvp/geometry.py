from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import DomainError, GeometryError
from .utils import Evaluable, FloatArray, RealLike, as_float_array, evaluate_on, squeeze_scalar

__all__ = [
    'ProblemGeometry',
    'ConeConstants',

    'heaviside',

    'kernel_eval', 'phi_envelope', 'cone_constants',

    'gamma_eval', 'phi_hat_eval', 'psi_eval'
]


# slack for arguments that land on an interval end after float arithmetic
_DOMAIN_EPS = 1e-12


@dataclass(frozen=True)
class ProblemGeometry:
    """
    Constants of the thermostat boundary condition βu'(1) + u(η) = λB[u].

    :param beta:    Controller gain, positive.
    :param eta:     Sensor position in (0, 1), with β + η < 1.
    :param r:       Length of the history interval [-r, 0].
    :param a:       Left end of the sensor subinterval, 0 < a < b.
    :param b:       Right end of the sensor subinterval, b < β + η.
    """

    beta: float
    eta: float
    r: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise GeometryError(f'beta must be positive, got {self.beta}', self.__class__)

        if not 0 < self.eta < 1:
            raise GeometryError(f'eta must lie in (0, 1), got {self.eta}', self.__class__)

        if not self.beta + self.eta < 1:
            raise GeometryError(f'beta + eta must be below 1, got {self.beta + self.eta}', self.__class__)

        if not self.r > 0:
            raise GeometryError(f'r must be positive, got {self.r}', self.__class__)

        if not 0 < self.a < self.b < self.beta + self.eta:
            raise GeometryError(
                f'need 0 < a < b < beta + eta, got a={self.a}, b={self.b}, beta + eta={self.p}', self.__class__
            )

    @property
    def p(self) -> float:
        """β + η, the quantity every branch of the construction is decided on."""
        return self.beta + self.eta

    @property
    def large(self) -> bool:
        # β+η = 1/2 belongs to the first branch; both branches agree there
        return self.p >= 0.5


@dataclass(frozen=True)
class ConeConstants:
    c1: float
    c2: float
    c: float


def _check_domain(x: FloatArray, lo: float, hi: float, name: str, func: object) -> FloatArray:
    if x.size and (np.any(~np.isfinite(x)) or x.min() < lo - _DOMAIN_EPS or x.max() > hi + _DOMAIN_EPS):
        raise DomainError(f'{name} must lie in [{lo:g}, {hi:g}]', func)  # type: ignore[arg-type]

    return np.clip(x, lo, hi)


def heaviside(tau: ArrayLike) -> RealLike:
    """H(τ) = 1 for τ ≥ 0 and 0 otherwise; H(0) = 1."""
    return squeeze_scalar(np.where(as_float_array(tau) >= 0, 1.0, 0.0))


def _kernel_hat(geom: ProblemGeometry, t: FloatArray, s: FloatArray) -> FloatArray:
    p = geom.p

    return (
        geom.beta * t / p
        + t * (geom.eta - s) * (geom.eta - s >= 0) / p
        - (t - s) * (t - s >= 0)
    )


def kernel_eval(geom: ProblemGeometry, t: ArrayLike, s: ArrayLike) -> RealLike:
    """
    Green's function of u'' + y = 0, u(0) = 0, βu'(1) + u(η) = 0, extended by zero to t < 0.

    Broadcasts over ``t`` and ``s``.
    """

    tt = _check_domain(as_float_array(t), -geom.r, 1.0, 't', kernel_eval)
    ss = _check_domain(as_float_array(s), 0.0, 1.0, 's', kernel_eval)

    # k̂(0, s) = 0, so multiplying by H(t) only has to clear t < 0
    return squeeze_scalar(np.where(tt > 0, _kernel_hat(geom, tt, ss), 0.0))


def phi_envelope(geom: ProblemGeometry, s: ArrayLike) -> RealLike:
    ss = _check_domain(as_float_array(s), 0.0, 1.0, 's', phi_envelope)

    if geom.large:
        return squeeze_scalar(ss.copy())

    return squeeze_scalar((1 - geom.p) / geom.p * ss)


def cone_constants(geom: ProblemGeometry) -> ConeConstants:
    p = geom.p

    denominator = p if geom.large else 1 - p

    c1 = min(geom.a * geom.beta / denominator, (p - geom.b) / denominator)
    c2 = geom.a

    if not 0 < c1 <= 1:
        raise GeometryError(f'cone constant c1={c1} falls outside (0, 1]', cone_constants)

    return ConeConstants(c1, c2, min(c1, c2))


def gamma_eval(geom: ProblemGeometry, t: ArrayLike) -> RealLike:
    """γ(t) = t / (β+η) on [0, 1], zero on the history interval."""

    tt = _check_domain(as_float_array(t), -geom.r, 1.0, 't', gamma_eval)

    return squeeze_scalar(np.where(tt >= 0, tt / geom.p, 0.0))


def phi_hat_eval(geom: ProblemGeometry, t: ArrayLike) -> RealLike:
    tt = _check_domain(as_float_array(t), -geom.r, 1.0, 't', phi_hat_eval)

    return squeeze_scalar((geom.p - tt) / geom.p)


def psi_eval(geom: ProblemGeometry, omega: Evaluable, t: ArrayLike) -> RealLike:
    """Vertex of the affine cone: ω on [-r, 0], φ̂(t)·ω(0) on (0, 1]."""

    tt = _check_domain(as_float_array(t), -geom.r, 1.0, 't', psi_eval)

    history = evaluate_on(omega, np.minimum(tt, 0.0))
    omega_0 = float(evaluate_on(omega, np.zeros(()))[()])

    return squeeze_scalar(np.where(tt <= 0, history, (geom.p - tt) / geom.p * omega_0))
