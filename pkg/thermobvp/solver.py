from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np

from .cone import ConeSpec, boundary_gap, cone_defect
from .dataclasses import SolveOptions, SolveResult, SweepResult, VerificationReport
from .exceptions import (
    ConditionViolationError, ConeIntegrityError, ConvergenceWarning, CustomValueError, MeshError
)
from .geometry import gamma_eval
from .grid import GridFunction, Mesh, interp_eval, sup_norm
from .operator import HammersteinOperator, ProblemSpec, boundary_operator, eval_functional, vertex
from .utils import as_float_array, debug_print, evaluate_on

__all__ = [
    'bk_iterate',
    'verify_solution',
    'sweep_rho'
]


@dataclass(frozen=True)
class _Setup:
    spec: ProblemSpec
    options: SolveOptions
    mesh: Mesh
    operator: HammersteinOperator
    psi: GridFunction
    cone: ConeSpec

    @classmethod
    def build(cls, spec: ProblemSpec, options: SolveOptions) -> _Setup:
        mesh = options.mesh(spec.geometry)

        return cls(
            spec, options, mesh,
            HammersteinOperator(spec, mesh, options.quadrature_rule()),
            vertex(spec, mesh, options.interpolation),
            ConeSpec.from_geometry(spec.geometry)
        )

    def direction(self, initial: GridFunction | None) -> GridFunction:
        if initial is not None:
            if not initial.mesh.same_as(self.mesh):
                raise MeshError('the initial direction lives on another mesh', bk_iterate)

            values = initial.values.copy()
        else:
            func = self.options.initial or partial(gamma_eval, self.spec.geometry)
            values = evaluate_on(func, self.mesh.nodes).copy()

        # members of K₀ vanish on the history
        values[:self.mesh.zero + 1] = 0.0

        return GridFunction(self.mesh, values, self.options.interpolation)

    def image(self, v: GridFunction) -> tuple[GridFunction, float]:
        """F(ψ + v) and its norm on [0, 1]; checks the image is a nonzero member of K₀."""

        w = self.operator(self.psi + v)
        norm = sup_norm(w, 0.0, 1.0)

        if not norm > 0:
            raise ConditionViolationError(
                'condition (c) violated numerically: F(psi + v) vanishes on [0, 1]', bk_iterate
            )

        defect = cone_defect(w, self.cone)

        if not defect.within(self.options.cone_tol * max(1.0, norm)):
            raise ConeIntegrityError(
                f'operator image left the cone (history {defect.history:.3e}, ratio {defect.ratio:.3e})', bk_iterate
            )

        return w, norm


def _on_sphere(v: GridFunction, rho: float) -> GridFunction:
    if not (norm := sup_norm(v, 0.0, 1.0)) > 0:
        raise CustomValueError('the initial direction vanishes on [0, 1]', bk_iterate)

    return v * (rho / norm)


def _iterate(setup: _Setup, rho: float, initial: GridFunction | None = None) -> SolveResult:
    opts = setup.options
    r = setup.mesh.r

    v = _on_sphere(setup.direction(initial), rho)

    alpha = opts.damping
    history = list[float]()
    best: tuple[float, GridFunction, float] | None = None
    converged = False

    for k in range(1, opts.max_iterations + 1):
        w, norm = setup.image(v)
        target = w * (rho / norm)

        # v and λF(ψ + v) agree on the history, so this is also the integral residual of ψ + v
        distance = sup_norm(target - v, -r, 1.0)
        history.append(distance)

        debug_print(f'bk_iterate: rho={rho:g} k={k} distance={distance:.3e} alpha={alpha:g} lambda={rho / norm:.10g}')

        if best is None or distance < best[0]:
            best = (distance, v, norm)

        if distance <= opts.tol:
            polished_w, polished_norm = setup.image(target)
            polished = sup_norm(polished_w * (rho / polished_norm) - target, -r, 1.0)

            best = (polished, target, polished_norm) if polished <= distance else (distance, v, norm)
            converged = True
            break

        if len(history) > 1 and distance > history[-2]:
            alpha = max(alpha / 2, opts.min_damping)

        v = _on_sphere(v * (1 - alpha) + target * alpha, rho)

    assert best is not None

    residual, v, norm = best

    if not converged:
        warnings.warn(
            f'bk_iterate: no convergence for rho={rho:g} after {opts.max_iterations} iterations, '
            f'best residual {residual:.3e}', ConvergenceWarning
        )

    return SolveResult(
        rho, rho / norm, setup.psi + v, setup.psi, residual, len(history), converged, tuple(history), opts
    )


def bk_iterate(
    spec: ProblemSpec, rho: float, opts: SolveOptions | None = None, initial: GridFunction | None = None
) -> SolveResult:
    """
    Find (λ, u) with u = ψ + λFu and ‖u − ψ‖ = ρ on [0, 1].

    Damped normalised Picard iteration on the sphere of radius ρ in K₀: v ← (1 − α)v + αρw/‖w‖,
    w = F(ψ + v), renormalised to ‖v‖ = ρ. α halves (down to ``min_damping``) whenever the distance
    to the next target grows. Without convergence the best iterate comes back with ``converged=False``.

    :param initial:     Starting direction on the solver mesh, e.g. a previous ``result.v``.
    """

    if not rho > 0:
        raise CustomValueError(f'rho must be positive, got {rho}', bk_iterate)

    return _iterate(_Setup.build(spec, opts or SolveOptions()), rho, initial)


def _ode_residual(spec: ProblemSpec, u: GridFunction, lam: float) -> float:
    nodes, values = u.mesh.unit, u.unit_values

    t = nodes[1:-1]
    h0, h1 = t - nodes[:-2], nodes[2:] - t

    second = 2 * ((values[2:] - values[1:-1]) / h1 - (values[1:-1] - values[:-2]) / h0) / (h0 + h1)

    deviated = as_float_array(interp_eval(u, spec.sigma_on(t)))
    source = spec.f_on(t, values[1:-1], deviated) * spec.g_on(t)

    return float(np.max(np.abs(second + lam * source)))


def verify_solution(spec: ProblemSpec, result: SolveResult) -> VerificationReport:
    """Residuals of ``result`` against the integral equation and against the BVP itself."""

    setup = _Setup.build(spec, result.options)
    u, lam = result.u, result.lam

    if not u.mesh.same_as(setup.mesh):
        raise MeshError('the result was not computed with its own options', verify_solution)

    r = setup.mesh.r
    integral = sup_norm(u - setup.psi - setup.operator(u) * lam, -r, 1.0)

    bc = abs(boundary_operator(spec.geometry, u) - lam * eval_functional(spec.B, u, setup.operator.rule))

    omega = evaluate_on(spec.omega, setup.mesh.history)
    history = float(np.max(np.abs(u.history_values - omega)))

    defect = cone_defect(u - setup.psi, setup.cone)

    return VerificationReport(
        integral, _ode_residual(spec, u, lam), bc, history, defect.history, defect.ratio,
        abs(boundary_gap(u, setup.psi, result.rho)), math.isfinite(lam) and lam > 0
    )


def sweep_rho(
    spec: ProblemSpec, rho_values: Sequence[float], opts: SolveOptions | None = None,
    parallel: bool = False, max_workers: int | None = None
) -> SweepResult:
    """
    Solve along increasing ρ.

    Sequentially each point starts from the previous converged direction. With ``parallel``
    the points are independent, start from γ and run on a thread pool.
    """

    rhos = [float(rho) for rho in rho_values]

    if any(not rho > 0 for rho in rhos):
        raise CustomValueError('rho values must be positive', sweep_rho)

    if any(lo >= hi for lo, hi in zip(rhos[:-1], rhos[1:])):
        raise CustomValueError('rho values must be strictly increasing', sweep_rho)

    if not rhos:
        return SweepResult((), not parallel, parallel)

    setup = _Setup.build(spec, opts or SolveOptions())

    if parallel:
        with ThreadPoolExecutor(max_workers) as executor:
            results = tuple(executor.map(partial(_iterate, setup), rhos))

        return SweepResult(results, False, True)

    branch = list[SolveResult]()
    direction: GridFunction | None = None

    for rho in rhos:
        branch.append(result := _iterate(setup, rho, direction))

        if result.converged:
            direction = result.v

    return SweepResult(tuple(branch), True, False)
