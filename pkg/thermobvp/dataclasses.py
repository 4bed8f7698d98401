from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

import numpy as np

from .exceptions import CustomValueError
from .grid import GridFunction, InterpolationRule, Mesh, QuadratureKind, QuadratureRule, make_mesh
from .geometry import ProblemGeometry
from .utils import Evaluable, RealLike, evaluate_on, squeeze_scalar

__all__ = [
    'Status',
    'ConditionResult',
    'HypothesisReport',
    'CheckOptions',
    'Envelope',

    'SolveOptions',
    'SolveResult',
    'VerificationReport',
    'SweepResult'
]


class Status(str, Enum):
    PASS = 'pass'
    FAIL = 'fail'
    ASSUMED = 'assumed'

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ConditionResult:
    name: str
    status: Status
    witness: float | None = None
    note: str = ''

    @property
    def failed(self) -> bool:
        return self.status is Status.FAIL

    def to_line(self) -> str:
        witness = '' if self.witness is None else f'{self.witness:.17g}'
        return f'{self.name},{self.status},{witness}'


@dataclass
class HypothesisReport:
    conditions: list[ConditionResult] = field(default_factory=list)
    sampling: dict[str, Any] = field(default_factory=dict)

    def __iter__(self) -> Iterator[ConditionResult]:
        return iter(self.conditions)

    def __getitem__(self, name: str) -> ConditionResult:
        for condition in self.conditions:
            if condition.name == name:
                return condition

        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(condition.name == name for condition in self.conditions)

    def add(self, *conditions: ConditionResult) -> HypothesisReport:
        self.conditions.extend(conditions)
        return self

    @property
    def passed(self) -> bool:
        """No checkable condition failed; assumed ones do not count."""
        return not any(condition.failed for condition in self.conditions)

    def to_lines(self) -> list[str]:
        return ['condition,status,witness', *(condition.to_line() for condition in self.conditions)]

    def to_text(self) -> str:
        width = max((len(c.name) for c in self.conditions), default=9)

        lines = [f'hypotheses: {"all checkable conditions pass" if self.passed else "FAILED"}', '']

        for c in self.conditions:
            witness = '-' if c.witness is None else f'{c.witness:.6e}'
            lines.append(f'  {c.name:<{width}}  {str(c.status):<7}  {witness:>13}  {c.note}'.rstrip())

        if self.sampling:
            lines += ['', 'sampling:', *(f'  {key} = {value}' for key, value in self.sampling.items())]

        return '\n'.join(lines) + '\n'


@dataclass(frozen=True)
class CheckOptions:
    """
    :param n_samples:       Quasi-random (t, s) samples per kernel bound.
    :param seed:            Seed of the scrambled Halton sequence.
    :param n_box:           Grid size per axis of the (u, v) box for the sampled δ.
    :param n_t:             Interior t points for the supremum of condition (c).
    :param n_spot:          Spot samples on [0, 1] for the range checks of f, g and σ.
    :param eta_rho:         Lower bound of B on the cone sphere; ``None`` uses the problem's or 0.
    """

    n_samples: int = 100_000
    seed: int = 0
    n_box: int = 64
    n_t: int = 1024
    n_spot: int = 257
    eta_rho: float | None = None
    n: int = 256
    n_hist: int = 64

    def __post_init__(self) -> None:
        for name in ('n_samples', 'n_box', 'n_t', 'n_spot'):
            if getattr(self, name) < 1:
                raise CustomValueError(f'{name} must be positive, got {getattr(self, name)}', self.__class__)

        if self.eta_rho is not None and not self.eta_rho >= 0:
            raise CustomValueError(f'eta_rho must be nonnegative, got {self.eta_rho}', self.__class__)


@dataclass(frozen=True)
class Envelope:
    """δ_ρ on [a, b]; ``approximate`` when it came from sampling f on a box rather than a formula."""

    delta: Evaluable
    approximate: bool
    M: float

    def __call__(self, t: Any) -> RealLike:
        return squeeze_scalar(evaluate_on(self.delta, np.asarray(t, dtype=np.float64)))

    @property
    def label(self) -> str:
        return 'approximate (sampled)' if self.approximate else 'analytic'


@dataclass(frozen=True)
class SolveOptions:
    """
    :param max_iterations:  Iteration cap.
    :param damping:         Initial α in (0, 1].
    :param min_damping:     Floor for α when the safeguard halves it.
    :param tol:             Fixed point tolerance.
    :param n:               Mesh panels on [0, 1].
    :param n_hist:          Mesh panels on [-r, 0].
    :param quadrature:      Kind of the s-quadrature.
    :param subdivisions:    Quadrature intervals per mesh interval.
    :param order:           Gauss points per quadrature interval.
    :param interpolation:   Rule of every grid function.
    :param cone_tol:        Relative cone defect tolerated in the operator image.
    :param initial:         Starting direction on [0, 1]; ``None`` for γ.
    """

    max_iterations: int = 500
    damping: float = 0.5
    min_damping: float = 1 / 64
    tol: float = 1e-10
    n: int = 256
    n_hist: int = 64
    quadrature: QuadratureKind = 'simpson'
    subdivisions: int = 2
    order: int = 4
    interpolation: InterpolationRule = 'cubic'
    cone_tol: float = 1e-9
    initial: Evaluable | None = None

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise CustomValueError(f'max_iterations must be positive, got {self.max_iterations}', self.__class__)

        if not 0 < self.damping <= 1:
            raise CustomValueError(f'damping must lie in (0, 1], got {self.damping}', self.__class__)

        if not 0 < self.min_damping <= self.damping:
            raise CustomValueError(
                f'min_damping must lie in (0, damping], got {self.min_damping}', self.__class__
            )

        if not self.tol > 0 or not self.cone_tol > 0:
            raise CustomValueError('tolerances must be positive', self.__class__)

        if self.n < 8 or self.n % 2 or self.n_hist < 1:
            raise CustomValueError(
                f'need an even n >= 8 and n_hist >= 1, got n={self.n}, n_hist={self.n_hist}', self.__class__
            )

        if self.interpolation not in ('linear', 'cubic', 'pchip'):
            raise CustomValueError(f'unknown interpolation rule "{self.interpolation}"', self.__class__)

        self.quadrature_rule()

    def mesh(self, geom: ProblemGeometry) -> Mesh:
        return make_mesh(geom.r, geom, self.n, self.n_hist)

    def quadrature_rule(self) -> QuadratureRule:
        return QuadratureRule(self.quadrature, subdivisions=self.subdivisions, order=self.order)


@dataclass(frozen=True, eq=False)
class SolveResult:
    """One point (ρ, λ_ρ, u_ρ) of the solution branch."""

    rho: float
    lam: float
    u: GridFunction
    psi: GridFunction
    fixed_point_residual: float
    iterations: int
    converged: bool
    history: tuple[float, ...] = ()
    options: SolveOptions = field(default_factory=SolveOptions)

    @property
    def v(self) -> GridFunction:
        """u − ψ, the cone part."""
        return self.u - self.psi

    def to_row(self) -> str:
        return (
            f'{self.rho:.17g},{self.lam:.17g},{self.fixed_point_residual:.17g},'
            f'{self.iterations},{str(self.converged).lower()}'
        )


@dataclass(frozen=True)
class VerificationReport:
    integral_residual: float
    ode_residual: float
    bc_residual: float
    history_defect: float
    cone_history_defect: float
    cone_ratio_defect: float
    boundary_gap: float
    lambda_valid: bool

    @property
    def valid(self) -> bool:
        return self.lambda_valid

    def to_text(self) -> str:
        rows = [
            ('integral residual', self.integral_residual),
            ('ode residual', self.ode_residual),
            ('bc residual', self.bc_residual),
            ('history defect', self.history_defect),
            ('cone history defect', self.cone_history_defect),
            ('cone ratio defect', self.cone_ratio_defect),
            ('boundary gap', self.boundary_gap)
        ]

        return '\n'.join([
            *(f'{name:<20} {value:.6e}' for name, value in rows),
            f'{"lambda":<20} {"valid" if self.lambda_valid else "INVALID (trivial pair)"}'
        ]) + '\n'


@dataclass(frozen=True)
class SweepResult:
    results: tuple[SolveResult, ...]
    warm_start: bool
    parallel: bool

    def __len__(self) -> int:
        return len(self.results)

    def __iter__(self) -> Iterator[SolveResult]:
        return iter(self.results)

    @property
    def all_converged(self) -> bool:
        return all(result.converged for result in self.results)

    def to_lines(self) -> list[str]:
        return ['rho,lambda,residual,iterations,converged', *(result.to_row() for result in self.results)]

    def metadata(self) -> str:
        lines = [f'points = {len(self.results)}', f'parallel = {str(self.parallel).lower()}',
                 f'warm_start = {str(self.warm_start).lower()}']

        if self.parallel:
            lines.append('# solved concurrently, every point starts from gamma')

        lines.append(f'converged = {sum(r.converged for r in self.results)}/{len(self.results)}')

        if (finite := [r.lam for r in self.results if math.isfinite(r.lam)]):
            lines.append(f'lambda_range = {min(finite):.17g} {max(finite):.17g}')

        return '\n'.join(lines) + '\n'
