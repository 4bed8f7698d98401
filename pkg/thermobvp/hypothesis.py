from __future__ import annotations

import warnings

import numpy as np
from scipy.stats import qmc

from .dataclasses import CheckOptions, ConditionResult, Envelope, HypothesisReport, Status
from .exceptions import CustomValueError, ExprEvaluationError, FunctionalSignWarning, SpecViolationError
from .geometry import ProblemGeometry, cone_constants, gamma_eval, kernel_eval, phi_envelope
from .grid import QuadratureRule, integrate, make_mesh, sup_norm
from .operator import ProblemSpec, eval_functional, vertex
from .utils import Evaluable, FloatArray, as_float_array, debug_print, evaluate_on

__all__ = [
    'check_kernel_bounds',
    'check_c4',
    'check_gamma',

    'lower_envelope_delta',
    'eigen_condition_c',

    'check_all'
]


_BOUND_TOL = 1e-12

# anything at or below this counts as zero for condition (c)
_POSITIVE_GUARD = 1e-300

# t values handed to the sampled envelope at once
_ENVELOPE_CHUNK = 128


def _halton(n: int, seed: int) -> FloatArray:
    return as_float_array(qmc.Halton(d=2, scramble=True, seed=seed).random(n))


def check_kernel_bounds(
    geom: ProblemGeometry, n_samples: int = 100_000, seed: int = 0,
    c1: float | None = None, t_range: tuple[float, float] | None = None
) -> list[ConditionResult]:
    """
    Sample |k(t, s)| ≤ Φ(s) and k(t, s) ≥ c₁Φ(s) on [a, b] × [0, 1], plus k = 0 for t ≤ 0.

    :param c1:          Overrides the cone constant, to test the bound against another value.
    :param t_range:     t interval for the envelope bound, [0, 1] by default.
    """

    if n_samples < 1:
        raise CustomValueError(f'n_samples must be positive, got {n_samples}', check_kernel_bounds)

    lo, hi = t_range or (0.0, 1.0)
    c1 = cone_constants(geom).c1 if c1 is None else c1

    x = _halton(n_samples, seed)
    t, s = lo + (hi - lo) * x[:, 0], x[:, 1]
    envelope_margin = float(np.min(phi_envelope(geom, s) - np.abs(kernel_eval(geom, t, s))))

    x = _halton(n_samples, seed + 1)
    t, s = geom.a + (geom.b - geom.a) * x[:, 0], x[:, 1]
    cone_margin = float(np.min(kernel_eval(geom, t, s) - c1 * phi_envelope(geom, s)))

    x = _halton(n_samples, seed + 2)
    history = float(np.max(np.abs(kernel_eval(geom, -geom.r * x[:, 0], x[:, 1]))))

    debug_print(f'check_kernel_bounds: margins {envelope_margin:.3e} / {cone_margin:.3e}, history {history:g}')

    def _status(ok: bool) -> Status:
        return Status.PASS if ok else Status.FAIL

    return [
        ConditionResult('C2', _status(history == 0.0), history, 'k(t, s) = 0 for t <= 0'),
        ConditionResult(
            'C3-envelope', _status(envelope_margin >= -_BOUND_TOL), envelope_margin,
            f'min of Phi(s) - |k(t, s)| over t in [{lo:g}, {hi:g}]'
        ),
        ConditionResult(
            'C3-cone', _status(cone_margin >= -_BOUND_TOL), cone_margin, f'min of k(t, s) - c1 Phi(s), c1 = {c1:.6g}'
        )
    ]


def check_c4(geom: ProblemGeometry, g: Evaluable | None = None, n: int = 256) -> float:
    """∫ₐᵇ Φ(s)g(s) ds by Simpson on ``n`` intervals; g ≡ 1 when ``None``."""

    s = np.linspace(geom.a, geom.b, n + n % 2 + 1)
    weight = np.ones_like(s) if g is None else evaluate_on(g, s)

    if np.any(~(weight >= 0)):
        raise SpecViolationError(f'g is negative at s={s[np.argmin(weight)]:g}', check_c4, 'C4')

    return integrate((s, as_float_array(phi_envelope(geom, s)) * weight), QuadratureRule(breakpoints=(geom.a, geom.b)))


def check_gamma(geom: ProblemGeometry, n: int = 1024) -> ConditionResult:
    """γ(t) ≥ c₂‖γ‖ on [a, b], sampled directly."""

    c2 = cone_constants(geom).c2

    low = float(np.min(gamma_eval(geom, np.linspace(geom.a, geom.b, n + 1))))
    top = float(np.max(gamma_eval(geom, np.linspace(0.0, 1.0, n + 1))))

    margin = low - c2 * top

    return ConditionResult(
        'C7', Status.PASS if margin >= -_BOUND_TOL else Status.FAIL, margin,
        f'min gamma on [a, b] - c2 ||gamma||, c2 = {c2:g}'
    )


def lower_envelope_delta(
    f: Evaluable, geom: ProblemGeometry, rho: float, psi_norm: float,
    n_box: int = 64, analytic: Evaluable | None = None
) -> Envelope:
    """
    δ_ρ with f(t, u, v) ≥ δ_ρ(t) for max(|u|, |v|) ≤ ρ + ‖ψ‖.

    ``analytic`` is returned as is. Otherwise δ is the minimum of f over an
    ``n_box`` × ``n_box`` grid of the box, which is only approximate.
    """

    if not rho > 0:
        raise CustomValueError(f'rho must be positive, got {rho}', lower_envelope_delta)

    if not (np.isfinite(M := rho + psi_norm) and M >= 0):
        raise CustomValueError(f'box half width must be finite, got {M}', lower_envelope_delta)

    if analytic is not None:
        return Envelope(analytic, False, M)

    if n_box < 2:
        raise CustomValueError(f'n_box must be at least 2, got {n_box}', lower_envelope_delta)

    box = np.linspace(-M, M, n_box)

    def _sampled(t: FloatArray) -> FloatArray:
        tt = as_float_array(t)
        flat = tt.reshape(-1)
        out = np.empty_like(flat)

        for start in range(0, flat.size, _ENVELOPE_CHUNK):
            chunk = flat[start:start + _ENVELOPE_CHUNK]
            values = evaluate_on(f, chunk[:, None, None], box[None, :, None], box[None, None, :])

            if np.any(~(values >= 0)):
                raise SpecViolationError('f takes negative values on the box', lower_envelope_delta, 'C5')

            out[start:start + chunk.size] = values.min(axis=(1, 2))

        return out.reshape(tt.shape)

    return Envelope(_sampled, True, M)


def _sup_grid(geom: ProblemGeometry, n_t: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    t = np.linspace(geom.a, geom.b, n_t + 2)

    # s = t and s = η are the kinks of k(t, ·); both are panel boundaries
    breaks = np.union1d(t, [geom.eta] if geom.a < geom.eta < geom.b else [])

    s, w = QuadratureRule(breakpoints=tuple(breaks)).nodes_weights()

    return t, s, w


def eigen_condition_c(geom: ProblemGeometry, delta: Evaluable, eta_rho: float = 0.0, n_t: int = 1024) -> float:
    """
    sup over t in [a, b] of γ(t)η_ρ + ∫ₐᵇ k(t, s)δ(s) ds, on ``n_t`` interior points plus the ends.

    Condition (c) holds when this is positive; through the cone lower estimate on [a, b]
    it bounds ‖Fu‖ from below on the cone sphere.
    """

    if not eta_rho >= 0:
        raise CustomValueError(f'eta_rho must be nonnegative, got {eta_rho}', eigen_condition_c)

    t, s, w = _sup_grid(geom, n_t)
    d = evaluate_on(delta, s)

    if np.any(~(d >= 0)):
        raise SpecViolationError(f'delta is negative at s={s[np.argmin(d)]:g}', eigen_condition_c, 'a')

    values = as_float_array(gamma_eval(geom, t)) * eta_rho + kernel_eval(geom, t[:, None], s[None, :]) @ (w * d)

    return float(np.max(values))


def _spot_grid(options: CheckOptions) -> FloatArray:
    return np.linspace(0.0, 1.0, options.n_spot)


def check_all(spec: ProblemSpec, rho: float, options: CheckOptions | None = None) -> HypothesisReport:
    """Every checkable hypothesis plus conditions (a) to (c) at ``rho``; failures are recorded, never raised."""

    options = options or CheckOptions()
    geom = spec.geometry

    if not rho > 0:
        raise CustomValueError(f'rho must be positive, got {rho}', check_all)

    mesh = make_mesh(geom.r, geom, options.n, options.n_hist)

    report = HypothesisReport(sampling={
        'rho': rho, 'n_samples': options.n_samples, 'seed': options.seed,
        'n_box': options.n_box, 'n_t': options.n_t
    })

    try:
        psi = vertex(spec, mesh)
        psi_norm = sup_norm(psi, -geom.r, 1.0)
        omega_0 = float(evaluate_on(spec.omega, np.zeros(()))[()])
    except (SpecViolationError, ExprEvaluationError) as e:
        return report.add(
            ConditionResult('C1', Status.FAIL, None, str(e)),
            ConditionResult('c', Status.FAIL, None, 'needs the vertex psi')
        )

    report.sampling['psi_norm'] = psi_norm

    jump = abs(omega_0 - float(psi.values[mesh.zero]))
    report.add(ConditionResult('C1', Status.ASSUMED, jump, 'psi continuity assumed; jump at t = 0 shown'))

    report.add(*check_kernel_bounds(geom, options.n_samples, options.seed))

    try:
        c4 = check_c4(geom, spec.g)
        report.add(ConditionResult('C4', Status.PASS if c4 > 0 else Status.FAIL, c4, 'int_a^b Phi g'))
    except (SpecViolationError, ExprEvaluationError) as e:
        report.add(ConditionResult('C4', Status.FAIL, None, str(e)))

    spot = _spot_grid(options)
    M = rho + psi_norm

    try:
        corners = np.array([-M, 0.0, M])
        f_min = float(np.min(spec.f_on(spot[:, None, None], corners[None, :, None], corners[None, None, :])))
        report.add(ConditionResult('C5', Status.ASSUMED, f_min, 'measurability assumed; min of spot samples shown'))
    except (SpecViolationError, ExprEvaluationError) as e:
        report.add(ConditionResult('C5', Status.FAIL, None, str(e)))

    try:
        dev = spec.sigma_on(spot)
        slack = float(min(dev.min() + geom.r, 1.0 - dev.max()))
        report.add(ConditionResult('C6', Status.ASSUMED, slack, 'continuity assumed; range slack of spot samples'))
    except (SpecViolationError, ExprEvaluationError) as e:
        report.add(ConditionResult('C6', Status.FAIL, None, str(e)))

    report.add(check_gamma(geom))

    delta: Envelope | None = None

    try:
        delta = lower_envelope_delta(
            spec.f, geom, rho, psi_norm, options.n_box, spec.delta(rho) if spec.delta else None
        )

        report.sampling['delta'] = delta.label

        if delta.approximate:
            warnings.warn(
                'check_all: no analytic delta for this problem, condition (a) uses a sampled envelope', UserWarning
            )

        d_min = float(np.min(delta(np.linspace(geom.a, geom.b, 65))))
        report.add(ConditionResult('a', Status.PASS if d_min >= 0 else Status.FAIL, d_min, f'delta {delta.label}'))
    except (SpecViolationError, ExprEvaluationError) as e:
        report.add(ConditionResult('a', Status.FAIL, None, str(e)))

    report.sampling['M'] = M

    try:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', FunctionalSignWarning)
            b_psi = eval_functional(spec.B, psi)
    except (SpecViolationError, ExprEvaluationError) as e:
        report.add(ConditionResult('b', Status.FAIL, None, str(e)))
    else:
        if b_psi < 0:
            report.add(ConditionResult('b', Status.FAIL, b_psi, 'B is negative at psi'))
        else:
            source = 'given' if options.eta_rho is not None or spec.eta_rho else 'default 0 for nonnegative B'
            report.add(ConditionResult(
                'b', Status.ASSUMED, _eta_rho(spec, rho, options),
                f'eta_rho {source}; boundedness of B assumed, B[psi] = {b_psi:.6g}'
            ))

    if delta is None or report['a'].failed or report['b'].failed:
        report.add(ConditionResult('c', Status.FAIL, None, 'needs (a) and (b)'))
        return report

    try:
        value = eigen_condition_c(geom, delta, _eta_rho(spec, rho, options), options.n_t)
    except (SpecViolationError, ExprEvaluationError) as e:
        report.add(ConditionResult('c', Status.FAIL, None, str(e)))
    else:
        report.add(ConditionResult(
            'c', Status.PASS if value > _POSITIVE_GUARD else Status.FAIL, value,
            'sup_t gamma(t) eta_rho + int_a^b k(t, s) delta(s) ds'
        ))

    return report


def _eta_rho(spec: ProblemSpec, rho: float, options: CheckOptions) -> float:
    if options.eta_rho is not None:
        return options.eta_rho

    return float(spec.eta_rho(rho)) if spec.eta_rho else 0.0

