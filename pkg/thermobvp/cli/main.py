from __future__ import annotations

import sys
from pathlib import Path
from typing import Any, Callable, NoReturn, TypeVar

import click
import numpy as np

from .._metadata import __version__
from ..dataclasses import HypothesisReport, SolveResult
from ..exceptions import (
    ConditionViolationError, ConeIntegrityError, ConfigError, ExprEvaluationError, SpecViolationError
)
from ..geometry import kernel_eval
from ..hypothesis import check_all
from ..solver import bk_iterate, sweep_rho, verify_solution
from .config import RunConfig, load_config
from .plot import write_svg

__all__ = [
    'EXIT_OK', 'EXIT_CONFIG', 'EXIT_HYPOTHESIS', 'EXIT_NO_CONVERGENCE',

    'cli', 'main'
]


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_NO_CONVERGENCE = 4

F = TypeVar('F', bound=Callable[..., Any])


def _config_option(func: F) -> F:
    return click.option(
        '--config', 'config_path', required=True, type=click.Path(dir_okay=False, path_type=Path),
        help='Run configuration (INI style).'
    )(func)


def _out_option(func: F) -> F:
    return click.option(
        '--out', type=click.Path(file_okay=False, path_type=Path), default=None,
        help='Output directory, overrides [output] directory.'
    )(func)


def _rho_option(func: F) -> F:
    return click.option('--rho', type=float, default=None, help='Radius of the cone sphere, overrides [run] rho.')(func)


def _load(config_path: Path, rho: float | None = None, out: Path | None = None) -> RunConfig:
    try:
        config = load_config(config_path).with_overrides(rho, out)
    except ConfigError as e:
        _fail(EXIT_CONFIG, f'config error: {e}')

    config.directory.mkdir(parents=True, exist_ok=True)

    return config


def _fail(code: int, message: str) -> NoReturn:
    click.echo(message, err=True)
    sys.exit(code)


def _rho_of(config: RunConfig) -> float:
    if config.rho is None:
        _fail(EXIT_CONFIG, 'config error: no rho given ([run] rho or --rho)')

    return config.rho


def _write_report(config: RunConfig, report: HypothesisReport) -> None:
    (config.directory / 'report.txt').write_text(report.to_text())
    (config.directory / 'hypothesis.csv').write_text('\n'.join(report.to_lines()) + '\n')


def _check(config: RunConfig, rho: float) -> HypothesisReport:
    report = check_all(config.spec, rho, config.check)
    _write_report(config, report)
    return report


def _witness(report: HypothesisReport) -> str:
    if 'c' in report and (witness := report['c'].witness) is not None:
        return f'{witness:.6e}'

    return '-'


@click.group()
@click.version_option(version=__version__, prog_name='thermobvp')
def cli() -> None:
    """
    Thermostat boundary value problems with deviated arguments.

    Computes pairs (lambda, u) of u'' + lambda f(t, u(t), u(sigma(t))) = 0, u = omega on [-r, 0],
    beta u'(1) + u(eta) = lambda B[u] with u - psi on the sphere of radius rho of the cone.

    Examples:

        thermobvp check --config thermostat.ini

        thermobvp solve --config thermostat.ini --rho 2 --out out/rho2

        thermobvp sweep --config thermostat.ini --parallel
    """


@cli.command()
@_config_option
@_rho_option
@_out_option
def check(config_path: Path, rho: float | None, out: Path | None) -> None:
    """Verify the hypotheses and conditions (a) to (c); writes report.txt and hypothesis.csv."""

    config = _load(config_path, rho, out)
    report = _check(config, _rho_of(config))

    click.echo(
        f'check {config.name} rho={_rho_of(config):g}: {"pass" if report.passed else "FAIL"} '
        f'(c witness {_witness(report)})'
    )

    sys.exit(EXIT_OK if report.passed else EXIT_HYPOTHESIS)


def _write_solution(config: RunConfig, result: SolveResult) -> None:
    result.u.to_csv(str(config.directory / 'solution.csv'))

    (config.directory / 'branch.csv').write_text(
        'rho,lambda,residual,iterations,converged\n' + result.to_row() + '\n'
    )

    if config.plot:
        write_svg(
            config.directory / 'solution.svg', result.u.mesh.nodes, result.u.values,
            f'{config.name}, rho = {result.rho:g}, lambda = {result.lam:.6g}', 't', 'u'
        )


@cli.command()
@_config_option
@_rho_option
@_out_option
@click.option('--force', is_flag=True, help='Solve even when a hypothesis check fails.')
def solve(config_path: Path, rho: float | None, out: Path | None, force: bool) -> None:
    """Compute (lambda, u) for one rho; writes solution.csv, branch.csv, verification.txt and solution.svg."""

    config = _load(config_path, rho, out)
    radius = _rho_of(config)

    if not force and not (report := _check(config, radius)).passed:
        _fail(EXIT_HYPOTHESIS, f'solve {config.name} rho={radius:g}: hypotheses fail (c witness {_witness(report)})')

    try:
        result = bk_iterate(config.spec, radius, config.solve)
    except (ConditionViolationError, SpecViolationError, ExprEvaluationError) as e:
        _fail(EXIT_HYPOTHESIS, f'solve {config.name} rho={radius:g}: {e}')
    except ConeIntegrityError as e:
        _fail(EXIT_NO_CONVERGENCE, f'solve {config.name} rho={radius:g}: {e}')

    verification = verify_solution(config.spec, result)

    _write_solution(config, result)

    (config.directory / 'verification.txt').write_text(
        f'problem = {config.name}\nrho = {result.rho:.17g}\nlambda = {result.lam:.17g}\n'
        f'iterations = {result.iterations}\nconverged = {str(result.converged).lower()}\n\n'
        + verification.to_text()
    )

    click.echo(
        f'solve {config.name} rho={radius:g}: lambda={result.lam:.10g} iterations={result.iterations} '
        f'residual={result.fixed_point_residual:.3e} {"converged" if result.converged else "NOT CONVERGED"}'
    )

    sys.exit(EXIT_OK if result.converged else EXIT_NO_CONVERGENCE)


@cli.command()
@_config_option
@_out_option
@click.option('--force', is_flag=True, help='Sweep even when a hypothesis check fails.')
@click.option('--parallel', is_flag=True, help='Solve the points concurrently, without warm starts.')
def sweep(config_path: Path, out: Path | None, force: bool, parallel: bool) -> None:
    """Follow the branch rho -> lambda over [run] rho_list; writes branch.csv, sweep.txt and branch.svg."""

    config = _load(config_path, None, out)

    if not config.rho_list:
        _fail(EXIT_CONFIG, 'config error: sweep needs a non-empty [run] rho_list')

    if not force:
        for radius in config.rho_list:
            if not (report := _check(config, radius)).passed:
                _fail(
                    EXIT_HYPOTHESIS,
                    f'sweep {config.name}: hypotheses fail at rho={radius:g} (c witness {_witness(report)})'
                )

    try:
        branch = sweep_rho(config.spec, config.rho_list, config.solve, parallel)
    except (ConditionViolationError, SpecViolationError, ExprEvaluationError) as e:
        _fail(EXIT_HYPOTHESIS, f'sweep {config.name}: {e}')
    except ConeIntegrityError as e:
        _fail(EXIT_NO_CONVERGENCE, f'sweep {config.name}: {e}')

    (config.directory / 'branch.csv').write_text('\n'.join(branch.to_lines()) + '\n')
    (config.directory / 'sweep.txt').write_text(f'problem = {config.name}\n' + branch.metadata())

    if config.plot and len(branch) > 1:
        write_svg(
            config.directory / 'branch.svg', [r.rho for r in branch], [r.lam for r in branch],
            f'{config.name}: lambda against rho', 'rho', 'lambda'
        )

    converged = sum(r.converged for r in branch)

    click.echo(
        f'sweep {config.name}: {converged}/{len(branch)} converged, '
        f'{"parallel" if branch.parallel else "warm started"}'
    )

    sys.exit(EXIT_OK if branch.all_converged else EXIT_NO_CONVERGENCE)


@cli.command()
@_config_option
@_out_option
def kernel(config_path: Path, out: Path | None) -> None:
    """Dump k(t, s) on a kernel_n x kernel_n grid over [-r, 1] x [0, 1] to kernel.csv."""

    config = _load(config_path, None, out)
    geom = config.geometry

    t = np.linspace(-geom.r, 1.0, config.kernel_n)
    s = np.linspace(0.0, 1.0, config.kernel_n)
    tt, ss = np.meshgrid(t, s, indexing='ij')

    np.savetxt(
        config.directory / 'kernel.csv',
        np.column_stack([tt.ravel(), ss.ravel(), np.asarray(kernel_eval(geom, tt, ss)).ravel()]),
        delimiter=',', header='t,s,k', comments='', fmt='%.17g'
    )

    click.echo(f'kernel {config.name}: {tt.size} values written to {config.directory / "kernel.csv"}')


def main() -> None:
    cli(prog_name='thermobvp')
