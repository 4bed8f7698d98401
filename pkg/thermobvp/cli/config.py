from __future__ import annotations

import configparser
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable, TypeVar

from ..dataclasses import CheckOptions, SolveOptions
from ..exceptions import ConfigError, ThermoError
from ..geometry import ProblemGeometry
from ..operator import ProblemSpec
from ..problems import BUILTIN_ALIASES, BUILTINS, spec_from_expressions

__all__ = [
    'RunConfig',

    'load_config', 'parse_config'
]


T = TypeVar('T')

_KEYS = {
    'geometry': {'beta', 'eta', 'r', 'a', 'b'},
    'problem': {'builtin', 'f', 'sigma', 'omega', 'g', 'b_kind', 'b_weight', 'b_value'},
    'numerics': {
        'n', 'n_hist', 'quadrature', 'subdivisions', 'order', 'interpolation', 'tol', 'max_iterations',
        'damping', 'min_damping', 'cone_tol', 'n_samples', 'seed', 'n_box', 'n_t', 'kernel_n'
    },
    'run': {'rho', 'rho_list', 'eta_rho'},
    'output': {'directory', 'plot'}
}

_SOLVE_KEYS = {
    'n': int, 'n_hist': int, 'quadrature': str, 'subdivisions': int, 'order': int, 'interpolation': str,
    'tol': float, 'max_iterations': int, 'damping': float, 'min_damping': float, 'cone_tol': float
}

_CHECK_KEYS = {'n_samples': int, 'seed': int, 'n_box': int, 'n_t': int, 'n': int, 'n_hist': int}


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Everything one CLI run needs, validated."""

    name: str
    spec: ProblemSpec
    solve: SolveOptions
    check: CheckOptions
    rho: float | None
    rho_list: tuple[float, ...]
    directory: Path
    plot: bool
    kernel_n: int

    @property
    def geometry(self) -> ProblemGeometry:
        return self.spec.geometry

    def with_overrides(self, rho: float | None = None, directory: Path | None = None) -> RunConfig:
        values = {f.name: getattr(self, f.name) for f in fields(self)}

        if rho is not None:
            if not rho > 0:
                raise ConfigError(f'rho must be positive, got {rho}', self.with_overrides)

            values['rho'] = rho

        if directory is not None:
            values['directory'] = directory

        return RunConfig(**values)


def _convert(section: str, key: str, raw: str, kind: Callable[[str], T]) -> T:
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f'[{section}] {key} = "{raw}" is not a valid {kind.__name__}', parse_config)


def _boolean(raw: str) -> bool:
    if (lowered := raw.strip().lower()) in ('1', 'true', 'yes', 'on'):
        return True

    if lowered in ('0', 'false', 'no', 'off'):
        return False

    raise ValueError(raw)


_boolean.__name__ = 'boolean'


def _float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.replace(',', ' ').split())


_float_list.__name__ = 'list of numbers'


def _section(parser: configparser.ConfigParser, name: str) -> dict[str, str]:
    return dict(parser[name]) if parser.has_section(name) else {}


def _geometry(parser: configparser.ConfigParser, base: ProblemGeometry | None) -> ProblemGeometry:
    raw = _section(parser, 'geometry')

    if base is None and (missing := sorted(_KEYS['geometry'] - set(raw))):
        raise ConfigError(f'[geometry] misses {", ".join(missing)}', parse_config)

    values: dict[str, Any] = {} if base is None else {f.name: getattr(base, f.name) for f in fields(base)}
    values |= {key: _convert('geometry', key, value, float) for key, value in raw.items()}

    return ProblemGeometry(**values)


def _problem(parser: configparser.ConfigParser) -> tuple[str, ProblemSpec]:
    raw = _section(parser, 'problem')

    if 'builtin' in raw:
        given = raw['builtin'].strip()

        if (name := BUILTIN_ALIASES.get(given, given)) not in BUILTINS:
            raise ConfigError(f'unknown built-in "{given}", pick one of {sorted(BUILTINS)}', parse_config)

        if extra := sorted(set(raw) - {'builtin'}):
            raise ConfigError(f'[problem] builtin cannot be combined with {", ".join(extra)}', parse_config)

        builtin = BUILTINS[name]

        return name, builtin.spec(_geometry(parser, builtin.geometry))

    if missing := sorted({'f', 'sigma', 'omega'} - set(raw)):
        raise ConfigError(f'[problem] needs builtin or f, sigma and omega; missing {", ".join(missing)}', parse_config)

    b_value = _convert('problem', 'b_value', raw['b_value'], float) if 'b_value' in raw else None

    return 'custom', spec_from_expressions(
        _geometry(parser, None), raw['f'], raw['sigma'], raw['omega'], raw.get('g'),
        raw.get('b_kind', 'zero').strip(), raw.get('b_weight'), b_value  # type: ignore[arg-type]
    )


def parse_config(text: str, source: str = '<config>') -> RunConfig:
    """Read the ``key = value`` text with ``[geometry]``, ``[problem]``, ``[numerics]``, ``[run]`` and ``[output]``."""

    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))

    try:
        parser.read_string(text, source)
    except configparser.Error as e:
        raise ConfigError(f'{source}: {e.message}', parse_config)

    for section in parser.sections():
        if section not in _KEYS:
            raise ConfigError(f'unknown section [{section}]', parse_config)

        if unknown := sorted(set(parser[section]) - _KEYS[section]):
            raise ConfigError(f'unknown key(s) in [{section}]: {", ".join(unknown)}', parse_config)

    numerics = _section(parser, 'numerics')
    run = _section(parser, 'run')
    output = _section(parser, 'output')

    try:
        name, spec = _problem(parser)

        solve = SolveOptions(**{
            key: _convert('numerics', key, numerics[key], kind) for key, kind in _SOLVE_KEYS.items() if key in numerics
        })

        eta_rho = _convert('run', 'eta_rho', run['eta_rho'], float) if 'eta_rho' in run else None

        check = CheckOptions(eta_rho=eta_rho, **{
            key: _convert('numerics', key, numerics[key], kind) for key, kind in _CHECK_KEYS.items() if key in numerics
        })
    except ConfigError:
        raise
    except (ThermoError, TypeError) as e:
        raise ConfigError(f'{source}: {e}', parse_config) from e

    rho = _convert('run', 'rho', run['rho'], float) if 'rho' in run else None
    rho_list = _convert('run', 'rho_list', run['rho_list'], _float_list) if 'rho_list' in run else ()

    if rho is not None and not rho > 0:
        raise ConfigError(f'[run] rho must be positive, got {rho}', parse_config)

    if any(not x > 0 for x in rho_list) or any(lo >= hi for lo, hi in zip(rho_list[:-1], rho_list[1:])):
        raise ConfigError('[run] rho_list must be positive and strictly increasing', parse_config)

    kernel_n = _convert('numerics', 'kernel_n', numerics.get('kernel_n', '65'), int)

    if kernel_n < 2:
        raise ConfigError(f'[numerics] kernel_n must be at least 2, got {kernel_n}', parse_config)

    return RunConfig(
        name, spec, solve, check, rho, rho_list,
        Path(output.get('directory', 'out')),
        _convert('output', 'plot', output.get('plot', 'true'), _boolean),
        kernel_n
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f'cannot read "{path}": {e.strerror}', load_config)

    return parse_config(text, str(path))
