from __future__ import annotations

from pathlib import Path

import pytest
from click.testing import CliRunner

from thermobvp import ConfigError, SolveOptions
from thermobvp.cli import EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_OK, cli, parse_config, svg_curve, write_svg

EXAMPLE = """
[problem]
builtin = paper_example

[numerics]
n_samples = 4096
n_t = 256

[run]
rho = 1
"""

LINEAR = """
[problem]
builtin = linear_oracle

[numerics]
n_samples = 4096

[run]
rho = 1
rho_list = 1, 2
"""

CUSTOM = """
[geometry]
beta = 0.25
eta = 0.25
r = 1
a = 0.125
b = 0.25

[problem]
f = t*exp(u+2*v)   # reflection
sigma = -t
omega = sqrt(1+t)
b_kind = square
b_weight = t^2

[numerics]
n = 128
n_hist = 32
damping = 0.75

[output]
directory = results
plot = no
"""


def write(tmp_path: Path, text: str, name: str = 'run.ini') -> str:
    (path := tmp_path / name).write_text(text)
    return str(path)


class TestConfig:
    """INI parsing into a validated run configuration."""

    def test_builtin(self):
        config = parse_config(EXAMPLE)

        assert config.name == 'paper_example'
        assert config.rho == 1.0
        assert config.rho_list == ()
        assert config.check.n_samples == 4096
        assert config.solve == SolveOptions()
        assert config.plot
        assert config.kernel_n == 65

    def test_alias(self):
        config = parse_config(EXAMPLE.replace('paper_example', 'exp_reflection'))

        assert config.name == 'paper_example'
        assert config.spec.name == 'paper_example'

    def test_custom(self):
        config = parse_config(CUSTOM)

        assert config.name == 'custom'
        assert config.geometry.p == 0.5
        assert config.spec.B.kind == 'square'
        assert config.solve.n == 128
        assert config.solve.damping == 0.75
        assert config.directory == Path('results')
        assert not config.plot
        assert config.rho is None

    def test_builtin_geometry_override(self):
        config = parse_config(EXAMPLE + '\n[geometry]\nbeta = 0.3\n')

        assert config.geometry.beta == 0.3
        assert config.geometry.eta == 0.25

    def test_rho_list(self):
        config = parse_config(LINEAR.replace('1, 2', '0.25, 0.5 1'))

        assert config.rho_list == (0.25, 0.5, 1.0)

    @pytest.mark.parametrize('text', [
        EXAMPLE + '\n[extra]\nkey = 1\n',
        EXAMPLE.replace('n_t = 256', 'n_t = 256\ncolour = red'),
        EXAMPLE.replace('rho = 1', 'rho = one'),
        EXAMPLE.replace('rho = 1', 'rho = -1'),
        EXAMPLE.replace('n_t = 256', 'n = 7'),
        EXAMPLE.replace('paper_example', 'no_such_problem'),
        EXAMPLE.replace('builtin = paper_example', 'builtin = paper_example\nf = 1'),
        LINEAR.replace('1, 2', '2, 1'),
        CUSTOM.replace('sigma = -t\n', ''),
        CUSTOM.replace('a = 0.125', 'a = 0.3'),
        CUSTOM.replace('t*exp(u+2*v)', 't**2'),
        CUSTOM.replace('b = 0.25\n', ''),
        CUSTOM.replace('plot = no', 'plot = maybe'),
        '[problem\nbuiltin = x'
    ])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)


class TestPlot:
    """The SVG line plot."""

    def test_curve(self):
        svg = svg_curve([0, 1, 2], [1, 0, 1], 'a < b', 't', 'u')

        assert '<svg' in svg
        assert 'viewBox="0 0 800 600"' in svg
        assert '<path' in svg
        assert 'a &lt; b' in svg
        assert svg.rstrip().endswith('</svg>')

    def test_deterministic(self):
        assert svg_curve([0, 1, 2], [0, -1, 1]) == svg_curve([0, 1, 2], [0, -1, 1])

    def test_constant(self):
        assert '<path' in svg_curve([0, 1], [2, 2])

    def test_written(self, tmp_path):
        path = write_svg(tmp_path / 'curve.svg', [0, 1], [0, 1], 'line')

        assert path.read_text() == svg_curve([0, 1], [0, 1], 'line')

    @pytest.mark.parametrize('x, y', [([0, 1], [1]), ([0], [1]), ([0, 1], [0, float('nan')])])
    def test_invalid(self, x, y):
        with pytest.raises(ValueError):
            svg_curve(x, y)


class TestCommands:
    """check, solve, sweep and kernel through the click runner."""

    def test_check(self, tmp_path):
        out = tmp_path / 'out'
        result = CliRunner().invoke(cli, ['check', '--config', write(tmp_path, EXAMPLE), '--out', str(out)])

        assert result.exit_code == EXIT_OK, result.output
        assert 'pass' in result.output

        lines = (out / 'hypothesis.csv').read_text().splitlines()

        assert lines[0] == 'condition,status,witness'

        witness = {line.split(',')[0]: line.split(',')[2] for line in lines[1:]}

        assert float(witness['c']) >= 7.06e-7
        assert (out / 'report.txt').exists()

    def test_check_fails(self, tmp_path):
        text = CUSTOM.replace('t*exp(u+2*v)', '0').replace('b_kind = square', 'b_kind = zero')
        text = text.replace('b_weight = t^2\n', '') + '\n[run]\nrho = 1\n'

        result = CliRunner().invoke(cli, ['check', '--config', write(tmp_path, text), '--out', str(tmp_path / 'o')])

        assert result.exit_code == EXIT_HYPOTHESIS

    @pytest.mark.parametrize('f', ['u', 'sqrt(u)'])
    @pytest.mark.filterwarnings('ignore:check_all')
    def test_check_source_invalid_on_box(self, tmp_path, f):
        text = CUSTOM.replace('t*exp(u+2*v)', f) + '\n[run]\nrho = 1\n'
        out = tmp_path / 'o'

        result = CliRunner().invoke(cli, ['check', '--config', write(tmp_path, text), '--out', str(out)])

        assert result.exit_code == EXIT_HYPOTHESIS, result.output
        assert result.exception is None or isinstance(result.exception, SystemExit)
        assert 'a,fail,' in (out / 'hypothesis.csv').read_text()

    def test_solve(self, tmp_path):
        out = tmp_path / 'out'
        result = CliRunner().invoke(cli, ['solve', '--config', write(tmp_path, LINEAR), '--out', str(out)])

        assert result.exit_code == EXIT_OK, result.output

        rows = (out / 'branch.csv').read_text().splitlines()

        assert rows[0] == 'rho,lambda,residual,iterations,converged'
        assert float(rows[1].split(',')[1]) == pytest.approx(6.321, abs=1e-3)
        assert rows[1].endswith(',true')

        assert (out / 'solution.csv').read_text().startswith('t,u\n')
        assert '<svg' in (out / 'solution.svg').read_text()
        assert 'lambda' in (out / 'verification.txt').read_text()

    def test_solve_rho_override(self, tmp_path):
        out = tmp_path / 'out'
        result = CliRunner().invoke(
            cli, ['solve', '--config', write(tmp_path, LINEAR), '--rho', '2', '--out', str(out)]
        )

        assert result.exit_code == EXIT_OK, result.output
        assert float((out / 'branch.csv').read_text().splitlines()[1].split(',')[1]) == pytest.approx(
            2 * 512 / 81, rel=1e-6
        )

    def test_solve_is_reproducible(self, tmp_path):
        config = write(tmp_path, LINEAR)

        for name in ('first', 'second'):
            assert CliRunner().invoke(cli, ['solve', '--config', config, '--out', str(tmp_path / name)]).exit_code == 0

        for name in ('solution.csv', 'branch.csv', 'verification.txt'):
            assert (tmp_path / 'first' / name).read_bytes() == (tmp_path / 'second' / name).read_bytes()

    def test_sweep(self, tmp_path):
        out = tmp_path / 'out'
        result = CliRunner().invoke(cli, ['sweep', '--config', write(tmp_path, LINEAR), '--out', str(out)])

        assert result.exit_code == EXIT_OK, result.output
        assert len((out / 'branch.csv').read_text().splitlines()) == 3
        assert 'warm_start = true' in (out / 'sweep.txt').read_text()
        assert (out / 'branch.svg').exists()

    def test_parallel_sweep(self, tmp_path):
        out = tmp_path / 'out'
        result = CliRunner().invoke(
            cli, ['sweep', '--config', write(tmp_path, LINEAR), '--out', str(out), '--parallel']
        )

        assert result.exit_code == EXIT_OK, result.output
        assert 'parallel = true' in (out / 'sweep.txt').read_text()

    def test_sweep_needs_rho_list(self, tmp_path):
        result = CliRunner().invoke(cli, ['sweep', '--config', write(tmp_path, EXAMPLE), '--out', str(tmp_path / 'o')])

        assert result.exit_code == EXIT_CONFIG

        empty = LINEAR.replace('rho_list = 1, 2', 'rho_list =')
        result = CliRunner().invoke(cli, ['sweep', '--config', write(tmp_path, empty), '--out', str(tmp_path / 'o')])

        assert result.exit_code == EXIT_CONFIG

    def test_kernel(self, tmp_path):
        out = tmp_path / 'out'
        text = EXAMPLE + '\n[output]\nplot = false\n'
        text = text.replace('n_t = 256', 'n_t = 256\nkernel_n = 9')

        result = CliRunner().invoke(cli, ['kernel', '--config', write(tmp_path, text), '--out', str(out)])

        assert result.exit_code == EXIT_OK, result.output

        lines = (out / 'kernel.csv').read_text().splitlines()

        assert lines[0] == 't,s,k'
        assert len(lines) == 82

    def test_config_errors(self, tmp_path):
        missing = CliRunner().invoke(cli, ['check', '--config', str(tmp_path / 'nope.ini')])
        assert missing.exit_code == EXIT_CONFIG

        no_rho = CliRunner().invoke(
            cli, ['check', '--config', write(tmp_path, EXAMPLE.replace('rho = 1', '')), '--out', str(tmp_path / 'o')]
        )
        assert no_rho.exit_code == EXIT_CONFIG

        unknown = CliRunner().invoke(
            cli, ['check', '--config', write(tmp_path, EXAMPLE + '\n[extra]\nx = 1\n'), '--out', str(tmp_path / 'o')]
        )
        assert unknown.exit_code == EXIT_CONFIG
        assert 'config error' in unknown.output

    def test_version(self):
        result = CliRunner().invoke(cli, ['--version'])

        assert result.exit_code == 0
        assert 'thermobvp' in result.output
