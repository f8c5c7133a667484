"""Command-line interface for bernstein-lab."""

import logging
import sys
from typing import Any, Dict, Optional, Sequence

import click

from . import __version__
from .errors import BernsteinLabError, InputError
from .fileio import parse_points
from .harness import PROJECT_MODES, ExperimentConfig, emit, run
from .report import FORMATS, Report
from .settings import log_level
from .suite import LEVELS


def common_options(func):
    """Flags shared by every computation."""
    options = [
        click.option('--alpha', type=float, default=0.0, show_default=True,
                     help='Lattice offset in [0, 1)'),
        click.option('--kappa', type=float, default=None,
                     help='Band width (default: pi, or pi/2 for hankel and rochberg)'),
        click.option('--N', 'N', type=int, default=None,
                     help='Window size (default: chosen per command)'),
        click.option('--tol', type=float, default=None,
                     help='Relative quadrature tolerance (default: from the profile)'),
        click.option('--out', '-o', type=click.Path(dir_okay=False), default=None,
                     help='Report file (default: JSON on standard output)'),
        click.option('--format', 'fmt', type=click.Choice(FORMATS), default='json', show_default=True,
                     help='Report format'),
        click.option('--profile', type=click.Choice(LEVELS), default='fast', show_default=True,
                     help='Tolerance and window profile'),
        click.option('--timing', is_flag=True, default=False,
                     help='Include wall-clock seconds in the report'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _execute(
    command: str,
    common: Dict[str, Any],
    inputs: Optional[Dict[str, Optional[str]]] = None,
    points: Sequence[str] = (),
    options: Optional[Dict[str, Any]] = None,
) -> Report:
    """Build the config, run it and emit the report; exits non-zero on failure."""
    try:
        if common['out'] is None and common['fmt'] != 'json':
            raise InputError(f"--format {common['fmt']} needs --out")
        config = ExperimentConfig(
            command,
            inputs={name: path for name, path in (inputs or {}).items() if path},
            alpha=common['alpha'],
            kappa=common['kappa'],
            N=common['N'],
            tol=common['tol'],
            points=parse_points(points),
            options={k: v for k, v in (options or {}).items() if v is not None},
            out=common['out'],
            format=common['fmt'],
            profile=common['profile'],
            timing=common['timing'],
        )
        report = run(config)
        if config.out is None:
            click.echo(report.to_json(config.timing), nl=False)
        else:
            paths = emit(report, config)
            click.echo(f"✅ {command} report written: {', '.join(str(p) for p in paths)}")
        return report
    except BernsteinLabError as e:
        click.echo(f"❌ Error: {e}", err=True)
        sys.exit(e.exit_code)
    except Exception as e:
        click.echo(f"❌ Error: {e}", err=True)
        sys.exit(1)


def _floats(values: Sequence[str]) -> Optional[list]:
    """Repeated or comma-separated numbers; None when absent."""
    out = []
    for raw in values:
        for token in raw.split(','):
            if token.strip():
                try:
                    out.append(float(token))
                except ValueError:
                    raise click.BadParameter(f"not a number: {token!r}")
    return out or None


@click.group()
@click.version_option(__version__, prog_name='bernstein-lab')
def main():
    """
    Numerical experiments on duality in Bernstein spaces.

    Every command prints a JSON report unless --out is given.
    """
    logging.basicConfig(level=log_level(), format='%(levelname)s %(name)s: %(message)s')


@main.command()
@click.option('--samples', type=click.Path(), required=True, help='Samples CSV (n,re,im) with optional JSON sidecar')
@click.option('--z', 'points', multiple=True, help='Evaluation point, e.g. 0.3 or 1.7+0.5j (repeatable)')
@click.option('--growth', multiple=True, help='Imaginary-axis heights for growth ratios (repeatable)')
@common_options
def interp(samples, points, growth, **common):
    """Evaluate a sampled function by its cardinal series."""
    _execute('interp', common, {'samples': samples}, points, {'growth': _floats(growth)})


@main.command()
@click.option('--grid', type=click.Path(), required=True, help='Grid CSV (x,re,im) with h/T/tail sidecar')
@click.option('--mode', type=click.Choice(PROJECT_MODES), default='l2', show_default=True,
              help='l2 band-limiting, linf representative, or half-line projection plus/minus')
@click.option('--z', 'points', multiple=True, help='Evaluation points for --mode linf')
@click.option('--R', 'R', type=float, default=None, help='Inner radius for --mode linf (default: from the points)')
@common_options
def project(grid, mode, points, R, **common):
    """Project a tabulated symbol onto functions of exponential type or a half-line spectrum."""
    _execute('project', common, {'grid': grid}, points, {'mode': mode, 'R': R})


@main.command()
@click.option('--grid', type=click.Path(), default=None, help='Grid CSV: BMO norm on the line')
@click.option('--samples', type=click.Path(), default=None, help='Samples CSV: norm in BMO(exp(-i pi z))')
@click.option('--h', 'step', type=float, default=None, help='Grid step for --samples (default: from the profile)')
@common_options
def bmo(grid, samples, step, **common):
    """BMO norm of a grid function or of a sampled function of type pi."""
    _execute('bmo', common, {'grid': grid, 'samples': samples}, options={'h': step})


@main.command()
@click.option('--seq', type=click.Path(), required=True, help='Sequence CSV (n,re,im)')
@common_options
def bmoz(seq, **common):
    """BMO norm of a sequence on the integers."""
    _execute('bmoz', common, {'seq': seq})


@main.command()
@click.option('--seq', type=click.Path(), required=True, help='Sequence CSV (n,re,im)')
@common_options
def dhilbert(seq, **common):
    """Shifted discrete Hilbert transform and H^1(Z) norm (--N sets the output window)."""
    _execute('dhilbert', common, {'seq': seq})


@main.command()
@click.option('--seq', type=click.Path(), required=True, help='Sequence CSV (n,re,im)')
@click.option('--z', 'points', multiple=True, required=True, help='Evaluation point (repeatable)')
@common_options
def talpha(seq, points, **common):
    """Evaluate the synthesis map T_alpha of a sequence."""
    _execute('talpha', common, {'seq': seq}, points)


@main.command()
@click.option('--h', 'h_path', type=click.Path(), required=True, help='Samples CSV of the B^1 factor')
@click.option('--f', 'f_path', type=click.Path(), required=True, help='Samples CSV of the X_alpha factor')
@common_options
def pairing(h_path, f_path, **common):
    """Discrete duality pairing on the lattice Z + alpha."""
    _execute('pairing', common, {'h': h_path, 'f': f_path})


@main.command()
@click.option('--f', 'f_path', type=click.Path(), required=True, help='Samples CSV (kappa = pi)')
@common_options
def clark(f_path, **common):
    """BMO norm against the Clark measure next to the X_alpha norm."""
    _execute('clark', common, {'f': f_path})


@main.command()
@click.option('--symbol', type=click.Path(), required=True, help='Symbol JSON (trig terms or grid reference)')
@click.option('--profile-N', 'profile_N', multiple=True, type=int,
              help='Windows for a compactness profile (repeatable)')
@click.option('--compactness', is_flag=True, help='Add the compactness profile over the profile windows')
@click.option('--matrix-out', type=click.Path(dir_okay=False), default=None, help='Write the matrix as j,k,re,im CSV')
@common_options
def hankel(symbol, profile_N, compactness, matrix_out, **common):
    """Truncated Hankel matrix of a symbol: norms and singular values."""
    options = {
        'profile': bool(compactness or profile_N) or None,
        'profile_N': list(profile_N) or None,
        'matrix_out': matrix_out,
    }
    _execute('hankel', common, {'symbol': symbol}, options=options)


@main.command()
@click.option('--symbol', type=click.Path(), required=True, help='Symbol JSON')
@click.option('--h', 'step', type=float, default=None, help='Grid step for the BMO estimates')
@common_options
def rochberg(symbol, step, **common):
    """Three-piece norm estimate of a band-reduced symbol next to the operator norm."""
    _execute('rochberg', common, {'symbol': symbol}, options={'h': step})


@main.command()
@click.option('--grid', type=click.Path(), required=True, help='Grid CSV')
@click.option('--delta', 'deltas', multiple=True, help='Scale for the oscillation profile (repeatable)')
@common_options
def vmo(grid, deltas, **common):
    """Small-scale oscillation profile of a grid function."""
    _execute('vmo', common, {'grid': grid}, options={'deltas': _floats(deltas)})


@main.command()
@click.option('--atom', type=click.Path(), required=True, help='Atom CSV listing every support point')
@common_options
def atoms(atom, **common):
    """Validate an H^1(Z) atom and map it to B^1."""
    _execute('atoms', common, {'atom': atom})


@main.command()
@click.option('--level', type=click.Choice(LEVELS), default='fast', show_default=True, help='Suite level')
@click.option('--only', multiple=True, help='Criterion id to run, e.g. C01 (repeatable)')
@common_options
def suite(level, only, **common):
    """Run the acceptance suite; exits 1 when a criterion fails."""
    report = _execute('suite', common, options={'level': level, 'only': list(only) or None})
    failed = [name for name, flag in report.flags.items() if flag == 'failed']
    if failed:
        click.echo(f"❌ Failed criteria: {', '.join(sorted(failed))}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
