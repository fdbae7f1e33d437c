import functools
import logging

import click

from qreality.census import FORMATS, census_summary, emit_report, run_census
from qreality.cli import bp
from qreality.errors import InputError, QRealityError
from qreality.expr import parse_coevent
from qreality.filters import GenerationProblem, check, verify_witness
from qreality.io import dumps, load_json, measure_from_json, verdict_from_json, verdict_to_json
from qreality.logic import as_table, classify, eval_coevent, format_event, parse_event
from qreality.qintegral import Mode
from qreality.qmeasure import is_preclusive, is_regular

logger = logging.getLogger(__name__)

MODE_CHOICE = click.Choice([m.value for m in Mode])


def handle_errors(command):
    """Report qreality errors on stderr and exit with their code."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except QRealityError as e:
            click.echo(f'error: {e}', err=True)
            raise SystemExit(e.exit_code)
    return wrapper


def _load_measure(path, n=None):
    mu = measure_from_json(load_json(path))
    if n is not None and mu.n != n:
        raise click.UsageError(f'--n {n} does not match the measure on Omega_{mu.n}')
    return mu


@bp.command('eval')
@click.option('--n', 'n', type=int, default=None, help='Size of the sample space.')
@click.option('--coevent', required=True, help='Expression such as "w1 + w2*w3".')
@click.option('--event', required=True, help='Event such as "{1,2}".')
@handle_errors
def eval_command(n, coevent, event):
    """Evaluate a coevent on one event."""
    phi = parse_coevent(coevent, n)
    click.echo(eval_coevent(phi, parse_event(event, phi.n)))


@bp.command('classify')
@click.option('--n', 'n', type=int, default=None)
@click.option('--coevent', required=True)
@click.option('--measure', 'measure_path', type=click.Path(), default=None,
              help='Measure file; adds preclusivity and regularity.')
@handle_errors
def classify_command(n, coevent, measure_path):
    """Show a coevent's polynomial and class flags."""
    if n is None and measure_path:
        mu = _load_measure(measure_path)
        n = mu.n
    phi = parse_coevent(coevent, n)
    click.echo(f'polynomial: {phi}')
    click.echo(str(classify(phi)))
    if measure_path:
        mu = _load_measure(measure_path, phi.n)
        preclusive, witness = is_preclusive(phi, mu)
        line = f'preclusive={int(preclusive)}'
        if witness is not None:
            line += f' witness={format_event(witness)}'
        click.echo(line)
        report = is_regular(mu)
        click.echo(f'regular={int(report.regular)} r1={int(report.r1)} r2={int(report.r2)}')


@bp.command('check')
@click.option('--mode', type=MODE_CHOICE, required=True)
@click.option('--coevent', required=True)
@click.option('--n', 'n', type=int, default=None)
@click.option('--measure', 'measure_path', type=click.Path(), default=None)
@click.option('--existential', is_flag=True, help='Ask whether some measure works.')
@click.option('--out', type=click.Path(), default=None, help='Write the verdict JSON here.')
@click.option('--max-branches', type=int, default=None)
@click.pass_obj
@handle_errors
def check_command(config, mode, coevent, n, measure_path, existential, out, max_branches):
    """Decide whether a coevent passes a filter."""
    if bool(measure_path) == existential:
        raise click.UsageError('give exactly one of --measure and --existential')
    mu = _load_measure(measure_path, n) if measure_path else None
    phi = parse_coevent(coevent, mu.n if mu is not None else n)
    verdict = check(Mode(mode), phi, mu, max_branches=max_branches or config.MAX_BRANCHES)
    if out:
        with open(out, 'w') as f:
            f.write(dumps(verdict_to_json(verdict)))
    click.echo(verdict.summary())


@bp.command('census')
@click.option('--n', 'n', type=int, required=True)
@click.option('--modes', default='gen1',
              help='Comma-separated filters, or "classify" for class counts only.')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='json')
@click.option('--out', type=click.Path(), default=None)
@click.option('--jobs', type=int, default=None, help='Worker processes.')
@click.option('--max-branches', type=int, default=None)
@click.pass_obj
@handle_errors
def census_command(config, n, modes, fmt, out, jobs, max_branches):
    """Classify every coevent on Omega_n and run the requested filters."""
    if modes.strip() in ('', 'none', 'classify'):
        names = []
    else:
        names = [m.strip() for m in modes.split(',')]
    for name in names:
        if name not in MODE_CHOICE.choices:
            raise click.BadParameter(f'unknown mode {name!r}', param_hint='--modes')
    report = run_census(n, names, jobs=jobs or config.JOBS,
                        max_branches=max_branches or config.MAX_BRANCHES)
    if out:
        with open(out, 'wb') as f:
            f.write(emit_report(report, fmt))
    click.echo(census_summary(report))


@bp.command('verify')
@click.option('--verdict', 'verdict_path', type=click.Path(), required=True)
@click.option('--coevent', default=None, help='Defaults to the coevent in the verdict.')
@click.option('--measure', 'measure_path', type=click.Path(), default=None,
              help='Defaults to the measure in the verdict.')
@handle_errors
def verify_command(verdict_path, coevent, measure_path):
    """Re-check a verdict's witness with concrete integrals."""
    verdict = verdict_from_json(load_json(verdict_path))
    mu = _load_measure(measure_path, verdict.n) if measure_path else None
    if mu is None and not verdict.existential:
        if verdict.measure is None:
            raise InputError('a verdict for a fixed measure needs --measure or an embedded measure')
        mu = verdict.measure
    phi = parse_coevent(coevent or verdict.coevent, verdict.n)
    problem = GenerationProblem(verdict.mode, as_table(phi), mu)
    if verify_witness(verdict, problem):
        click.echo('OK')
    else:
        click.echo('FAIL')
        raise SystemExit(1)
