"""
Shared options, override parsing and the error envelope for CLI commands
"""
import functools

import click

from nhqdyn.dynamics import GeneratorKind
from nhqdyn.errors import NhqdynError, ValidationError
from nhqdyn.output import error_from_exception, success_response, to_json
from nhqdyn.spec import parse_laws, with_overrides


def error_response(exc):
    """Write the error envelope to stderr and exit with the error's code"""
    click.echo(to_json(error_from_exception(exc)), err=True)
    click.get_current_context().exit(exc.exit_code)


def handles_errors(f):
    """Turn NhqdynError into the JSON envelope plus exit code"""
    @functools.wraps(f)
    def decorated(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except NhqdynError as e:
            error_response(e)
    return decorated


def echo_success(data):
    click.echo(to_json(success_response(data)))


def parse_tol_pairs(values):
    """
    Parse repeated --tol key=value options

    Returns:
        Dict of tolerance overrides
    """
    overrides = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValidationError(f"Expected key=value, got '{item}'", field="--tol")
        key = key.strip()
        if key == "ill_conditioned_action":
            overrides[key] = value.strip()
            continue
        try:
            overrides[key] = float(value)
        except ValueError:
            raise ValidationError(f"Tolerance '{key}' must be numeric", field=f"--tol {key}")
    return overrides


def input_option(f):
    return click.option("--input", "input_path", required=True,
                        type=click.Path(exists=True, dir_okay=False),
                        help="Experiment spec (JSON)")(f)


def experiment_options(f):
    """--out-dir, --grid, --laws, --generator, --tol and --seed"""
    options = [
        click.option("--out-dir", default=None, help="Directory for output files"),
        click.option("--grid", default=None, help="start:stop:steps applied to every scenario"),
        click.option("--laws", default=None, help="Comma-separated subset of standard,psi,phi"),
        click.option("--generator", default=None,
                     type=click.Choice([g.value for g in GeneratorKind]),
                     help="Evolution generator applied to every scenario"),
        click.option("--tol", "tol_pairs", multiple=True, help="Tolerance override key=value"),
        click.option("--seed", default=None, type=int, help="Seed for random audit vectors"),
    ]
    for option in reversed(options):
        f = option(f)
    return input_option(f)


def load_spec(runner, input_path, out_dir=None, grid=None, laws=None, generator=None,
              tol_pairs=(), seed=None):
    """Parse the spec file and apply command-line overrides"""
    spec = runner.load(input_path)
    return with_overrides(
        spec,
        grid=grid,
        laws=parse_laws(laws.split(","), "--laws") if laws else None,
        generator=GeneratorKind(generator) if generator else None,
        tolerances=parse_tol_pairs(tol_pairs),
        seed=seed,
        out_dir=out_dir,
    )
