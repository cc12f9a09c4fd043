"""
Spec-driven commands: build, evolve, transit, discriminate, thermal, verify, run
"""
from dataclasses import replace

import click

from nhqdyn.commands.common import echo_success, experiment_options, handles_errors, load_spec
from nhqdyn.errors import AuditFailed, ValidationError


def _files(paths):
    return [str(p) for p in paths]


@click.command()
@experiment_options
@click.pass_obj
@handles_errors
def build(runner, input_path, **overrides):
    """Build the system and write system.json plus audit.json"""
    spec = load_spec(runner, input_path, **overrides)
    built = runner.build(spec)
    paths = runner.write_system(spec, built)
    report, audit_paths = runner.audit(spec, built)
    echo_success({
        "metadata": built.system.metadata(),
        "audit_passed": report.all_passed,
        "files": _files(paths + audit_paths),
    })


@click.command()
@experiment_options
@click.pass_obj
@handles_errors
def evolve(runner, input_path, **overrides):
    """Norm traces of each scenario's initial state"""
    spec = load_spec(runner, input_path, **overrides)
    paths = runner.evolve(spec, runner.build(spec))
    echo_success({"files": _files(paths)})


@click.command()
@experiment_options
@click.pass_obj
@handles_errors
def transit(runner, input_path, **overrides):
    """Transition-probability traces per scenario"""
    spec = load_spec(runner, input_path, **overrides)
    paths = runner.transit(spec, runner.build(spec))
    echo_success({"files": _files(paths)})


@click.command()
@experiment_options
@click.option("--include-hdagger", is_flag=True, help="Add H-dagger traces to the report")
@click.pass_obj
@handles_errors
def discriminate(runner, input_path, include_hdagger, **overrides):
    """Which probability laws each scenario can tell apart"""
    spec = load_spec(runner, input_path, **overrides)
    if include_hdagger:
        spec = replace(spec, include_hdagger=True)
    report, paths = runner.discriminate(spec, runner.build(spec))
    echo_success({
        "verdicts": {r.scenario.name: r.verdict() for r in report.results},
        "warnings": list(report.warnings),
        "files": _files(paths),
    })


@click.command()
@experiment_options
@click.option("--beta", "betas", multiple=True, type=float, help="Inverse temperature (repeatable)")
@click.option("--time", "times", multiple=True, type=float, help="Real time for the KMS check (repeatable)")
@click.pass_obj
@handles_errors
def thermal(runner, input_path, betas, times, **overrides):
    """Partition functions and the KMS residual table"""
    if any(b <= 0 for b in betas):
        raise ValidationError("beta values must be positive", field="--beta")
    spec = load_spec(runner, input_path, **overrides)
    data, paths = runner.thermal(spec, runner.build(spec), betas or None, times or None)
    echo_success({
        "kms": data["kms"],
        "all_passed": data["all_passed"],
        "files": _files(paths),
    })


@click.command()
@experiment_options
@click.pass_obj
@handles_errors
def verify(runner, input_path, **overrides):
    """Full invariant suite; exits 1 when any check fails"""
    spec = load_spec(runner, input_path, **overrides)
    report, paths = runner.audit(spec, runner.build(spec))
    if not report.all_passed:
        failed = [c.name for c in report.failed()]
        raise AuditFailed(f"{len(failed)} check(s) failed", failed=failed)
    echo_success({"checks": len(report.checks), "files": _files(paths)})


@click.command()
@experiment_options
@click.pass_obj
@handles_errors
def run(runner, input_path, **overrides):
    """Execute every stage of a spec"""
    spec = load_spec(runner, input_path, **overrides)
    summary, _ = runner.run(spec)
    echo_success(summary)
