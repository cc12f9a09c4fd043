"""
Model shorthand commands
"""
import click

from nhqdyn.biortho import NormalizationPolicy
from nhqdyn.commands.common import echo_success, handles_errors, parse_tol_pairs
from nhqdyn.errors import AuditFailed
from nhqdyn.spec import sds_spec, with_overrides


@click.command()
@click.option("--g", "g", required=True, type=float, help="Coupling g (nonzero)")
@click.option("--k", "k", required=True, type=float, help="Asymmetry k in (-1, 1)")
@click.option("--policy", default=NormalizationPolicy.SDS.value,
              type=click.Choice([p.value for p in NormalizationPolicy]),
              help="Eigenvector normalization")
@click.option("--verify", "run_audit", is_flag=True, help="Run the full invariant suite")
@click.option("--out-dir", default=None, help="Directory for output files")
@click.option("--tol", "tol_pairs", multiple=True, help="Tolerance override key=value")
@click.option("--seed", default=None, type=int, help="Seed for random audit vectors")
@click.pass_obj
@handles_errors
def sds(runner, g, k, policy, run_audit, out_dir, tol_pairs, seed):
    """Build the two-level SDS model and report its derived quantities"""
    spec = with_overrides(sds_spec(g, k, NormalizationPolicy(policy)),
                          tolerances=parse_tol_pairs(tol_pairs), seed=seed, out_dir=out_dir)
    built = runner.build(spec)
    paths = runner.write_system(spec, built)
    data = {"sds": built.sds.to_dict(), "metadata": built.system.metadata()}

    if run_audit:
        report, audit_paths = runner.audit(spec, built)
        paths += audit_paths
        if not report.all_passed:
            failed = [c.name for c in report.failed()]
            raise AuditFailed(f"{len(failed)} check(s) failed", failed=failed)
        data["audit_passed"] = True

    data["files"] = [str(p) for p in paths]
    echo_success(data)
