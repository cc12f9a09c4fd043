"""
Command-line group; subcommands are registered like blueprints
"""
import click

from nhqdyn import create_runner
from nhqdyn.commands.experiment import build, discriminate, evolve, run, thermal, transit, verify
from nhqdyn.commands.models import sds


@click.group()
@click.option("--env", default=None, help="Configuration name (development, production, testing)")
@click.pass_context
def cli(ctx, env):
    """Non-Hermitian Hamiltonian dynamics experiments"""
    ctx.obj = create_runner(env)


for command in (build, evolve, transit, discriminate, thermal, sds, verify, run):
    cli.add_command(command)
