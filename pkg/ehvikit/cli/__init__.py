import click

from ehvikit import create_context
from ehvikit.cli.front_commands import (
    decompose_command,
    ehvi_command,
    gen_front_command,
    hv_command,
    hvi_command,
    mc_validate_command,
    poi_command,
)
from ehvikit.cli.run_commands import bench_speed_command, mobgo_run_command


@click.group()
@click.option(
    "--config",
    "config_name",
    default=None,
    help="Configuration name; defaults to $EHVIKIT_CONFIG or 'default'.",
)
@click.pass_context
def cli(ctx, config_name):
    """Exact EHVI / PoI computation and multi-objective Bayesian optimization."""
    ctx.obj = create_context(config_name)


for command in (
    decompose_command,
    hv_command,
    hvi_command,
    ehvi_command,
    poi_command,
    mc_validate_command,
    gen_front_command,
    bench_speed_command,
    mobgo_run_command,
):
    cli.add_command(command)
