"""Main CLI entry point for sumdiff."""

import click

from sumdiff import __version__
from sumdiff.commands.handlers import get_command_handler
from sumdiff.formatter import setup_logging

config_option = click.option('--config', 'config_path', required=True, type=click.Path(),
                             help='Configuration JSON (points and slopes)')
measure_option = click.option('--measure', 'measure_path', type=click.Path(),
                              help='Measure JSON (defaults to uniform)')
out_option = click.option('--out', 'out_path', type=click.Path(), help='Write output here instead of stdout')
seed_option = click.option('--seed', type=int, default=None, help='Random seed (default 0)')
starts_option = click.option('--starts', type=int, default=None, help='Number of optimizer starts')
workers_option = click.option('--workers', type=int, default=None, help='Concurrent workers')


@click.group()
@click.version_option(__version__)
@click.option('--verbose', '-v', is_flag=True, help='Debug logging on stderr')
def main(verbose):
    """sumdiff - counterexamples to sums-differences statements.

    Runs are reproducible: --seed defaults to 0.
    """
    setup_logging(verbose)


@main.command()
@config_option
@measure_option
@out_option
@click.pass_context
def verify(ctx, config_path, measure_path, out_path):
    """Print the entropy profile and ratio of a measure."""
    ctx.exit(get_command_handler().cmd_verify(config_path, measure_path, out_path))


@main.command()
@click.option('--no-opt', is_flag=True, help='Evaluate the printed measures only')
@click.option('--tol', type=float, default=None, help='Slack below each threshold (default 5e-5)')
@seed_option
@starts_option
@click.pass_context
def paper(ctx, no_opt, tol, seed, starts):
    """Reproduce the published constructions and check their thresholds."""
    ctx.exit(get_command_handler().cmd_paper(not no_opt, tol, seed, starts))


@main.command()
@config_option
@click.option('--ansatz', 'ansatz_path', type=click.Path(), help='Symmetry ansatz JSON')
@click.option('--options', 'options_path', type=click.Path(), help='Optimizer options JSON')
@seed_option
@starts_option
@workers_option
@out_option
@click.pass_context
def optimize(ctx, config_path, ansatz_path, options_path, seed, starts, workers, out_path):
    """Maximize the entropy ratio over measures on a configuration."""
    ctx.exit(get_command_handler().cmd_optimize(
        config_path, ansatz_path, options_path, seed, starts, workers, out_path))


@main.command()
@config_option
@measure_option
@click.option('--M', 'M_text', required=True, help='Comma-separated denominators, e.g. 3,30,300')
@out_option
@click.pass_context
def blowup(ctx, config_path, measure_path, M_text, out_path):
    """Print the multinomial blow-up sweep as CSV."""
    ctx.exit(get_command_handler().cmd_blowup(config_path, measure_path, M_text, out_path))


@main.command()
@click.argument('spec_path', type=click.Path())
@click.option('--budget', type=int, default=None, help='Maximum number of enumerated subsets')
@seed_option
@starts_option
@workers_option
@out_option
@click.pass_context
def search(ctx, spec_path, budget, seed, starts, workers, out_path):
    """Enumerate grid configurations and rank them by optimized ratio."""
    ctx.exit(get_command_handler().cmd_search(spec_path, budget, seed, starts, workers, out_path))


@main.command()
@seed_option
@starts_option
@click.pass_context
def remark(ctx, seed, starts):
    """Compare the 9-point staircase against the 7-point one."""
    ctx.exit(get_command_handler().cmd_remark(seed, starts))


if __name__ == '__main__':
    main()
