# ternary_navigator/commands/fiber.py

import click

from .common import FORM_CONTEXT, common_options, form_text, run_command


@click.command('fiber', context_settings=FORM_CONTEXT)
@click.option('-m', '--modulus', 'modulus', type=int, required=True,
              help='Watson modulus: an odd prime, 2 or 4.')
@click.argument('form', nargs=-1, required=True, type=click.UNPROCESSED)
@common_options
def fiber_cmd(modulus, form, **options):
    """The fiber of the genus of FORM over Lambda_m(FORM), explicit and by the tables."""
    if modulus < 2:
        raise click.BadParameter("must be at least 2", param_hint='--modulus')
    text = form_text(form)
    run_command("Fiber", lambda orchestrator: orchestrator.run_fiber(text, modulus), **options)
