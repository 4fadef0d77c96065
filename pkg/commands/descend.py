# ternary_navigator/commands/descend.py

import click

from .common import FORM_CONTEXT, common_options, form_text, run_command


@click.command('descend', context_settings=FORM_CONTEXT)
@click.argument('form', nargs=-1, required=True, type=click.UNPROCESSED)
@common_options
def descend_cmd(form, **options):
    """Watson descent chain from FORM to a stable lattice."""
    text = form_text(form)
    run_command("Descent chain", lambda orchestrator: orchestrator.run_descend(text), **options)
