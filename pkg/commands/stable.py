# ternary_navigator/commands/stable.py

import click

from .common import FORM_CONTEXT, common_options, form_text, run_command


@click.command('stable', context_settings=FORM_CONTEXT)
@click.argument('form', nargs=-1, required=True, type=click.UNPROCESSED)
@common_options
def stable_cmd(form, **options):
    """Local data, special orbits, representation terms and census of a stable FORM."""
    text = form_text(form)
    run_command("Stable genus", lambda orchestrator: orchestrator.run_stable(text), **options)
