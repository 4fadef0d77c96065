# ternary_navigator/commands/genus.py

import click

from .common import FORM_CONTEXT, common_options, form_text, run_command


@click.command('genus', context_settings=FORM_CONTEXT)
@click.argument('form', nargs=-1, required=True, type=click.UNPROCESSED)
@common_options
def genus_cmd(form, **options):
    """Every class in the genus of FORM, by direct enumeration."""
    text = form_text(form)
    run_command("Genus census", lambda orchestrator: orchestrator.run_genus(text), **options)
