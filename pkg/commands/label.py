# ternary_navigator/commands/label.py

import click

from .common import FORM_CONTEXT, common_options, form_text, run_command


@click.command('label', context_settings=FORM_CONTEXT)
@click.argument('form', nargs=-1, required=True, type=click.UNPROCESSED)
@common_options
def label_cmd(form, **options):
    """Isometry group order, symmetries and label of FORM."""
    text = form_text(form)
    run_command("Label", lambda orchestrator: orchestrator.run_label(text), **options)
