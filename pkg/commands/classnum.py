# ternary_navigator/commands/classnum.py

import logging

import click

from .common import FORM_CONTEXT, common_options, form_text, run_command

logger = logging.getLogger(__name__)


@click.command('classnum', context_settings=FORM_CONTEXT)
@click.argument('form', nargs=-1, required=True, type=click.UNPROCESSED)
@common_options
def classnum_cmd(form, **options):
    """Class number and label multiset of the genus of FORM."""
    text = form_text(form)
    logger.info(f"classnum requested for {text}")
    run_command("Class number", lambda orchestrator: orchestrator.run_classnum(text), **options)
