# ternary_navigator/commands/verify.py

import logging

import click

from config import SUITES

from .common import EXIT_INVARIANT, EXIT_OK, common_options, run_command

logger = logging.getLogger(__name__)


@click.command('verify')
@click.argument('suites', nargs=-1, type=click.Choice(SUITES + ('all',)))
@common_options
def verify_cmd(suites, **options):
    """Runs acceptance SUITES (default: TERNARY_VERIFY_SUITES, or all); exits 2 when a check fails."""
    if 'all' in suites:
        chosen = list(SUITES)
    else:
        chosen = list(suites) or None
    logger.info(f"verify requested for {chosen or 'configured suites'}")

    def exit_code(result: dict) -> int:
        return EXIT_OK if result.get('passed') else EXIT_INVARIANT

    run_command("Verification", lambda orchestrator: orchestrator.run_verify(chosen), exit_code=exit_code, **options)
