# ternary_navigator/commands/common.py

import logging

import click

from agents.orchestrator import OrchestratorAgent
from config import REPORT_FORMATS, NavigatorSettings, load_settings

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2

# result 'error' category -> exit code
ERROR_EXIT_CODES = {
    'Invalid Input': EXIT_USAGE,
    'Bound Exceeded': EXIT_USAGE,
    'Out Of Contract': EXIT_USAGE,
    'Invariant Violation': EXIT_INVARIANT,
    'Internal Error': EXIT_INVARIANT,
}

FORM_CONTEXT = {'ignore_unknown_options': True}


def _set_verbose(ctx, param, value):
    if value:
        logging.getLogger().setLevel(logging.DEBUG)
        for handler in logging.getLogger().handlers:
            handler.setLevel(logging.DEBUG)
    return value


def common_options(func):
    """Options shared by every command."""
    decorators = [
        click.option('--json/--no-json', 'as_json', default=None, help='Emit JSON or a rendered report.'),
        click.option('--format', 'output_format', type=click.Choice(REPORT_FORMATS), default=None,
                     help='Report format; overrides TERNARY_REPORT_FORMAT.'),
        click.option('--bound', type=int, default=None, help='Largest discriminant the oracle may enumerate.'),
        click.option('--threads', type=int, default=None, help='Worker threads for enumeration.'),
        click.option('--force-oracle', is_flag=True, default=False, help='Enumerate the genus directly.'),
        click.option('--force-formula', is_flag=True, default=False,
                     help='Fail instead of falling back to the oracle.'),
        click.option('--seed', type=int, default=None, help='Accepted for compatibility; nothing is random.'),
        click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
                     help='key=value settings file.'),
        click.option('--verbose', is_flag=True, default=False, expose_value=False, is_eager=True,
                     callback=_set_verbose, help='Debug logging.'),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


def form_text(parts) -> str:
    """Joins the FORM arguments so '1 1 3 0 0 0' and a quoted JSON array both work."""
    return ' '.join(parts)


def build_settings(bound=None, threads=None, force_oracle=False, force_formula=False,
                   config_path=None, output_format=None) -> NavigatorSettings:
    try:
        settings = load_settings(config_path, max_disc=bound, threads=threads,
                                 force_oracle=True if force_oracle else None,
                                 force_formula=True if force_formula else None,
                                 report_format=output_format)
    except (FileNotFoundError, ValueError) as e:
        raise click.UsageError(str(e))
    if settings.force_oracle and settings.force_formula:
        raise click.UsageError("--force-oracle and --force-formula exclude each other.")
    return settings


def get_orchestrator(settings: NavigatorSettings) -> OrchestratorAgent:
    return OrchestratorAgent(settings)


def run_command(title: str, action, as_json=None, output_format=None, bound=None, threads=None,
                force_oracle=False, force_formula=False, seed=None, config_path=None, exit_code=None):
    """
    Builds the orchestrator, runs `action(orchestrator)`, prints the result and exits.

    `exit_code(result)` may override the exit status of a successful result.
    """
    if seed is not None:
        logger.debug(f"--seed {seed} ignored.")
    settings = build_settings(bound, threads, force_oracle, force_formula, config_path, output_format)
    orchestrator = get_orchestrator(settings)
    result = action(orchestrator)
    fmt = settings.report_format
    if output_format is None and as_json is not None:
        fmt = 'json' if as_json else (fmt if fmt != 'json' else 'markdown')
    rendered = orchestrator.reporter.generate_report(title, result, fmt)
    click.echo(rendered)
    if not result.get('success'):
        code = ERROR_EXIT_CODES.get(result.get('error'), EXIT_INVARIANT)
    else:
        code = exit_code(result) if exit_code else EXIT_OK
    if code:
        raise click.exceptions.Exit(code)
