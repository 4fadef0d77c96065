# ternary_navigator/cli.py

import logging
import sys

import click

from config import load_environment

# --- Import Commands ---
from commands.classnum import classnum_cmd
from commands.common import EXIT_USAGE
from commands.descend import descend_cmd
from commands.fiber import fiber_cmd
from commands.genus import genus_cmd
from commands.label import label_cmd
from commands.stable import stable_cmd
from commands.verify import verify_cmd

# --- Configuration & Setup ---
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

load_environment()


class NavigatorGroup(click.Group):
    """Click group whose usage errors exit with status 1 instead of click's 2."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        if not standalone_mode:
            return super().main(args, prog_name, complete_var, standalone_mode, **extra)
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        sys.exit(rv if isinstance(rv, int) else 0)


@click.group(cls=NavigatorGroup)
def cli():
    """Class numbers and labels of positive definite ternary quadratic forms."""


# --- Register Commands ---
cli.add_command(classnum_cmd)
cli.add_command(genus_cmd)
cli.add_command(descend_cmd)
cli.add_command(label_cmd)
cli.add_command(fiber_cmd)
cli.add_command(stable_cmd)
cli.add_command(verify_cmd)


if __name__ == '__main__':
    cli()
