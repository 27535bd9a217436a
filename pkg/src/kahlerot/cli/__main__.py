from typing import Sequence

import click
import typer

from .cgeometry_cli import cconvex_command, cexp_command, csegment_command
from .geometry_cli import (
    catalog_command,
    certify_command,
    curvature_command,
    legendre_command,
    mtw_check_command,
)
from .transport_cli import displace_command, ot_command

main_cli = typer.Typer(
    name="kahlerot",
    no_args_is_help=True,
    help="Hessian and Kähler curvature, MTW checks and discrete optimal transport for Psi-costs.",
)
main_cli.command("catalog")(catalog_command)
main_cli.command("curvature")(curvature_command)
main_cli.command("mtw-check")(mtw_check_command)
main_cli.command("certify")(certify_command)
main_cli.command("legendre")(legendre_command)
main_cli.command("cexp")(cexp_command)
main_cli.command("csegment")(csegment_command)
main_cli.command("cconvex")(cconvex_command)
main_cli.command("ot")(ot_command)
main_cli.command("displace")(displace_command)


def run(argv: Sequence[str]) -> int:
    """Run one command in-process and return its exit code."""
    try:
        rv = main_cli(args=list(argv), standalone_mode=False, prog_name="kahlerot")
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    return rv if isinstance(rv, int) else 0


def main():
    main_cli()


if __name__ == "__main__":
    main()
