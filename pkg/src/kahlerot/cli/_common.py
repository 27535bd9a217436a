"""Option parsing, error mapping and report output shared by all commands."""

import functools
import time
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Callable, Optional, TypeVar

import click
import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from ..errors import KahlerOTError, SpecError
from ..report import Provenance, Report, jsonable
from . import cli_config

console = Console()

E = TypeVar("E", bound=Enum)

JsonOpt = Annotated[bool, typer.Option("--json", "-j", help="Print the JSON report.")]
OutOpt = Annotated[Optional[Path], typer.Option("--out", "-o", help="Also write the JSON report here.")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="Seed for sampling.")]
TolOpt = Annotated[Optional[float], typer.Option("--tol", help="Verdict tolerance.")]
MarginOpt = Annotated[Optional[float], typer.Option("--margin", help="Required domain margin.")]
NoTimingOpt = Annotated[bool, typer.Option("--no-timing", help="Leave timing out of the report.")]
PotentialOpt = Annotated[
    Optional[str], typer.Option("--potential", "-p", help="catalog:<name> or expr:<text>.")
]
ParamOpt = Annotated[
    Optional[list[str]], typer.Option("--param", help="Catalog parameter as name=value.")
]


def parse_vector(text: str | None, name: str) -> np.ndarray | None:
    if text is None:
        return None
    try:
        return np.array([float(part) for part in text.split(",") if part.strip()])
    except ValueError as exc:
        raise SpecError(f"--{name} must be comma-separated numbers, got {text!r}") from exc


def parse_params(items: list[str] | None) -> dict[str, float]:
    params: dict[str, float] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise SpecError(f"--param expects name=value, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise SpecError(f"--param {key} needs a number, got {value!r}") from exc
    return params


def parse_region(text: str) -> list[tuple[float, float]]:
    """``box:lo1,lo2:hi1,hi2`` as per-coordinate (lower, upper) pairs."""
    kind, _, rest = text.partition(":")
    lower_text, _, upper_text = rest.partition(":")
    if kind != "box" or not lower_text or not upper_text:
        raise SpecError(f"region must look like box:lo1,lo2:hi1,hi2, got {text!r}")
    lower = parse_vector(lower_text, "region")
    upper = parse_vector(upper_text, "region")
    if lower.shape != upper.shape:
        raise SpecError("region corners have different dimensions")
    return list(zip(lower.tolist(), upper.tolist()))


def handle_errors(fn: Callable[..., Any]) -> Callable[..., Any]:
    """Turn library failures into their documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except KahlerOTError as exc:
            typer.secho(f"Error: {exc}", fg=typer.colors.RED, err=True)
            raise typer.Exit(code=exc.exit_code)

    return wrapper


def _echo() -> list[str]:
    """The invoked options, normalised and sorted, without output-only flags."""
    ctx = click.get_current_context(silent=True)
    if ctx is None:
        return []
    echo = []
    for key, value in sorted(ctx.params.items()):
        if key in {"as_json", "out", "no_timing"} or value is None or value is False:
            continue
        if isinstance(value, (list, tuple)) and not value:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            echo.append(flag)
        elif isinstance(value, (list, tuple)):
            echo.extend(f"{flag}={item}" for item in value)
        else:
            echo.append(f"{flag}={value}")
    return echo


class Run:
    """Collects inputs and outputs of one command and emits the report."""

    def __init__(self, name: str, seed: int | None = None, no_timing: bool = False) -> None:
        self.report = Report(
            command=[name, *_echo()],
            provenance=Provenance(seed=seed, tolerances=cli_config.tolerances()),
        )
        self.no_timing = no_timing
        self.started = time.perf_counter()

    def inputs(self, **values: Any) -> None:
        self.report.inputs.update(jsonable(values))

    def outputs(self, **values: Any) -> None:
        self.report.outputs.update(jsonable(values))

    def emit(self, as_json: bool, out: Path | None) -> Report:
        if not self.no_timing:
            self.report.timing_ms = round((time.perf_counter() - self.started) * 1000.0, 3)
        text = self.report.model_dump_json(indent=2)
        if out is not None:
            self.report.write(out)
        if as_json:
            typer.echo(text)
        else:
            render(self.report)
        return self.report


def _summary(value: Any) -> str:
    if isinstance(value, dict) and set(value) == {"shape", "data"}:
        shape = "x".join(str(s) for s in value["shape"]) or "scalar"
        return f"tensor[{shape}]"
    if isinstance(value, list) and len(value) > 8:
        return f"list of {len(value)}"
    return str(value)


def render(report: Report) -> None:
    table = Table(title=report.command[0], show_header=True, header_style="bold")
    table.add_column("output")
    table.add_column("value", overflow="fold")
    for key, value in report.outputs.items():
        table.add_row(key, _summary(value))
    console.print(table)


def choice(enum_cls: type[E], value: str, flag: str) -> E:
    try:
        return enum_cls(value)
    except ValueError as exc:
        allowed = ", ".join(member.value for member in enum_cls)
        raise SpecError(f"{flag} must be one of {allowed}, got {value!r}") from exc
