from pathlib import Path
from typing import Annotated, Optional

import numpy as np
import typer

from ..cgeometry import c_exp, c_momentum, c_segment_path, check_c_convexity
from ..csvio import read_points
from ..enums import ConvexityMode, SetKind
from ..errors import SpecError
from . import cli_config
from ._common import (
    JsonOpt,
    MarginOpt,
    NoTimingOpt,
    OutOpt,
    ParamOpt,
    PotentialOpt,
    Run,
    TolOpt,
    choice,
    handle_errors,
    parse_vector,
)
from .geometry_cli import resolve_potential

XOpt = Annotated[Optional[str], typer.Option("--x", help="Base point, comma-separated.")]


def _required(text: str | None, flag: str) -> np.ndarray:
    value = parse_vector(text, flag)
    if value is None:
        raise SpecError(f"--{flag} is required")
    return value


@handle_errors
def cexp_command(
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    x: XOpt = None,
    p: Annotated[Optional[str], typer.Option("--momentum", help="Covector at x.")] = None,
    margin: MarginOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """The point reached from x by the c-exponential of a momentum."""
    run = Run("cexp", no_timing=no_timing)
    spec = resolve_potential(potential, param, margin)
    x_v, p_v = _required(x, "x"), _required(p, "momentum")
    y = c_exp(spec, x_v, p_v)
    residual = float(np.max(np.abs(c_momentum(spec, x_v, y) - p_v)))
    run.inputs(potential=spec.label, x=x_v, momentum=p_v)
    run.outputs(y=y, residual=residual)
    run.emit(as_json, out)


@handle_errors
def csegment_command(
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    x: XOpt = None,
    y0: Annotated[Optional[str], typer.Option("--y0")] = None,
    y1: Annotated[Optional[str], typer.Option("--y1")] = None,
    t: Annotated[str, typer.Option("--t", help="Parameters in [0, 1], comma-separated.")] = "0,0.25,0.5,0.75,1",
    margin: MarginOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """Points along the c-segment from y0 to y1 seen from x."""
    run = Run("csegment", no_timing=no_timing)
    spec = resolve_potential(potential, param, margin)
    x_v, y0_v, y1_v = _required(x, "x"), _required(y0, "y0"), _required(y1, "y1")
    ts = _required(t, "t").tolist()
    points = c_segment_path(spec, x_v, y0_v, y1_v, ts)
    momenta = np.array([c_momentum(spec, x_v, pt) for pt in points])
    run.inputs(potential=spec.label, x=x_v, y0=y0_v, y1=y1_v, t=ts)
    run.outputs(points=points, momenta=momenta)
    run.emit(as_json, out)


@handle_errors
def cconvex_command(
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    xs: Annotated[Optional[Path], typer.Option("--xs", help="CSV of X points.")] = None,
    ys: Annotated[Optional[Path], typer.Option("--ys", help="CSV of Y points.")] = None,
    mode: Annotated[str, typer.Option("--mode")] = ConvexityMode.Y_RELATIVE_TO_X.value,
    kind: Annotated[str, typer.Option("--kind", help="polytope or points.")] = SetKind.POLYTOPE.value,
    resolution: Annotated[Optional[int], typer.Option("--resolution")] = None,
    tol: TolOpt = None,
    margin: MarginOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """Relative c-convexity of two point sets; exit 1 when it fails."""
    run = Run("cconvex", no_timing=no_timing)
    spec = resolve_potential(potential, param, margin)
    if xs is None or ys is None:
        raise SpecError("--xs and --ys are required")
    X, Y = read_points(xs), read_points(ys)
    report = check_c_convexity(
        spec,
        X,
        Y,
        resolution=cli_config.convexity_resolution if resolution is None else resolution,
        mode=choice(ConvexityMode, mode, "--mode"),
        kind=choice(SetKind, kind, "--kind"),
        tol=cli_config.convexity_tol if tol is None else tol,
    )
    run.inputs(potential=spec.label, X=X, Y=Y)
    run.outputs(convexity=report)
    run.emit(as_json, out)
    if not report.holds:
        raise typer.Exit(code=1)
