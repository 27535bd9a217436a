from pathlib import Path
from typing import Annotated, Optional

import typer

from ..costs import load_cost
from ..csvio import read_points, write_points, write_triplets
from ..enums import CostKind, SolveMethod
from ..errors import SpecError
from ..transport import (
    DiscreteMeasure,
    cost_matrix,
    cyclical_monotonicity,
    displacement,
    dual_potentials,
    extract_map,
    solve_exact,
    solve_sinkhorn,
)
from . import cli_config
from ._common import (
    JsonOpt,
    NoTimingOpt,
    OutOpt,
    ParamOpt,
    PotentialOpt,
    Run,
    SeedOpt,
    choice,
    handle_errors,
    parse_params,
)


@handle_errors
def ot_command(
    cost: Annotated[str, typer.Option("--cost", help="Cost kind.")] = CostKind.PSI_COST.value,
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    alpha: Annotated[Optional[float], typer.Option("--alpha")] = None,
    dim: Annotated[Optional[int], typer.Option("--dim")] = None,
    expression: Annotated[Optional[str], typer.Option("--expression")] = None,
    mu: Annotated[Optional[Path], typer.Option("--mu", help="Source measure CSV.")] = None,
    nu: Annotated[Optional[Path], typer.Option("--nu", help="Target measure CSV.")] = None,
    method: Annotated[str, typer.Option("--method", help="exact or sinkhorn.")] = SolveMethod.EXACT.value,
    epsilon: Annotated[Optional[float], typer.Option("--epsilon")] = None,
    max_iters: Annotated[Optional[int], typer.Option("--max-iters")] = None,
    plan_out: Annotated[Optional[Path], typer.Option("--plan-out", help="Write plan triplets here.")] = None,
    allow_split: Annotated[
        bool, typer.Option("--allow-split", help="Do not exit 1 when the plan splits mass.")
    ] = False,
    seed: SeedOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """Optimal transport between two discrete measures.

    Exits 1 when the plan splits mass or its support is not cyclically monotone.
    """
    seed = cli_config.seed if seed is None else seed
    run = Run("ot", seed=seed, no_timing=no_timing)
    if mu is None or nu is None:
        raise SpecError("--mu and --nu are required")
    kind = choice(CostKind, cost, "--cost")
    if dim is None and kind in (CostKind.LOG_COST, CostKind.ECF_COST):
        dim = read_points(mu).shape[1] - 1
    spec = load_cost(kind, potential, parse_params(param), alpha, dim, expression)
    source, target = DiscreteMeasure.from_csv(mu), DiscreteMeasure.from_csv(nu)
    C = cost_matrix(spec, source.points, target.points)

    solver = choice(SolveMethod, method, "--method")
    if solver is SolveMethod.EXACT:
        plan = solve_exact(source, target, C)
    else:
        plan = solve_sinkhorn(
            source,
            target,
            C,
            cli_config.sinkhorn_epsilon if epsilon is None else epsilon,
            cli_config.sinkhorn_max_iters if max_iters is None else max_iters,
            tol=cli_config.sinkhorn_tol,
        )
    tmap = extract_map(plan, cli_config.map_tol)
    monotone = cyclical_monotonicity(plan, C, seed=seed)
    run.inputs(cost=spec.label, mu=source.points, mu_masses=source.masses,
               nu=target.points, nu_masses=target.masses, method=solver)
    findings = [
        name
        for name, found in (
            ("split-mass", not tmap.deterministic),
            ("not-monotone", not monotone.holds),
        )
        if found
    ]
    run.outputs(
        cost=plan.cost,
        iterations=plan.iterations,
        marginal_violation=plan.marginal_violation,
        plan=plan.triplets(),
        map=tmap,
        cyclical_monotonicity=monotone,
        findings=findings,
    )
    if solver is SolveMethod.EXACT:
        run.outputs(potentials=dual_potentials(C, plan))
    if plan_out is not None:
        write_triplets(plan_out, plan.triplets())
    run.emit(as_json, out)
    if not monotone.holds or not (tmap.deterministic or allow_split):
        raise typer.Exit(code=1)


@handle_errors
def displace_command(
    sources: Annotated[Optional[Path], typer.Option("--sources", help="CSV of source atoms.")] = None,
    images: Annotated[Optional[Path], typer.Option("--images", help="CSV of their images.")] = None,
    t: Annotated[float, typer.Option("--t", help="Interpolation parameter in [0, 1].")] = 0.5,
    flip_t: Annotated[bool, typer.Option("--flip-t", help="Use 1 - t.")] = False,
    points_out: Annotated[Optional[Path], typer.Option("--points-out")] = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """Displacement interpolation t * Id + (1 - t) * T."""
    run = Run("displace", no_timing=no_timing)
    if sources is None or images is None:
        raise SpecError("--sources and --images are required")
    src, img = read_points(sources), read_points(images)
    moved = displacement(src, img, t, flip_t=flip_t)
    if points_out is not None:
        write_points(points_out, moved)
    run.inputs(sources=src, images=img, t=t, flip_t=flip_t)
    run.outputs(points=moved)
    run.emit(as_json, out)
