from typing import Annotated, Optional

import numpy as np
import typer

from ..certify import CertifyBudget, certify
from ..costs import load_cost, psi_cost
from ..enums import CertifyMode, CostKind, Verdict
from ..errors import OutOfDomainError, SpecError
from ..hessian import (
    biconjugation_gap,
    from_dual,
    legendre_value,
    metric_point,
    riemann_from,
    sectional_curvature,
    to_dual,
)
from ..kahler import (
    anti_bisectional,
    bisectional,
    holomorphic_sectional,
    kahler_from_metric,
)
from ..mtw import (
    d_alpha_curvature_comparison,
    mtw_curvature,
    mtw_direct,
    mtw_potential,
)
from ..potentials import CATALOG, PotentialSpec, format_spec, in_domain, load_potential
from ..report import tensor
from . import cli_config
from ._common import (
    JsonOpt,
    MarginOpt,
    NoTimingOpt,
    OutOpt,
    ParamOpt,
    PotentialOpt,
    Run,
    SeedOpt,
    TolOpt,
    choice,
    handle_errors,
    parse_params,
    parse_region,
    parse_vector,
)

XiOpt = Annotated[Optional[str], typer.Option("--xi", help="Vector, comma-separated.")]
EtaOpt = Annotated[Optional[str], typer.Option("--eta", help="Covector, comma-separated.")]
PointOpt = Annotated[Optional[str], typer.Option("--point", help="Base point, comma-separated.")]


def with_margin(spec: PotentialSpec, margin: float | None) -> PotentialSpec:
    margin = cli_config.domain_margin if margin is None else margin
    if margin == spec.domain.margin:
        return spec
    return spec.model_copy(update={"domain": spec.domain.model_copy(update={"margin": margin})})


def resolve_potential(
    potential: str | None, params: list[str] | None, margin: float | None
) -> PotentialSpec:
    if potential is None:
        raise SpecError("--potential is required")
    return with_margin(load_potential(potential, parse_params(params)), margin)


def require_point(spec: PotentialSpec, point: str | None) -> np.ndarray:
    values = parse_vector(point, "point")
    if values is None:
        raise SpecError("--point is required")
    check = in_domain(spec, values, pd_threshold=cli_config.pd_threshold)
    if not check.inside:
        raise OutOfDomainError(
            f"{spec.label} is not usable at {values.tolist()} ({check.reason.value})", check
        )
    return values


@handle_errors
def catalog_command(as_json: JsonOpt = False, out: OutOpt = None, no_timing: NoTimingOpt = False):
    """List the built-in potentials."""
    run = Run("catalog", no_timing=no_timing)
    entries = []
    for name, entry in CATALOG.items():
        spec = load_potential(f"catalog:{name}")
        entries.append(
            {
                "name": name,
                "summary": entry.summary,
                "defaults": entry.defaults,
                "n": spec.n,
                "expression": format_spec(spec),
                "box": spec.box,
            }
        )
    run.outputs(entries=entries)
    run.emit(as_json, out)


@handle_errors
def curvature_command(
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    point: PointOpt = None,
    xi: XiOpt = None,
    eta: EtaOpt = None,
    margin: MarginOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """Metric, base curvature and Kähler curvature blocks at a point."""
    run = Run("curvature", no_timing=no_timing)
    spec = resolve_potential(potential, param, margin)
    z = require_point(spec, point)
    run.inputs(potential=spec.label, params=spec.params, point=z)

    metric = metric_point(spec, z)
    riem = riemann_from(metric)
    K = kahler_from_metric(metric)
    run.outputs(
        value=metric.bundle.value,
        theta=metric.bundle.grad,
        g=tensor(metric.g),
        ginv=tensor(metric.ginv),
        christoffel=tensor(metric.gamma_mixed),
        riemann=tensor(riem.components),
        kahler_hh=tensor(K.hh),
        kahler_hv=tensor(K.hv),
        kahler_mixed=tensor(K.mixed),
    )
    if spec.n >= 2:
        e = np.eye(spec.n)
        run.outputs(sectional_e1_e2=sectional_curvature(metric, riem, e[0], e[1]))
    xi_v, eta_v = parse_vector(xi, "xi"), parse_vector(eta, "eta")
    if xi_v is not None:
        run.outputs(holomorphic_sectional=holomorphic_sectional(K, xi_v))
    if xi_v is not None and eta_v is not None:
        run.outputs(
            anti_bisectional=anti_bisectional(K, xi_v, eta_v),
            bisectional=bisectional(K, xi_v, eta_v),
            pairing=float(eta_v @ xi_v),
        )
    run.emit(as_json, out)


def _agree(a: float, b: float) -> bool:
    return abs(a - b) <= max(1e-10, 1e-8 * max(abs(a), abs(b)))


@handle_errors
def mtw_check_command(
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    cost: Annotated[str, typer.Option("--cost", help="Cost kind.")] = CostKind.PSI_COST.value,
    alpha: Annotated[Optional[float], typer.Option("--alpha", help="alpha for d-alpha.")] = None,
    dim: Annotated[Optional[int], typer.Option("--dim", help="Size for log-cost/ecf-cost.")] = None,
    expression: Annotated[Optional[str], typer.Option("--expression", help="Raw cost text.")] = None,
    point: PointOpt = None,
    x: Annotated[Optional[str], typer.Option("--x", help="Source point.")] = None,
    y: Annotated[Optional[str], typer.Option("--y", help="Target point.")] = None,
    xi: XiOpt = None,
    eta: EtaOpt = None,
    margin: MarginOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """MTW tensor by every available route; exit 1 when the routes disagree."""
    run = Run("mtw-check", no_timing=no_timing)
    xi_v, eta_v = parse_vector(xi, "xi"), parse_vector(eta, "eta")
    if xi_v is None or eta_v is None:
        raise SpecError("--xi and --eta are required")
    kind = choice(CostKind, cost, "--cost")
    if kind is CostKind.PSI_COST:
        spec = resolve_potential(potential, param, margin)
        z = require_point(spec, point)
        values = {
            route.route.value: route.value
            for route in (
                mtw_direct(psi_cost(spec), z, np.zeros(spec.n), xi_v, eta_v),
                mtw_potential(spec, z, xi_v, eta_v),
                mtw_curvature(spec, z, xi_v, eta_v),
            )
        }
        run.inputs(cost=kind.value, potential=spec.label, point=z, xi=xi_v, eta=eta_v)
    else:
        spec_cost = load_cost(kind, potential, parse_params(param), alpha, dim, expression)
        xs, ys = parse_vector(x, "x"), parse_vector(y, "y")
        if xs is None or ys is None:
            raise SpecError("--x and --y are required for this cost")
        values = {"direct": mtw_direct(spec_cost, xs, ys, xi_v, eta_v).value}
        run.inputs(cost=spec_cost.label, x=xs, y=ys, xi=xi_v, eta=eta_v)
        if kind is CostKind.D_ALPHA:
            comparison = d_alpha_curvature_comparison(spec_cost.potential, alpha, xs, ys, xi_v, eta_v)
            run.outputs(curvature_comparison=comparison)
    routes = list(values.values())
    agree = all(_agree(routes[0], other) for other in routes[1:])
    run.outputs(routes=values, agree=agree)
    run.emit(as_json, out)
    if not agree:
        raise typer.Exit(code=1)


@handle_errors
def certify_command(
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    cost: Annotated[str, typer.Option("--cost", help="Cost kind.")] = CostKind.PSI_COST.value,
    alpha: Annotated[Optional[float], typer.Option("--alpha")] = None,
    dim: Annotated[Optional[int], typer.Option("--dim")] = None,
    expression: Annotated[Optional[str], typer.Option("--expression")] = None,
    region: Annotated[
        Optional[str], typer.Option("--region", help="box:lo1,lo2:hi1,hi2; defaults to the catalog box.")
    ] = None,
    mode: Annotated[str, typer.Option("--mode", help="mtw0, mtw-kappa, noab or cross.")] = CertifyMode.MTW0.value,
    samples: Annotated[Optional[int], typer.Option("--samples")] = None,
    refinements: Annotated[Optional[int], typer.Option("--refinements")] = None,
    kappa: Annotated[float, typer.Option("--kappa")] = 0.0,
    workers: Annotated[Optional[int], typer.Option("--workers")] = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
    margin: MarginOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """Empirical certificate for a curvature sign condition; exit 1 when violated."""
    seed = cli_config.seed if seed is None else seed
    run = Run("certify", seed=seed, no_timing=no_timing)
    kind = choice(CostKind, cost, "--cost")
    if kind is CostKind.PSI_COST:
        target = resolve_potential(potential, param, margin)
        default_box = target.box
    else:
        target = load_cost(kind, potential, parse_params(param), alpha, dim, expression)
        default_box = None
    if region is not None:
        box = parse_region(region)
    elif default_box is not None:
        box = list(default_box)
    else:
        raise SpecError("--region is required for this target")
    budget = CertifyBudget(
        samples=cli_config.certify_samples if samples is None else samples,
        refinements=cli_config.certify_refinements if refinements is None else refinements,
        steps=cli_config.refine_steps,
        step=cli_config.refine_step,
        fd_step=cli_config.fd_step,
    )
    certificate = certify(
        target,
        box,
        choice(CertifyMode, mode, "--mode"),
        budget,
        seed,
        kappa=kappa,
        tol=cli_config.tolerance if tol is None else tol,
        workers=cli_config.workers if workers is None else workers,
    )
    run.inputs(target=certificate.target, region=box, mode=mode, budget=budget)
    run.outputs(certificate=certificate)
    run.emit(as_json, out)
    if certificate.verdict is Verdict.VIOLATED:
        raise typer.Exit(code=1)


@handle_errors
def legendre_command(
    potential: PotentialOpt = None,
    param: ParamOpt = None,
    point: PointOpt = None,
    theta: Annotated[Optional[str], typer.Option("--theta", help="Dual coordinates to invert.")] = None,
    margin: MarginOpt = None,
    as_json: JsonOpt = False,
    out: OutOpt = None,
    no_timing: NoTimingOpt = False,
):
    """Dual coordinates of a point, or the point and Legendre value of given dual coordinates.

    With --theta, --point is the starting point of the Newton inversion.
    """
    run = Run("legendre", no_timing=no_timing)
    spec = resolve_potential(potential, param, margin)
    theta_v = parse_vector(theta, "theta")
    if theta_v is None:
        u = require_point(spec, point)
        dual = to_dual(spec, u).theta
        run.inputs(potential=spec.label, point=u)
        run.outputs(
            theta=dual,
            psi_star=legendre_value(spec, dual, u),
            biconjugation_gap=biconjugation_gap(spec, u),
        )
    else:
        guess = None if point is None else require_point(spec, point)
        u = from_dual(
            spec,
            theta_v,
            guess,
            max_iter=cli_config.newton_max_iter,
            max_halvings=cli_config.newton_max_halvings,
            tol=cli_config.newton_tol,
        )
        residual = float(np.max(np.abs(to_dual(spec, u).theta - theta_v)))
        run.inputs(potential=spec.label, theta=theta_v, guess=guess)
        run.outputs(point=u, psi_star=float(u @ theta_v - spec.values(u)), residual=residual)
    run.emit(as_json, out)
