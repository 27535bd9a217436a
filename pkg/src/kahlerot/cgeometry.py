"""
c-exponential map, c-segments and relative c-convexity for a Psi-cost.

For c(x, y) = Psi(x - y) the momentum of y seen from x is
-c_x(x, y) = -grad Psi(x - y). c-segments are straight lines of momenta, so a
set Y is c-convex relative to X exactly when every theta-image
{grad Psi(x - y) : y in Y} is convex. ``check_c_convexity`` tests that on
finite samples.
"""

from itertools import combinations
from typing import Sequence

import numpy as np
from pydantic import BaseModel
from scipy.optimize import linprog, nnls
from scipy.spatial import ConvexHull, QhullError

from .config import ROOT_LOGGER
from .constants import CONVEXITY_RESOLUTION, CONVEXITY_TOL
from .enums import ConvexityMode, SetKind
from .errors import InversionError, OutOfDomainError, PreconditionError
from .hessian import dual_geodesic, dual_geodesic_path, from_dual, to_dual
from .potentials import PotentialSpec

logger = ROOT_LOGGER.getChild("cgeometry")

# chord points tested against the polygon per batch
_BATCH = 4096


def _vec(value: Sequence[float] | np.ndarray, n: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).ravel()
    if arr.shape != (n,):
        raise PreconditionError(f"{name} must have {n} components")
    return arr


def c_momentum(
    spec: PotentialSpec, x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray
) -> np.ndarray:
    """-c_x(x, y) = -grad Psi(x - y)."""
    x, y = _vec(x, spec.n, "x"), _vec(y, spec.n, "y")
    return -to_dual(spec, x - y).theta


def c_exp(
    spec: PotentialSpec,
    x: Sequence[float] | np.ndarray,
    p: Sequence[float] | np.ndarray,
    guess: Sequence[float] | np.ndarray | None = None,
) -> np.ndarray:
    """The y with -c_x(x, y) = p.

    Raises:
        InversionError: -p is not in the gradient image of Psi.
    """
    x, p = _vec(x, spec.n, "x"), _vec(p, spec.n, "p")
    try:
        z = from_dual(spec, -p, guess)
    except InversionError as exc:
        raise InversionError(
            f"momentum {p.tolist()} is outside the image of -grad Psi", exc.residual
        ) from exc
    return x - z


def c_segment(
    spec: PotentialSpec,
    x: Sequence[float] | np.ndarray,
    y0: Sequence[float] | np.ndarray,
    y1: Sequence[float] | np.ndarray,
    t: float,
) -> np.ndarray:
    """Point at t on the c-segment from y0 to y1 seen from x."""
    n = spec.n
    x, y0, y1 = _vec(x, n, "x"), _vec(y0, n, "y0"), _vec(y1, n, "y1")
    if t == 0.0:
        return y0.copy()
    if t == 1.0:
        return y1.copy()
    return x - dual_geodesic(spec, x - y0, x - y1, t)


def c_segment_path(
    spec: PotentialSpec,
    x: Sequence[float] | np.ndarray,
    y0: Sequence[float] | np.ndarray,
    y1: Sequence[float] | np.ndarray,
    ts: Sequence[float],
) -> np.ndarray:
    n = spec.n
    x, y0, y1 = _vec(x, n, "x"), _vec(y0, n, "y0"), _vec(y1, n, "y1")
    out = x - dual_geodesic_path(spec, x - y0, x - y1, ts)
    for i, t in enumerate(ts):
        if t == 0.0:
            out[i] = y0
        elif t == 1.0:
            out[i] = y1
    return out


class ConvexityWitness(BaseModel):
    base: list[float]
    start: list[float]
    end: list[float]
    t: float


class ConvexityReport(BaseModel):
    """Outcome of a relative c-convexity check.

    ``worst_violation`` is measured in theta-coordinates for planar sets and
    in point coordinates (distance to the hull of the set) otherwise.
    ``margin`` is the smallest signed distance of a tested chord point to the
    boundary, positive inside.
    """

    holds: bool
    mode: ConvexityMode
    worst_violation: float
    margin: float
    witness: ConvexityWitness | None = None
    bases: int
    chords: int


def _densify(vertices: np.ndarray, resolution: int) -> np.ndarray:
    """Closed polyline through ``vertices`` with ``resolution`` points per edge."""
    steps = np.arange(resolution) / resolution
    starts, ends = vertices, np.roll(vertices, -1, axis=0)
    pts = starts[:, None, :] + steps[None, :, None] * (ends - starts)[:, None, :]
    return pts.reshape(-1, vertices.shape[1])


def _hull_vertices(points: np.ndarray) -> np.ndarray:
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise PreconditionError(f"set has an empty interior: {exc}") from exc
    # counter-clockwise order in two dimensions
    return points[hull.vertices]


def polygon_signed_distance(polygon: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Distance of each point to the closed polygon boundary, positive inside."""
    a = polygon
    b = np.roll(polygon, -1, axis=0)
    d = b - a
    lengths = np.einsum("ij,ij->i", d, d)
    lengths = np.where(lengths > 0, lengths, 1.0)
    rel = points[:, None, :] - a[None, :, :]
    s = np.clip(np.einsum("kij,ij->ki", rel, d) / lengths, 0.0, 1.0)
    nearest = a[None, :, :] + s[:, :, None] * d[None, :, :]
    dist = np.linalg.norm(points[:, None, :] - nearest, axis=2).min(axis=1)

    px, py = points[:, 0:1], points[:, 1:2]
    ay, by = a[None, :, 1], b[None, :, 1]
    straddles = (ay > py) != (by > py)
    dy = np.where(by - ay == 0, 1.0, by - ay)
    crossing_x = a[None, :, 0] + (py - ay) * (b[None, :, 0] - a[None, :, 0]) / dy
    inside = (np.sum(straddles & (px < crossing_x), axis=1) % 2) == 1
    return np.where(inside, dist, -dist)


def _angular_order(points: np.ndarray) -> np.ndarray:
    """Indices ordering planar points counter-clockwise about their centroid."""
    rel = points - points.mean(axis=0)
    return np.argsort(np.arctan2(rel[:, 1], rel[:, 0]), kind="stable")


def _chord_points(images: np.ndarray, resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Interior points on every chord between image points, with their chord and t."""
    pairs = np.array(list(combinations(range(images.shape[0]), 2)))
    ts = np.arange(1, resolution) / resolution
    starts, ends = images[pairs[:, 0]], images[pairs[:, 1]]
    pts = (1.0 - ts)[None, :, None] * starts[:, None, :] + ts[None, :, None] * ends[:, None, :]
    chord = np.repeat(np.arange(pairs.shape[0]), ts.shape[0])
    tt = np.tile(ts, pairs.shape[0])
    return pts.reshape(-1, images.shape[1]), pairs[chord], tt


def _hull_distance(hull_points: np.ndarray, point: np.ndarray) -> tuple[bool, float]:
    """Membership in conv(hull_points) by LP feasibility, distance from the nnls residual."""
    m = hull_points.shape[0]
    A = np.vstack([hull_points.T, np.ones((1, m))])
    b = np.concatenate([point, [1.0]])
    result = linprog(np.zeros(m), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if result.status == 0:
        return True, 0.0
    _, residual = nnls(A, b)
    return False, float(residual)


def _images(spec: PotentialSpec, base: np.ndarray, points: np.ndarray, sign: float) -> np.ndarray:
    return np.array([to_dual(spec, sign * (base - p)).theta for p in points])


def _check_domain(
    spec: PotentialSpec, bases: np.ndarray, points: np.ndarray, sign: float, mode: ConvexityMode
) -> None:
    for base in bases:
        for p in points:
            z = sign * (base - p)
            if not float(spec.domain.slack(z)) > spec.domain.margin:
                x, y = (base, p) if mode is ConvexityMode.Y_RELATIVE_TO_X else (p, base)
                raise OutOfDomainError(
                    f"x - y leaves the domain of {spec.label} at x={x.tolist()}, y={y.tolist()}"
                )


def check_c_convexity(
    spec: PotentialSpec,
    X: Sequence[Sequence[float]] | np.ndarray,
    Y: Sequence[Sequence[float]] | np.ndarray,
    resolution: int = CONVEXITY_RESOLUTION,
    mode: ConvexityMode | str = ConvexityMode.Y_RELATIVE_TO_X,
    kind: SetKind | str = SetKind.POLYTOPE,
    tol: float = CONVEXITY_TOL,
) -> ConvexityReport:
    """Test whether one set is c-convex relative to the other.

    In ``Y-relative-to-X`` mode the points of X are base points and Y is the
    set under test; ``X-relative-to-Y`` swaps the roles.

    Args:
        spec: Potential of the Psi-cost.
        X: Points, one per row.
        Y: Points, one per row.
        resolution: Points per polygon edge and per chord.
        mode: Which set is tested.
        kind: ``polytope`` means the tested set is the convex hull of its rows;
            ``points`` means its rows are a finite sample of the boundary in
            any order; in the plane their theta-images are joined by angle
            about their centroid, so a convex image is traced exactly.
        tol: Violations up to ``tol`` are tolerated.
    """
    mode, kind = ConvexityMode(mode), SetKind(kind)
    if resolution < 2:
        raise PreconditionError("resolution must be at least 2")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n = spec.n
    if X.shape[1] != n or Y.shape[1] != n:
        raise PreconditionError(f"point sets must have {n} columns")
    if mode is ConvexityMode.Y_RELATIVE_TO_X:
        bases, tested, sign = X, Y, 1.0
    else:
        # theta = grad Psi(x - y) with x varying
        bases, tested, sign = Y, X, -1.0
    _check_domain(spec, bases, tested, sign, mode)

    if n == 2:
        boundary = _hull_vertices(tested) if kind is SetKind.POLYTOPE else tested
        if kind is SetKind.POLYTOPE:
            boundary = _densify(boundary, resolution)
        _check_domain(spec, bases, boundary, sign, mode)
        ordered = kind is SetKind.POLYTOPE
        return _planar(spec, bases, boundary, sign, resolution, mode, tol, ordered)
    vertices = _hull_vertices(tested) if kind is SetKind.POLYTOPE and n > 1 else tested
    return _general(spec, bases, vertices, tested, sign, resolution, mode, tol)


def _planar(
    spec: PotentialSpec,
    bases: np.ndarray,
    boundary: np.ndarray,
    sign: float,
    resolution: int,
    mode: ConvexityMode,
    tol: float,
    ordered: bool = True,
) -> ConvexityReport:
    margin = np.inf
    witness = None
    chords = 0
    for base in bases:
        images, points = _images(spec, base, boundary, sign), boundary
        if not ordered:
            # a boundary sample in any order; a convex image is star-shaped about its centroid
            perm = _angular_order(images)
            images, points = images[perm], boundary[perm]
        pts, pairs, ts = _chord_points(images, resolution)
        chords += images.shape[0] * (images.shape[0] - 1) // 2
        for lo in range(0, pts.shape[0], _BATCH):
            signed = polygon_signed_distance(images, pts[lo : lo + _BATCH])
            k = int(np.argmin(signed))
            if signed[k] < margin:
                margin = float(signed[k])
                i, j = pairs[lo + k]
                witness = ConvexityWitness(
                    base=base.tolist(),
                    start=points[i].tolist(),
                    end=points[j].tolist(),
                    t=float(ts[lo + k]),
                )
    worst = max(0.0, -margin)
    holds = worst <= tol
    logger.info("planar c-convexity %s: worst violation %.3e", mode.value, worst)
    return ConvexityReport(
        holds=holds,
        mode=mode,
        worst_violation=worst,
        margin=margin,
        witness=None if holds else witness,
        bases=bases.shape[0],
        chords=chords,
    )


def _general(
    spec: PotentialSpec,
    bases: np.ndarray,
    vertices: np.ndarray,
    hull_points: np.ndarray,
    sign: float,
    resolution: int,
    mode: ConvexityMode,
    tol: float,
) -> ConvexityReport:
    ts = list(np.arange(1, resolution) / resolution)
    worst, witness, chords = 0.0, None, 0
    for base in bases:
        for a, b in combinations(range(vertices.shape[0]), 2):
            chords += 1
            u0 = sign * (base - vertices[a])
            u1 = sign * (base - vertices[b])
            path = dual_geodesic_path(spec, u0, u1, ts)
            # back to the coordinates of the tested set
            points = base - sign * path
            for t, point in zip(ts, points):
                inside, distance = _hull_distance(hull_points, point)
                if not inside and distance > worst:
                    worst = distance
                    witness = ConvexityWitness(
                        base=base.tolist(),
                        start=vertices[a].tolist(),
                        end=vertices[b].tolist(),
                        t=float(t),
                    )
    holds = worst <= tol
    logger.info("c-convexity %s by LP: worst violation %.3e", mode.value, worst)
    return ConvexityReport(
        holds=holds,
        mode=mode,
        worst_violation=worst,
        margin=-worst,
        witness=None if holds else witness,
        bases=bases.shape[0],
        chords=chords,
    )
