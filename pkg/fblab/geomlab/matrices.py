"""
Small symmetric matrices, quadratic graphs and their curvatures.

A symmetric matrix A describes the graph e = <A x, x> over a tangent plane;
its mean curvature at the origin is 2 Tr A. Inf-convolving two such graphs
over midpoints gives the quadratic form of 2 (B1^-1 + B2^-1)^-1.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from ..errors import PreconditionError
from ..reporting import Measured, Report
from ..verify.tolerances import get_tolerance

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Symmetric matrix; entries are symmetrized on construction."""
    entries: np.ndarray
    spd: bool = field(init=False)

    def __post_init__(self):
        entries = np.atleast_2d(np.array(self.entries, dtype=float))
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise PreconditionError(f"expected a square matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise PreconditionError("matrix entries must be finite")
        entries = 0.5 * (entries + entries.T)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "spd", bool(np.min(np.linalg.eigvalsh(entries)) > 0))

    @classmethod
    def from_json(cls, data: Union[str, list]) -> "SymMatrix":
        """Matrix from JSON text or an already decoded nested list.

        Raises:
            PreconditionError: If the input is not valid JSON or not a square array of numbers
        """
        try:
            entries = np.array(json.loads(data) if isinstance(data, str) else data, dtype=float)
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            raise PreconditionError(f"cannot read a matrix from {data!r}: {str(e)}")
        return cls(entries)

    @classmethod
    def diag(cls, values: Sequence[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def quadratic(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("...i,ij,...j->...", x, self.entries, x)

    def to_list(self):
        return self.entries.tolist()


def random_spd(rng: np.random.Generator, dim: int, low: float = 0.1, high: float = 10.0) -> SymMatrix:
    """Random SPD matrix with log-uniform eigenvalues and a Haar-like rotation."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    eigen = np.exp(rng.uniform(np.log(low), np.log(high), dim))
    return SymMatrix(q @ np.diag(eigen) @ q.T)


def _require_spd(*matrices: SymMatrix) -> None:
    dims = {m.dim for m in matrices}
    if len(dims) != 1:
        raise PreconditionError(f"matrices have different dimensions {sorted(dims)}")
    for m in matrices:
        if not m.spd:
            raise PreconditionError("matrix is not positive definite")


def graph_mean_curvature(A: SymMatrix) -> float:
    """Mean curvature (sum of principal curvatures) of e = <Ax, x> at the origin."""
    return 2.0 * A.trace


@dataclass(frozen=True, eq=False)
class InfConvolution:
    matrix: SymMatrix
    harmonic_mean: np.ndarray
    identity_error: float
    argmin_map: np.ndarray  # y' = argmin_map @ x'


def inf_convolution(B1: SymMatrix, B2: SymMatrix) -> InfConvolution:
    _require_spd(B1, B2)
    b1, b2 = B1.entries, B2.entries
    harmonic = np.linalg.inv(np.linalg.inv(b1) + np.linalg.inv(b2))
    via_sum = b1 @ np.linalg.solve(b1 + b2, b2)
    scale = max(np.max(np.abs(harmonic)), 1e-300)
    error = float(np.max(np.abs(via_sum - harmonic)) / scale)
    return InfConvolution(
        matrix=SymMatrix(2.0 * harmonic),
        harmonic_mean=harmonic,
        identity_error=error,
        argmin_map=2.0 * np.linalg.solve(b1 + b2, b2),
    )


def inf_convolution_matrix(B1: SymMatrix, B2: SymMatrix) -> SymMatrix:
    """M = 2 (B1^-1 + B2^-1)^-1, so that <Mx, x> = min over y of
    (<B1 y, y> + <B2 (2x - y), 2x - y>) / 2.

    Raises:
        PreconditionError: If either matrix is not SPD or the dimensions differ
    """
    result = inf_convolution(B1, B2)
    logger.debug(f"Harmonic mean identity error {result.identity_error:.2e}")
    return result.matrix


def brute_force_inf_convolution(B1: SymMatrix, B2: SymMatrix, x: np.ndarray) -> float:
    """Numerical minimum over y of (<B1 y, y> + <B2 (2x - y), 2x - y>) / 2."""
    x = np.asarray(x, dtype=float)

    def objective(y):
        z = 2.0 * x - y
        return 0.5 * (B1.quadratic(y) + B2.quadratic(z))

    def jacobian(y):
        return B1.entries @ y - B2.entries @ (2.0 * x - y)

    result = minimize(objective, x.copy(), jac=jacobian, method="BFGS", options={"gtol": 1e-12, "maxiter": 500})
    return float(result.fun)


def trace_inequality_check(B1: SymMatrix, B2: SymMatrix, tol: Optional[float] = None) -> Report:
    """1 / Tr M >= 1 / (2 Tr B1) + 1 / (2 Tr B2) for the inf-convolution matrix M."""
    tol = get_tolerance("trace_inequality") if tol is None else tol
    M = inf_convolution_matrix(B1, B2)
    lhs = 1.0 / M.trace
    rhs = 1.0 / (2.0 * B1.trace) + 1.0 / (2.0 * B2.trace)
    return Report.judge(
        "trace_inequality",
        "the inverse trace of the inf-convolution matrix dominates the mean of the inverse traces",
        (rhs - lhs) / rhs,
        tol,
        values={"lhs": Measured(lhs), "rhs": Measured(rhs)},
        metadata={"dim": B1.dim},
    )


@dataclass(frozen=True, eq=False)
class LocalGraph:
    """Samples of a boundary written as a graph e(x') over its tangent plane at 0."""
    points: np.ndarray  # (m, d)
    values: np.ndarray  # (m,)
    radius: float

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.shape[0] == 1 and np.ndim(self.points) == 1:
            points = points.T
        values = np.asarray(self.values, dtype=float)
        if points.shape[0] != values.shape[0]:
            raise PreconditionError("graph samples and values differ in length")
        if not self.radius > 0:
            raise PreconditionError("sample radius must be positive")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)
        scale = max(float(np.max(np.abs(values))), 1e-300)
        norms = np.linalg.norm(points, axis=1)
        at_origin = norms < 1e-12
        if at_origin.any() and abs(values[at_origin][0]) > 1e-9 * max(scale, 1.0):
            raise PreconditionError("graph does not pass through the origin")
        if self.tangent_slope() * self.radius > 0.05 * scale + 1e-12:
            raise PreconditionError(f"graph is not tangent at the origin (slope {self.tangent_slope():.3g})")

    def tangent_slope(self) -> float:
        """Largest symmetric difference quotient at the origin along the axes."""
        norms = np.linalg.norm(self.points, axis=1)
        positive = norms[norms > 1e-12]
        if positive.size == 0:
            return 0.0
        delta = float(np.min(positive))
        slope = 0.0
        for k in range(self.points.shape[1]):
            target = np.zeros(self.points.shape[1])
            target[k] = delta
            plus = np.linalg.norm(self.points - target, axis=1) < 1e-9 * max(delta, 1.0)
            minus = np.linalg.norm(self.points + target, axis=1) < 1e-9 * max(delta, 1.0)
            if plus.any() and minus.any():
                slope = max(slope, abs(self.values[plus][0] - self.values[minus][0]) / (2.0 * delta))
        return slope

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], dim: int, radius: float,
                      samples: int = 32) -> "LocalGraph":
        """Sample ``func`` on a symmetric stencil of the ball of ``radius`` in R^dim (dim 1 or 2)."""
        axis = np.linspace(-radius, radius, 2 * samples + 1)
        if dim == 1:
            points = axis[:, None]
        elif dim == 2:
            xx, yy = np.meshgrid(axis, axis, indexing="ij")
            points = np.stack([xx.ravel(), yy.ravel()], axis=1)
            points = points[np.linalg.norm(points, axis=1) <= radius * (1 + 1e-12)]
        else:
            raise PreconditionError(f"stencils are available in dimensions 1 and 2, got {dim}")
        return cls(points, np.asarray(func(points), dtype=float), radius)


ANGLES = 16
EIGEN_STEPS = 32
TOUCH_SLACK = 1e-12


def _exact_last(values: np.ndarray, coords: np.ndarray, lam: float, slack: float) -> float:
    """Largest second eigenvalue keeping lam xi^2 + mu eta^2 <= g + slack."""
    xi, eta = coords
    usable = eta * eta > 1e-300
    if not usable.any():
        return 0.0
    return max(0.0, float(np.min((values[usable] + slack[usable] - lam * xi[usable] ** 2) / eta[usable] ** 2)))


def _scan(g: LocalGraph, thetas: np.ndarray, bounds) -> tuple:
    best = (-np.inf, 0.0, 0.0, 0.0)
    slack = np.full(len(g.values), TOUCH_SLACK)
    for k, theta in enumerate(thetas):
        e1 = np.array([np.cos(theta), np.sin(theta)])
        e2 = np.array([-np.sin(theta), np.cos(theta)])
        coords = (g.points @ e1, g.points @ e2)
        xi2 = coords[0] ** 2
        usable = xi2 > 1e-300
        cap = float(np.min((g.values[usable] + slack[usable]) / xi2[usable])) if usable.any() else 0.0
        low, high = bounds(k, max(cap, 0.0))
        for lam in np.linspace(low, min(high, max(cap, 0.0)), EIGEN_STEPS):
            mu = _exact_last(g.values, coords, lam, slack)
            value = 2.0 * (lam + mu)
            if value > best[0]:
                best = (value, theta, lam, mu)
    return best


def viscosity_mean_curvature(g: LocalGraph) -> float:
    """Largest 2 Tr A over positive semidefinite A with <Ax, x> <= g(x) on all samples.

    In one dimension the answer is exact on the samples. In two dimensions A
    is parametrized by a rotation and its eigenvalues: 16 angles times 32
    values of the first eigenvalue, the second one exact, followed by a
    zoomed scan around the best pair. The scan never exceeds the supremum.

    Raises:
        PreconditionError: If g is negative somewhere (no admissible quadratic)
    """
    if np.any(g.values < -TOUCH_SLACK):
        raise PreconditionError("graph dips below its tangent plane: no touching quadratic")
    if g.dim == 1:
        x2 = g.points[:, 0] ** 2
        usable = x2 > 1e-300
        return 2.0 * max(0.0, float(np.min(g.values[usable] / x2[usable])))
    if g.dim != 2:
        raise PreconditionError(f"viscosity curvature is implemented in dimensions 1 and 2, got {g.dim}")

    thetas = np.linspace(0.0, np.pi, ANGLES, endpoint=False)
    value, theta, lam, _ = _scan(g, thetas, lambda k, cap: (0.0, cap))
    step = np.pi / ANGLES
    zoom = theta + np.linspace(-step, step, ANGLES)

    def bounds(k, cap):
        width = cap / (EIGEN_STEPS - 1)
        return max(0.0, lam - width), lam + width

    refined, *_ = _scan(g, zoom, bounds)
    logger.debug(f"Viscosity curvature scan {value:.6g}, zoomed {refined:.6g}")
    return float(max(value, refined))


def block_reduction_check(g: LocalGraph, eps: float = 1e-6, tol: Optional[float] = None) -> Report:
    """Compare the full scan with the block family diag(a, b), a in (0, eps).

    The graph must vanish along the first axis. Block quadratics touch the
    segment up to the slack eps |x|^2.

    Raises:
        PreconditionError: If g does not vanish on the first axis or is not two dimensional
    """
    if g.dim != 2:
        raise PreconditionError("block reduction needs a two-dimensional graph")
    tol = get_tolerance("block_reduction") if tol is None else tol
    on_axis = np.abs(g.points[:, 1]) < 1e-12
    scale = max(float(np.max(np.abs(g.values))), 1e-300)
    if on_axis.sum() < 3 or np.max(np.abs(g.values[on_axis])) > 1e-3 * scale:
        raise PreconditionError("graph has no straight segment along the first axis")

    full = viscosity_mean_curvature(g)
    a = 0.5 * eps
    slack = eps * np.einsum("mi,mi->m", g.points, g.points) + TOUCH_SLACK
    b = _exact_last(g.values, (g.points[:, 0], g.points[:, 1]), a, slack)
    block = 2.0 * (a + b)
    error = abs(full - block) / max(abs(full), abs(block), 1e-300)
    return Report.judge(
        "block_reduction",
        "the viscosity mean curvature is attained by block quadratics diag(a, B) with a -> 0",
        error,
        tol,
        values={"full": Measured(full, "1/length"), "block": Measured(block, "1/length")},
        metadata={"eps": eps, "radius": g.radius},
    )
