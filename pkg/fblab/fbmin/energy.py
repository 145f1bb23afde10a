"""
Total energy of a candidate domain and the free boundary condition on its
boundary.

For K inside Omega with u the p-capacitary potential of Omega \\ K,

    I(Omega) = int |Du|^p + Per(Omega)

and at a critical domain (p - 1)|Du|^p equals the interior curvature of the
free boundary. Where the boundary runs along the computational box only the
inequality (p - 1)|Du|^p >= curvature of the box (zero on its sides) is
required.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from ..errors import PreconditionError
from ..geomlab.curvature import contour_curvature
from ..geomlab.hull import convex_hull
from ..grid_core.grid import ScalarField
from ..grid_core.region import Region
from ..plap.boundary import boundary_samples, inward_gradient
from ..plap.solver import PLapConfig, p_energy, solve_p_capacitary
from ..reporting import Measured, Report
from ..verify.tolerances import get_tolerance

logger = logging.getLogger(__name__)

BOX_CELLS = 2.5
GRAPH_WINDOW_CELLS = 6.0
GRAPH_POINTS = 16


class EnergyTerms(NamedTuple):
    dirichlet: float
    perimeter: float
    total: float


def _config(p: float, cfg: Optional[PLapConfig]) -> PLapConfig:
    if cfg is None:
        return PLapConfig(p=p)
    if cfg.p != p:
        raise PreconditionError(f"solver configured for p={cfg.p}, energy requested for p={p}")
    return cfg


def evaluate(K: Region, Omega: Region, p: float, cfg: Optional[PLapConfig] = None) -> Tuple[EnergyTerms, ScalarField]:
    """Solve for the potential and return the energy terms together with it."""
    u = solve_p_capacitary(K, Omega, _config(p, cfg))
    dirichlet = p_energy(u, p)
    perimeter = Omega.perimeter
    return EnergyTerms(dirichlet, perimeter, dirichlet + perimeter), u


def total_energy(K: Region, Omega: Region, p: float, cfg: Optional[PLapConfig] = None) -> EnergyTerms:
    """Return ``(dirichlet, perimeter, total)``.

    Raises:
        PreconditionError: If K is not strictly inside Omega
        ConvergenceError: If the inner solve does not converge
    """
    terms, _ = evaluate(K, Omega, p, cfg)
    logger.debug(f"Energy p={p}: dirichlet {terms.dirichlet:.8g} + perimeter {terms.perimeter:.8g}")
    return terms


@dataclass(frozen=True, eq=False)
class FreeBoundaryResidual:
    """Per-vertex free boundary data on the contour of Omega.

    ``residual`` is (p - 1)|Du|^p - curvature; it is NaN on vertices within
    2.5h of the box, where only the one-sided condition against the zero
    curvature of the box sides applies.
    """
    points: np.ndarray
    normals: np.ndarray
    loop: np.ndarray
    gradient_term: np.ndarray
    curvature: np.ndarray
    residual: np.ndarray
    on_box: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        return ~self.on_box

    @property
    def mean_curvature(self) -> float:
        kappa = self.curvature[self.interior]
        return float(np.mean(kappa)) if kappa.size else 0.0

    @property
    def max_abs(self) -> float:
        values = self.residual[self.interior]
        return float(np.max(np.abs(values))) if values.size else 0.0

    @property
    def max_relative(self) -> float:
        """Largest |residual| over the mean curvature of the free part."""
        return self.max_abs / max(abs(self.mean_curvature), 1e-300)

    def stats(self) -> dict:
        interior = self.residual[self.interior]
        return {
            "max_abs": self.max_abs,
            "mean": float(np.mean(interior)) if interior.size else 0.0,
            "max_relative": self.max_relative,
            "mean_curvature": self.mean_curvature,
            "box_vertices": int(self.on_box.sum()),
        }


def fb_residual(
    K: Region,
    Omega: Region,
    p: float,
    u: Optional[ScalarField] = None,
    cfg: Optional[PLapConfig] = None,
) -> FreeBoundaryResidual:
    """Free boundary residual at every contour vertex of Omega.

    Raises:
        PreconditionError: If the contour of Omega comes within one cell of K
    """
    samples = boundary_samples(Omega)
    if len(samples.points) == 0:
        raise PreconditionError("Omega has no contour")
    h = Omega.grid.h
    if np.min(ScalarField(K.grid, K.phi).sample(samples.points)) < h:
        raise PreconditionError("free boundary touches K")
    if u is None:
        u = solve_p_capacitary(K, Omega, _config(p, cfg))

    gradient_term = (p - 1.0) * inward_gradient(u, samples.points, samples.normals) ** p
    curvature = np.concatenate(contour_curvature(Omega))
    on_box = Omega.grid.box_distance(samples.points) < BOX_CELLS * h
    residual = np.where(on_box, np.nan, gradient_term - curvature)
    result = FreeBoundaryResidual(
        samples.points, samples.normals, samples.loop, gradient_term, curvature, residual, on_box
    )
    logger.debug(f"Free boundary residual p={p}: max |r| {result.max_abs:.4g}, on box {int(on_box.sum())}")
    return result


def graph_curvature(points: np.ndarray, origin: np.ndarray, normal: np.ndarray, window: float) -> float:
    """-div(D phi / sqrt(1 + |D phi|^2)) at 0 for the boundary written as a graph over its tangent.

    The height is measured along the outward ``normal``, so convex boundaries
    have positive curvature.
    """
    tangent = np.array([-normal[1], normal[0]])
    offsets = points - origin
    xi = offsets @ tangent
    eta = offsets @ normal
    near = (np.abs(xi) <= window) & (np.abs(eta) <= window)
    if near.sum() < 5:
        raise PreconditionError("too few contour points to fit a local graph")
    design = np.stack([np.ones(near.sum()), xi[near], xi[near] ** 2, xi[near] ** 3], axis=1)
    (_, slope, half_second, _), *_ = np.linalg.lstsq(design, eta[near], rcond=None)
    return float(-2.0 * half_second / (1.0 + slope ** 2) ** 1.5)


def fb_graph_curvature_check(
    K: Region,
    Omega: Region,
    p: float,
    u: Optional[ScalarField] = None,
    cfg: Optional[PLapConfig] = None,
    points: int = GRAPH_POINTS,
    tol: Optional[float] = None,
) -> Report:
    """Graph curvature of the free boundary against (p - 1)|Du|^p at evenly spaced contour points."""
    tol = get_tolerance("fb_graph") if tol is None else tol
    residual = fb_residual(K, Omega, p, u=u, cfg=cfg)
    h = Omega.grid.h
    candidates = np.flatnonzero(residual.interior)
    anchor = "on the free boundary written as a graph, -div(D phi / sqrt(1 + |D phi|^2)) = (p - 1)|Du|^p"
    metadata = {"p": p, "n": Omega.grid.n, "R": Omega.grid.radius}
    if candidates.size == 0:
        return Report.skipped("fb_graph_curvature", anchor, "free boundary lies on the box", metadata)

    picks = candidates[np.linspace(0, candidates.size - 1, min(points, candidates.size)).astype(int)]
    errors, kappas = [], []
    for k in picks:
        loop_points = residual.points[residual.loop == residual.loop[k]]
        kappa = graph_curvature(loop_points, residual.points[k], residual.normals[k], GRAPH_WINDOW_CELLS * h)
        kappas.append(kappa)
        errors.append(abs(kappa - residual.gradient_term[k]))
    scale = max(abs(float(np.mean(kappas))), 1e-300)
    worst = float(np.max(errors)) / scale
    return Report.judge(
        "fb_graph_curvature",
        anchor,
        worst,
        tol,
        values={"max_relative_error": Measured(worst), "mean_graph_curvature": Measured(scale, "1/length")},
        metadata={**metadata, "points": int(len(picks))},
    )


def hull_free_boundary_inequality(
    K: Region,
    Omega: Region,
    p: float,
    cfg: Optional[PLapConfig] = None,
    tol: Optional[float] = None,
) -> Report:
    """(p - 1)|Du^c|^p >= curvature on the boundary of cov(Omega), u^c the potential of cov(Omega) \\ K."""
    tol = get_tolerance("hull_inequality") if tol is None else tol
    hull = convex_hull(Omega)
    result = fb_residual(K, hull, p, cfg=cfg)
    kappa = result.curvature[result.interior]
    anchor = "on the boundary of the convex hull of a minimal domain, (p - 1)|Du|^p >= curvature"
    metadata = {"p": p, "n": Omega.grid.n, "R": Omega.grid.radius}
    if kappa.size == 0:
        return Report.skipped("hull_free_boundary_inequality", anchor, "hull boundary lies on the box", metadata)
    shortfall = kappa - result.gradient_term[result.interior]
    violation = float(max(np.max(shortfall), 0.0)) / max(float(np.mean(kappa)), 1e-300)
    return Report.judge(
        "hull_free_boundary_inequality",
        anchor,
        violation,
        tol,
        values={"max_relative_shortfall": Measured(violation),
                "box_vertices": Measured(float(result.on_box.sum()), "count")},
        metadata=metadata,
    )
