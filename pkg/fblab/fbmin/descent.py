"""
Level-set shape descent for the total energy.

Each outer step solves the inner potential, evaluates the free boundary
residual and replaces it by its H^1 representative along the contour with
smoothing length l = ``smoothing_cells * h``. The boundary moves along its
normal by ``step_scale * l^2`` times that velocity (capped at
``move_cap_cells`` cells), the moved level set is redistanced, and the move
is accepted only if the total energy decreases, halving it otherwise.

The smoothing keeps the explicit step stable: per step, a curvature mode of
any wavelength shrinks by at most ``step_scale`` times its amplitude.
Omega always contains K dilated by ``clearance_cells`` cells and stays one
cell off the box.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from ..errors import ConvergenceError, DetachedDomainError, PreconditionError
from ..grid_core.grid import Grid, ScalarField
from ..grid_core.region import Region, contour_distance, rasterize, signed_area
from ..grid_core.shapes import parse_shape_spec
from ..plap.solver import PLapConfig
from ..reporting import Measured, Report, Status
from .energy import EnergyTerms, FreeBoundaryResidual, evaluate, fb_residual
from .levelset import extend_to_nodes, h1_smooth_along_loops, move_interface, reinitialize

logger = logging.getLogger(__name__)

ANCHOR = "the minimizer of int |Dv|^p + Per({v > 0}) over v = 1 on K is unique and its positivity set is convex"


@dataclass
class MinimizeConfig:
    p: float = 2.0
    n: int = 128
    radius: float = 4.0
    k: str = "disk:1"
    init: str = "disk:3"
    step_scale: float = 1.0
    tol_fb_residual: float = 0.1
    tol_energy_stall: float = 1e-4
    max_outer_iter: int = 100
    max_backtracks: int = 8
    smoothing_cells: float = 8.0
    clearance_cells: float = 2.0
    move_cap_cells: float = 2.0
    seed: int = 0
    solver: Optional[PLapConfig] = None

    def __post_init__(self):
        if not self.p > 1:
            raise PreconditionError(f"p must exceed 1, got {self.p}")
        for name in ("step_scale", "tol_fb_residual", "tol_energy_stall", "smoothing_cells", "clearance_cells",
                     "move_cap_cells"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive, got {getattr(self, name)}")
        if int(self.max_outer_iter) < 1:
            raise PreconditionError(f"max_outer_iter must be at least 1, got {self.max_outer_iter}")
        if int(self.max_backtracks) < 0:
            raise PreconditionError(f"max_backtracks must be nonnegative, got {self.max_backtracks}")
        if self.solver is None:
            self.solver = PLapConfig(p=self.p)
        elif self.solver.p != self.p:
            raise PreconditionError(f"solver p={self.solver.p} differs from p={self.p}")

    @property
    def grid(self) -> Grid:
        return Grid(self.n, self.radius)

    def to_dict(self) -> dict:
        return asdict(self)


class TraceRow(NamedTuple):
    iteration: int
    dirichlet: float
    perimeter: float
    total: float
    max_residual: float
    step: float


@dataclass
class MinimizerReport:
    omega: Region
    potential: ScalarField
    energy: EnergyTerms
    residual: FreeBoundaryResidual
    trace: List[TraceRow] = field(default_factory=list)
    converged: bool = False
    topology_changed: bool = False
    backtracks: int = 0
    message: str = ""
    config: dict = field(default_factory=dict)

    @property
    def clearance(self) -> float:
        return float(self.config.get("clearance", np.nan))

    def to_report(self) -> Report:
        stats = self.residual.stats()
        tol = float(self.config.get("tol_fb_residual", np.nan))
        values = {
            "dirichlet": Measured(self.energy.dirichlet),
            "perimeter": Measured(self.energy.perimeter, "length"),
            "total": Measured(self.energy.total),
            "max_relative_residual": Measured(stats["max_relative"]),
            "mean_residual": Measured(stats["mean"], "1/length"),
            "box_vertices": Measured(float(stats["box_vertices"]), "count"),
            "iterations": Measured(float(len(self.trace)), "count"),
            "backtracks": Measured(float(self.backtracks), "count"),
        }
        metadata = dict(self.config)
        metadata.update({"converged": self.converged, "topology_changed": self.topology_changed,
                         "message": self.message})
        return Report(
            "free_boundary_minimization",
            ANCHOR,
            Status.PASSED if self.converged else Status.FAILED,
            values,
            tol,
            tol - stats["max_relative"],
            metadata,
        )

    def trace_rows(self):
        return [tuple(row) for row in self.trace]


def outer_loops(region: Region) -> int:
    return sum(1 for loop in region.contours if signed_area(loop) > 0)


class ShapeDescent:
    """One descent run; owns its level set for the duration of ``run``."""

    def __init__(self, cfg: MinimizeConfig, K: Region, init: Region):
        self.cfg = cfg
        self.K = K
        self.grid = K.grid
        h = self.grid.h
        x, y = self.grid.node_coords()
        self.guard = K.phi - cfg.clearance_cells * h
        self.floor = h - self.grid.box_distance(np.stack([x, y], axis=-1))
        if np.any(init.phi[self.guard < 0] >= 0):
            raise PreconditionError(f"initial domain must contain K with a clearance of {cfg.clearance_cells} cells")
        self.init = init

    def constrain(self, phi: np.ndarray) -> np.ndarray:
        return np.maximum(np.minimum(phi, self.guard), self.floor)

    def redistanced(self, phi: np.ndarray) -> Region:
        """Constrained region of ``phi`` whose level set is a signed distance again."""
        region = reinitialize(Region.from_phi(self.grid, self.constrain(phi)))
        return Region.from_phi(self.grid, self.constrain(region.phi))

    def velocity(self, residual: FreeBoundaryResidual) -> np.ndarray:
        """Smoothed normal velocity per contour vertex; zero drive on the box."""
        speed = np.where(residual.interior, residual.residual, 0.0)
        length = self.cfg.smoothing_cells * self.grid.h
        return h1_smooth_along_loops(speed, residual.points, residual.loop, length)

    def run(self) -> MinimizerReport:
        cfg, K, h = self.cfg, self.K, self.grid.h
        p = cfg.p
        dt = cfg.step_scale * (cfg.smoothing_cells * h) ** 2
        omega = self.redistanced(self.init.phi)
        phi = omega.phi
        terms, u = evaluate(K, omega, p, cfg.solver)
        trace: List[TraceRow] = []
        change = np.inf
        backtracks = 0
        converged = False
        message = f"stopped after {cfg.max_outer_iter} outer iterations"

        for it in range(cfg.max_outer_iter):
            residual = fb_residual(K, omega, p, u=u)
            speed = self.velocity(residual)
            scale = max(abs(residual.mean_curvature), 1e-300)
            max_res = float(np.max(np.abs(speed[residual.interior]), initial=0.0)) / scale
            logger.debug(f"Descent step {it}: total {terms.total:.8g}, max residual {max_res:.4g}")
            if max_res < cfg.tol_fb_residual and change < cfg.tol_energy_stall:
                trace.append(TraceRow(it, *terms, max_res, 0.0))
                converged = True
                message = "free boundary residual and energy change below tolerance"
                break

            displacement = dt * extend_to_nodes(self.grid, residual.points, speed, residual.loop)
            peak = float(np.max(np.abs(displacement)))
            if peak > cfg.move_cap_cells * h:
                displacement *= cfg.move_cap_cells * h / peak

            step = 1.0
            trial = None
            for _ in range(cfg.max_backtracks + 1):
                moved = move_interface(phi, step * displacement)
                if not np.any(moved[K.phi < 0] < 0):
                    raise DetachedDomainError("shape update would leave K uncovered")
                candidate = self.redistanced(moved)
                try:
                    candidate_terms, candidate_u = evaluate(K, candidate, p, cfg.solver)
                except ConvergenceError as e:
                    logger.warning(f"Inner solve failed during line search: {str(e)}")
                    candidate_terms = None
                if candidate_terms is not None and candidate_terms.total < terms.total:
                    trial = (candidate.phi, candidate, candidate_terms, candidate_u)
                    break
                backtracks += 1
                step *= 0.5

            trace.append(TraceRow(it, *terms, max_res, step if trial else 0.0))
            if trial is None:
                change = 0.0
                converged = max_res < cfg.tol_fb_residual
                message = (
                    "line search stalled with the residual below tolerance" if converged
                    else f"line search failed after {cfg.max_backtracks} halvings"
                )
                logger.warning(f"Descent line search stalled at step {it} (max residual {max_res:.4g})")
                break

            phi, omega, new_terms, u = trial
            change = (terms.total - new_terms.total) / max(abs(new_terms.total), 1e-300)
            terms = new_terms
            logger.info(f"Descent step {it} accepted: total {terms.total:.8g} (step {step:.3g})")

        final = fb_residual(K, omega, p, u=u)
        topology_changed = outer_loops(omega) > 1
        if topology_changed:
            converged = False
            message = "free boundary split into several components"
            logger.warning("Descent produced a disconnected domain")
        clearance = contour_distance(omega, K)
        config = cfg.to_dict()
        config.update({"clearance": clearance, "h": h})
        return MinimizerReport(
            omega, u, terms, final, trace, converged, topology_changed, backtracks, message, config
        )


def minimize(cfg: MinimizeConfig, K: Optional[Region] = None, init: Optional[Region] = None) -> MinimizerReport:
    """Descend from ``init`` (or the configured init shape) to a critical domain.

    A stalled line search ends the run with a non-converged report.

    Raises:
        PreconditionError: If init does not contain K with the required clearance
        DetachedDomainError: If a step would leave K uncovered
        ShapeSpecError: If a configured shape is invalid
    """
    grid = K.grid if K is not None else cfg.grid
    if K is None:
        K = rasterize(parse_shape_spec(cfg.k), grid)
    if init is None:
        init = rasterize(parse_shape_spec(cfg.init), grid)
    report = ShapeDescent(cfg, K, init).run()
    logger.info(
        f"Descent p={cfg.p}: {'converged' if report.converged else 'not converged'} after "
        f"{len(report.trace)} steps, total energy {report.energy.total:.8g}"
    )
    return report
