"""
Property suites: every check names the statement it tests, its tolerance and
its margin, and a failing or crashing check never stops the others.
"""

import logging
import re
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np
import shapely
import yaml

from ..errors import ConfigError
from ..fbmin.descent import MinimizeConfig, MinimizerReport, minimize
from ..fbmin.energy import BOX_CELLS, fb_graph_curvature_check, hull_free_boundary_inequality
from ..fbmin.oracle import radial_optimal_radius
from ..file_handler import FileHandler
from ..geomlab.hull import convex_hull, convexity_deficit
from ..grid_core.grid import Grid, ScalarField
from ..grid_core.region import (
    Region,
    containment_gap,
    hausdorff_distance,
    loops_hausdorff,
    rasterize,
    rasterize_geometry,
)
from ..grid_core.shapes import Disk, Square, parse_shape_spec
from ..plap.barrier import barrier_subsolution_check, construct_barrier
from ..plap.extension import extension_inequality_report
from ..plap.hopf import gradient_convexity_check, hopf_growth_fit
from ..plap.laplacians import q_laplacian_sign_check
from ..plap.radial import radial_derivative, radial_extension_terms
from ..plap.solver import PLapConfig, Ring, comparison_check, solve_p_capacitary
from ..reporting import Measured, Report
from .convergence import verify_convergence
from .lab import capsule_checks, matrix_trials
from .tolerances import get_tolerance

logger = logging.getLogger(__name__)

T = TypeVar("T")

LEVELS = (0.25, 0.5, 0.75)
RADIAL_TRIPLES = (
    (1.0, 2.0, 3.0),
    (1.0, 1.5, 2.5),
    (0.8, 2.0, 3.0),
    (1.0, 2.5, 3.2),
    (0.6, 1.2, 2.4),
)
RANDOM_TRIPLES = 5
HOPF_POINTS = 8
HOPF_RADII_CELLS = (2.0, 3.0, 4.0, 6.0, 8.0)

MAIN_ANCHOR = "for convex K the minimizer is unique and its positivity set and level sets are convex"
INCLUSION_ANCHOR = (
    "the positivity set for K lies inside the one for the convex hull of K, "
    "and stays away from the outer ball once it is large enough"
)
ANALYSIS_ANCHOR = "extension, q-Laplacian, boundary growth, barrier and free boundary graph estimates"


def ordered_map(func: Callable[..., T], items: Sequence, threads: int = 1) -> List[T]:
    """Apply ``func`` to every item; results keep the order of ``items``."""
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    results: List[Optional[T]] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        future_to_index = {executor.submit(func, item): k for k, item in enumerate(items)}
        for future in as_completed(future_to_index):
            results[future_to_index[future]] = future.result()
    return results


def isolated(check: str, anchor: str, func: Callable[[], Report]) -> Report:
    """Run one check; any exception becomes a FAILED report carrying the error text."""
    try:
        return func()
    except Exception as e:
        logger.error(f"Check {check} failed with {type(e).__name__}: {str(e)}")
        return Report.failed(check, anchor, f"{type(e).__name__}: {str(e)}")


def slug(spec: str) -> str:
    """File-system safe form of a shape spec."""
    return re.sub(r"[^A-Za-z0-9.]+", "_", spec).strip("_")


def _size(region: Region) -> float:
    return float(np.sqrt(region.area / np.pi))


def initializations(K: Region) -> Dict[str, Region]:
    """Tight, loose and off-center starting domains around K."""
    grid = K.grid
    s = _size(K)
    x, y = grid.node_coords()
    tight = K.offset(max(0.2 * s, 4.0 * grid.h))
    loose = K.offset(1.2 * s)
    bump = Disk(1.2 * s, (0.6 * s, 0.3 * s)).signed_distance(x, y)
    asymmetric = Region.from_phi(grid, np.minimum(K.phi - 0.3 * s, bump))
    return {"tight": tight, "loose": loose, "asymmetric": asymmetric}


def level_set(u: ScalarField, t: float) -> Region:
    return Region.from_phi(u.grid, t - u.values)


def _descent_config(p: float, grid: Grid, descent: Optional[Dict[str, Any]]) -> MinimizeConfig:
    return MinimizeConfig(p=p, n=grid.n, radius=grid.radius, **dict(descent or {}))


def _run_report(label: str, run: MinimizerReport) -> Report:
    report = run.to_report()
    report.metadata["start"] = label
    if not run.converged:
        report.metadata["trace"] = run.trace_rows()
    return report


def _write_run(artifacts: Optional[FileHandler], prefix: str, run: MinimizerReport) -> None:
    if artifacts is None:
        return
    artifacts.write_contours(run.omega.contours, f"{prefix}/contour.csv")
    artifacts.write_rows(
        f"{prefix}/trace.csv", ("iter", "dirichlet", "perimeter", "total", "max_residual", "step"), run.trace_rows()
    )


def verify_main_theorem(
    K_list: Sequence[str],
    p_list: Sequence[float],
    grid: Grid,
    descent: Optional[Dict[str, Any]] = None,
    tolerances: Optional[Dict[str, float]] = None,
    threads: int = 1,
    artifacts: Optional[FileHandler] = None,
) -> Report:
    """Convexity, uniqueness over three starts and convex level sets, per (K, p).

    Non-convex K skip the convexity checks and run the inclusion check instead.
    """
    h = grid.h
    tol_convex = get_tolerance("convexity", h, tolerances)
    tol_hausdorff = get_tolerance("hausdorff", h, tolerances)
    tol_clearance = get_tolerance("clearance", h, tolerances)
    cases = []
    for spec in K_list:
        for p in p_list:
            cases.append((spec, float(p)))

    def one_case(case) -> Report:
        spec, p = case
        shape = parse_shape_spec(spec)
        K = rasterize(shape, grid)
        meta = {"K": spec, "p": p, "n": grid.n, "R": grid.radius}
        if convexity_deficit(K) > tol_convex:
            skipped = Report.skipped("convexity", MAIN_ANCHOR, "K is not convex", meta)
            inclusion = verify_inclusion_and_bounded(spec, p, grid, descent, tolerances, 1, artifacts)
            return Report.combine(f"main_theorem[{spec}, p={p}]", MAIN_ANCHOR, [skipped, inclusion], meta)

        cfg = _descent_config(p, grid, descent)
        starts = initializations(K)
        labels = list(starts)
        runs = ordered_map(lambda label: minimize(cfg, K=K, init=starts[label]), labels, threads)
        details = [_run_report(label, run) for label, run in zip(labels, runs)]
        for label, run in zip(labels, runs):
            _write_run(artifacts, f"main_theorem/{slug(spec)}/p={p}/{label}", run)

        for label, run in zip(labels, runs):
            deficit = convexity_deficit(run.omega)
            details.append(Report.judge(
                "convexity", "the positivity set of the minimizer is convex", deficit, tol_convex,
                {"deficit": Measured(deficit)}, {**meta, "start": label},
            ))
        spread = max(hausdorff_distance(a.omega, b.omega) for a, b in zip(runs, runs[1:] + runs[:1]))
        details.append(Report.judge(
            "uniqueness", "minimizers from different starts coincide", spread, tol_hausdorff,
            {"max_hausdorff": Measured(spread, "length")}, meta,
        ))
        u = runs[0].potential
        for t in LEVELS:
            deficit = convexity_deficit(level_set(u, t))
            details.append(Report.judge(
                "level_set_convexity", "level sets of the capacitary potential of a convex ring are convex",
                deficit, tol_convex, {"deficit": Measured(deficit)}, {**meta, "level": t},
            ))
        clearance = min(run.clearance for run in runs)
        details.append(Report.judge(
            "distance_from_K", "the free boundary keeps a positive distance from K",
            tol_clearance - clearance, 0.0, {"clearance": Measured(clearance, "length")}, meta,
        ))
        if isinstance(shape, Disk):
            rho, _ = radial_optimal_radius(shape.r, p, 2)
            target = rasterize(Disk(rho, shape.center), grid)
            error = hausdorff_distance(runs[0].omega, target)
            details.append(Report.judge(
                "radial_oracle", "the minimizer around a disk is the disk of the optimal radius",
                error, tol_hausdorff, {"hausdorff": Measured(error, "length"), "rho_star": Measured(rho, "length")},
                meta,
            ))
        return Report.combine(f"main_theorem[{spec}, p={p}]", MAIN_ANCHOR, details, meta)

    details = [
        isolated(f"main_theorem[{spec}, p={p}]", MAIN_ANCHOR, lambda case=(spec, p): one_case(case))
        for spec, p in cases
    ]
    return Report.combine("main_theorem", MAIN_ANCHOR, details, {"n": grid.n, "R": grid.radius})


def verify_inclusion_and_bounded(
    K_spec: str,
    p: float,
    grid: Grid,
    descent: Optional[Dict[str, Any]] = None,
    tolerances: Optional[Dict[str, float]] = None,
    threads: int = 1,
    artifacts: Optional[FileHandler] = None,
) -> Report:
    """Omega_K inside Omega_cov(K), off the box, and unchanged when the box doubles."""
    h = grid.h
    shape = parse_shape_spec(K_spec)
    K = rasterize(shape, grid)
    hull = convex_hull(K)
    big_grid = Grid(2 * grid.n, 2.0 * grid.radius)
    K_big = rasterize(shape, big_grid)
    meta = {"K": K_spec, "p": p, "n": grid.n, "R": grid.radius}

    jobs = {
        "K": (K, K.offset(1.2 * _size(K))),
        "hull": (hull, hull.offset(1.2 * _size(hull))),
        "K_double_box": (K_big, K_big.offset(1.2 * _size(K_big))),
    }
    labels = list(jobs)

    def run(label):
        body, start = jobs[label]
        return minimize(_descent_config(p, body.grid, descent), K=body, init=start)

    runs = dict(zip(labels, ordered_map(run, labels, threads)))
    details = [_run_report(label, runs[label]) for label in labels]
    for label in labels:
        _write_run(artifacts, f"inclusion/{slug(K_spec)}/p={p}/{label}", runs[label])

    omega_K, omega_hull = runs["K"].omega, runs["hull"].omega
    gap = containment_gap(omega_hull, omega_K)
    details.append(Report.judge(
        "inclusion", "the positivity set for K lies inside the one for its convex hull",
        gap, get_tolerance("inclusion", h, tolerances), {"gap": Measured(gap, "length")}, meta,
    ))
    hull_deficit = convexity_deficit(omega_hull)
    details.append(Report.judge(
        "hull_domain_convexity", "the positivity set for a convex body is convex",
        hull_deficit, get_tolerance("convexity", h, tolerances), {"deficit": Measured(hull_deficit)}, meta,
    ))
    box_gap = float(np.min(grid.box_distance(np.vstack(omega_K.contours))))
    details.append(Report.judge(
        "bounded", "the positivity set stays away from the outer boundary",
        BOX_CELLS * h - box_gap, 0.0, {"distance_to_box": Measured(box_gap, "length")}, meta,
    ))
    shift = loops_hausdorff(omega_K, runs["K_double_box"].omega)
    details.append(Report.judge(
        "box_independence", "doubling the outer box leaves the positivity set unchanged",
        shift, get_tolerance("boundedness", h, tolerances), {"hausdorff": Measured(shift, "length")}, meta,
    ))
    report = Report.combine(f"inclusion_and_bounded[{K_spec}, p={p}]", INCLUSION_ANCHOR, details, meta)
    report.values["hausdorff_K_vs_hull"] = Measured(hausdorff_distance(omega_K, omega_hull), "length")
    return report


def _radial_ring(grid: Grid, a: float, rho: float) -> Ring:
    return Ring(rasterize(Disk(a), grid), rasterize(Disk(rho), grid))


def _random_triple(rng: np.random.Generator, grid: Grid):
    angles = 2.0 * np.pi * (np.arange(7) + rng.uniform(-0.3, 0.3, 7)) / 7
    radii = rng.uniform(1.3, 1.8, 7)
    points = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
    inner = shapely.MultiPoint(points).convex_hull
    # Angular gaps stay below 90 degrees, so the hull contains the disk of radius 0.9.
    outer = inner.buffer(float(rng.uniform(0.5, 1.0)), quad_segs=64)
    return rasterize(Disk(0.5), grid), rasterize_geometry(inner, grid), rasterize_geometry(outer, grid)


def verify_analysis_lemmas(
    grid: Grid,
    p_list: Sequence[float],
    descent: Optional[Dict[str, Any]] = None,
    tolerances: Optional[Dict[str, float]] = None,
    seed: int = 0,
    threads: int = 1,
) -> Report:
    """Extension inequality, q-Laplacian signs, boundary growth, barriers and the free boundary graph."""
    h = grid.h
    rng = np.random.default_rng(seed)
    random_triples = [_random_triple(rng, grid) for _ in range(RANDOM_TRIPLES)]
    tasks: List[tuple] = []

    for p in map(float, p_list):
        cfg = PLapConfig(p=p)
        for a, r1, r2 in RADIAL_TRIPLES:
            tasks.append((f"extension_radial[p={p}, {a}, {r1}, {r2}]",
                          lambda p=p, cfg=cfg, t=(a, r1, r2): _radial_extension(grid, p, cfg, t, tolerances)))
        for k, (K, omega1, omega2) in enumerate(random_triples):
            tasks.append((f"extension_random[p={p}, {k}]",
                          lambda p=p, cfg=cfg, t=(K, omega1, omega2): extension_inequality_report(
                              *t, p, cfg, smooth=False)))
        tasks.append((f"q_laplacian[p={p}]", lambda p=p, cfg=cfg: _q_laplacian_checks(grid, p, cfg, tolerances)))
        tasks.append((f"hopf[p={p}]", lambda p=p, cfg=cfg: _hopf_checks(grid, p, cfg, tolerances)))
        tasks.append((f"barrier[p={p}]", lambda p=p: _barrier_check(grid, p, tolerances)))
        tasks.append((f"gradient_convexity[p={p}]", lambda p=p, cfg=cfg: _gradient_convexity(grid, p, cfg, tolerances)))
        tasks.append((f"comparison[p={p}]", lambda cfg=cfg: comparison_check(
            rasterize(Disk(0.8), grid), rasterize(Disk(1.0), grid), rasterize(Disk(2.5), grid), cfg,
            get_tolerance("comparison", h, tolerances))))
        tasks.append((f"free_boundary_graph[p={p}]", lambda p=p: _free_boundary_checks(grid, p, descent, tolerances)))

    tasks.append(("barrier_closed_form", lambda: _barrier_closed_form(tolerances)))
    tasks.append(("singular_set_dimension", lambda: Report.skipped(
        "singular_set_dimension", "the singular part of the free boundary has small Hausdorff dimension",
        "no singular set in two dimensions")))

    details = ordered_map(lambda task: isolated(task[0], ANALYSIS_ANCHOR, task[1]), tasks, threads)
    for (name, _), report in zip(tasks, details):
        report.metadata.setdefault("task", name)
    return Report.combine("analysis_lemmas", ANALYSIS_ANCHOR, details,
                          {"n": grid.n, "R": grid.radius, "p": [float(p) for p in p_list], "seed": seed})


def _radial_extension(grid: Grid, p: float, cfg: PLapConfig, triple, tolerances) -> Report:
    a, r1, r2 = triple
    K, omega1, omega2 = (rasterize(Disk(r), grid) for r in triple)
    report = extension_inequality_report(K, omega1, omega2, p, cfg)
    exact = radial_extension_terms(a, r1, r2, p, 2)
    errors = {name: abs(report.values[name].value - exact[name]) / abs(exact[name]) for name in ("A", "B", "C")}
    closed = Report.judge(
        "extension_closed_form", "extension terms of concentric balls match their closed forms",
        max(errors.values()), get_tolerance("extension_closed_form", grid.h, tolerances),
        {f"{name}_exact": Measured(value, "energy") for name, value in exact.items()},
        {"p": p, "a": a, "r1": r1, "r2": r2},
    )
    return Report.combine("extension_radial", report.anchor, [report, closed], {"p": p, "a": a, "r1": r1, "r2": r2})


def _q_laplacian_checks(grid: Grid, p: float, cfg: PLapConfig, tolerances) -> Report:
    tol = get_tolerance("q_laplacian", grid.h, tolerances)
    rings = {
        "radial": _radial_ring(grid, 1.0, 2.5),
        "square": Ring(rasterize(Square(1.0), grid), rasterize(Square(3.0), grid)),
    }
    details = []
    for name, ring in rings.items():
        u = solve_p_capacitary(ring.inner, ring.outer, cfg)
        for q in (0.5 * p + 0.5, p, 2.0 * p):
            report = q_laplacian_sign_check(u, p, q, ring, tol)
            report.metadata["ring"] = name
            details.append(report)
    return Report.combine("q_laplacian", details[0].anchor, details, {"p": p})


def _hopf_checks(grid: Grid, p: float, cfg: PLapConfig, tolerances) -> Report:
    a, rho = 1.0, 2.5
    ring = _radial_ring(grid, a, rho)
    u = solve_p_capacitary(ring.inner, ring.outer, cfg)
    expected = abs(radial_derivative(a, rho, p, 2, rho))
    radii = [c * grid.h for c in HOPF_RADII_CELLS]
    tol = get_tolerance("hopf_slope", grid.h, tolerances)
    details = []
    for k in range(HOPF_POINTS):
        theta = 2.0 * np.pi * k / HOPF_POINTS
        point = rho * np.array([np.cos(theta), np.sin(theta)])
        details.append(hopf_growth_fit(u, point, radii, "up", expected, tol))
    return Report.combine("hopf", details[0].anchor, details, {"p": p})


def _barrier_check(grid: Grid, p: float, tolerances) -> Report:
    ring = _radial_ring(grid, 1.0, 2.5)
    w = solve_p_capacitary(ring.inner, ring.outer, PLapConfig(p=2.0))
    return barrier_subsolution_check(w, None, p, ring, get_tolerance("barrier", grid.h, tolerances))


def _barrier_closed_form(tolerances) -> Report:
    barrier = construct_barrier(lambda t: np.ones_like(t), 1.5)
    exact = (np.exp(barrier.t) - 1.0) / (np.e - 1.0)
    error = float(np.max(np.abs(barrier.f - exact)))
    return Report.judge(
        "barrier_closed_form", "for zeta1 = 1 and p = 3/2 the barrier is (e^t - 1)/(e - 1)",
        error, get_tolerance("barrier_closed_form", overrides=tolerances),
        {"max_error": Measured(error)}, {"p": 1.5, "samples": len(barrier.t)},
    )


def _gradient_convexity(grid: Grid, p: float, cfg: PLapConfig, tolerances) -> Report:
    K, omega = rasterize(Disk(0.5), grid), rasterize(Square(3.0), grid)
    u = solve_p_capacitary(K, omega, cfg)
    report = gradient_convexity_check(u, [(-1.5, -1.5), (1.5, -1.5)],
                                      tol=get_tolerance("gradient_convexity", grid.h, tolerances))
    report.metadata["p"] = p
    return report


def outer_inequality(run: MinimizerReport, metadata: Dict[str, Any]) -> Report:
    """One-sided free boundary condition where Omega meets the outer boundary.

    The outer boundary is the square box, whose sides have zero curvature, so
    the condition (p - 1)|Du|^p >= 0 holds by construction and the check is
    skipped rather than passed.
    """
    anchor = "on the outer boundary (p - 1)|Du|^p is at least its curvature"
    meta = {**metadata, "box_vertices": int(run.residual.on_box.sum())}
    reason = "the box sides have zero curvature" if run.omega.touches_box() else "the free boundary does not reach the box"
    return Report.skipped("outer_inequality", anchor, reason, meta)


def _free_boundary_checks(grid: Grid, p: float, descent, tolerances) -> Report:
    K = rasterize(Disk(1.0), grid)
    run = minimize(_descent_config(p, grid, descent), K=K, init=K.offset(1.2))
    residual = run.residual
    meta = {"p": p, "n": grid.n, "R": grid.radius}
    details = [
        _run_report("loose", run),
        Report.judge(
            "fb_residual", "(p - 1)|Du|^p equals the curvature of the free boundary",
            residual.max_relative, get_tolerance("fb_residual", grid.h, tolerances),
            {"max_relative": Measured(residual.max_relative)}, meta,
        ),
        outer_inequality(run, meta),
        fb_graph_curvature_check(K, run.omega, p, u=run.potential,
                                 tol=get_tolerance("fb_graph", grid.h, tolerances)),
        hull_free_boundary_inequality(K, run.omega, p, tol=get_tolerance("hull_inequality", grid.h, tolerances)),
    ]
    return Report.combine("free_boundary_graph", details[1].anchor, details, meta)


@dataclass
class CheckSpec:
    check: str
    params: Dict[str, Any] = field(default_factory=dict)


SUITE_KEYS = {"name", "grid", "seed", "threads", "deterministic", "tolerances", "descent", "checks"}


@dataclass
class SuiteSpec:
    """A named list of checks plus the grid, seed and tolerance overrides they share."""
    name: str
    checks: List[CheckSpec]
    n: int = 128
    radius: float = 4.0
    seed: int = 0
    threads: int = 1
    deterministic: bool = True
    tolerances: Dict[str, float] = field(default_factory=dict)
    descent: Dict[str, Any] = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return Grid(self.n, self.radius)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteSpec":
        """Validate and build; unknown keys raise ConfigError naming the key."""
        unknown = set(data) - SUITE_KEYS
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown suite key '{key}'", key=f"suite.{key}")
        grid = dict(data.get("grid") or {})
        for key in grid:
            if key not in ("n", "radius"):
                raise ConfigError(f"unknown grid key '{key}'", key=f"grid.{key}")
        checks = []
        for k, entry in enumerate(data.get("checks") or []):
            entry = dict(entry)
            name = entry.pop("check", None)
            if name not in CHECKS:
                raise ConfigError(f"unknown check '{name}'", key=f"checks.{k}.check")
            checks.append(CheckSpec(name, entry))
        if not checks:
            raise ConfigError("suite lists no checks", key="checks")
        for name in data.get("tolerances") or {}:
            get_tolerance(name)
        spec = cls(
            name=str(data.get("name", "custom")),
            checks=checks,
            n=int(grid.get("n", 128)),
            radius=float(grid.get("radius", 4.0)),
            seed=int(data.get("seed", 0)),
            threads=int(data.get("threads", 1)),
            deterministic=bool(data.get("deterministic", True)),
            tolerances={k: float(v) for k, v in (data.get("tolerances") or {}).items()},
            descent=dict(data.get("descent") or {}),
        )
        if spec.threads < 1:
            raise ConfigError("threads must be at least 1", key="threads")
        return spec

    @classmethod
    def from_yaml(cls, path: str) -> "SuiteSpec":
        if not Path(path).is_file():
            raise ConfigError(f"suite file not found: {path}", key="suite")
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"suite file {path} must hold a mapping", key="suite")
        return cls.from_dict(data)

    @classmethod
    def resolve(cls, name_or_path: str) -> "SuiteSpec":
        """A built-in suite by name, otherwise a YAML file."""
        if name_or_path in BUILTIN_SUITES:
            return cls.from_dict(BUILTIN_SUITES[name_or_path])
        return cls.from_yaml(name_or_path)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "grid": {"n": self.n, "radius": self.radius},
            "seed": self.seed,
            "threads": self.threads,
            "deterministic": self.deterministic,
            "tolerances": dict(self.tolerances),
            "descent": dict(self.descent),
            "checks": [{"check": c.check, **c.params} for c in self.checks],
        }


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _main_theorem(spec: SuiteSpec, params, threads, artifacts) -> Report:
    return verify_main_theorem(_as_list(params.get("K", ["disk:1"])), _as_list(params.get("p", [2.0])), spec.grid,
                               spec.descent, spec.tolerances, threads, artifacts)


def _inclusion(spec: SuiteSpec, params, threads, artifacts) -> Report:
    reports = [
        verify_inclusion_and_bounded(K, float(p), spec.grid, spec.descent, spec.tolerances, threads, artifacts)
        for K in _as_list(params.get("K", ["lshape:2,2,1"]))
        for p in _as_list(params.get("p", [2.0]))
    ]
    return Report.combine("inclusion_and_bounded", INCLUSION_ANCHOR, reports, {"n": spec.n, "R": spec.radius})


def _analysis(spec: SuiteSpec, params, threads, artifacts) -> Report:
    return verify_analysis_lemmas(spec.grid, _as_list(params.get("p", [1.5, 2.0, 3.0])), spec.descent,
                                  spec.tolerances, spec.seed, threads)


def _convergence(spec: SuiteSpec, params, threads, artifacts) -> Report:
    return verify_convergence(_as_list(params.get("p", [2.0])), _as_list(params.get("scales", [0.5, 2.0])),
                              spec.tolerances)


def _matrix_lab(spec: SuiteSpec, params, threads, artifacts) -> Report:
    return matrix_trials(int(params.get("trials", 1000)), int(params.get("seed", spec.seed)), spec.tolerances)


def _capsule_lab(spec: SuiteSpec, params, threads, artifacts) -> Report:
    return capsule_checks(int(params.get("samples", 65)), spec.tolerances)


CHECKS: Dict[str, Callable[..., Report]] = {
    "main_theorem": _main_theorem,
    "inclusion_and_bounded": _inclusion,
    "analysis_lemmas": _analysis,
    "convergence": _convergence,
    "matrix_lab": _matrix_lab,
    "capsule_lab": _capsule_lab,
}

BUILTIN_SUITES: Dict[str, Dict[str, Any]] = {
    "main": {"name": "main", "checks": [{"check": "main_theorem", "K": ["disk:1"], "p": [2.0]}]},
    "convexity": {
        "name": "convexity",
        "checks": [{"check": "main_theorem", "K": ["disk:1", "square:2", "ellipse:1.5,1"], "p": [1.5, 2.0, 3.0]}],
    },
    "inclusion": {
        "name": "inclusion",
        "checks": [{"check": "inclusion_and_bounded", "K": ["lshape:2,2,1", "union(square:1@-0.8,0;square:1@0.8,0)"],
                    "p": [2.0]}],
    },
    "analysis": {"name": "analysis", "checks": [{"check": "analysis_lemmas", "p": [1.5, 2.0, 3.0]}]},
    "convergence": {"name": "convergence", "checks": [{"check": "convergence", "p": [1.5, 2.0, 3.0]}]},
    "lab": {"name": "lab", "checks": [{"check": "matrix_lab", "trials": 1000}, {"check": "capsule_lab"}]},
}


def run_suite(spec: SuiteSpec, artifacts: Optional[FileHandler] = None) -> Report:
    """Run every check of ``spec``; the suite report lists them in spec order.

    With ``deterministic`` set everything runs serially.
    """
    threads = 1 if spec.deterministic else spec.threads
    logger.info(f"Running suite '{spec.name}' with {len(spec.checks)} checks on {spec.n}x{spec.n}")

    def run(item):
        k, check = item
        runner = CHECKS[check.check]
        report = isolated(check.check, "", lambda: runner(spec, check.params, threads, artifacts))
        if report.status.value != "PASSED":
            logger.warning(f"Check {check.check} finished {report.status.value}")
        return report

    details = ordered_map(run, list(enumerate(spec.checks)), threads)
    if artifacts is not None:
        for k, (check, report) in enumerate(zip(spec.checks, details)):
            artifacts.write_report(report, f"{k:02d}_{check.check}/report.json")
    metadata = {"suite": spec.name, "n": spec.n, "R": spec.radius, "seed": spec.seed,
                "deterministic": spec.deterministic, "tolerances": dict(spec.tolerances)}
    return Report.combine(f"suite:{spec.name}", f"property suite '{spec.name}'", details, metadata)
