"""
Pointwise q-Laplacians of grid fields and the sign check for convex rings.

The q-Laplacian is taken with the factor q in front,
``q |Du|^(q-2) Lap u + q (q-2) |Du|^(q-4) Lap_inf u`` with
``Lap_inf u = <D^2u Du, Du>``. Only signs are compared, so the factor never
changes a verdict; reported magnitudes carry it.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import PreconditionError
from ..geomlab.hull import convexity_deficit
from ..grid_core.grid import ScalarField, gradient, hessian
from ..reporting import Measured, Report
from ..verify.tolerances import get_tolerance
from .solver import Ring

logger = logging.getLogger(__name__)

INTERIOR_CELLS = 3
CONVEX_DEFICIT = 1e-2
NORMALIZATION = "q-Laplacian includes the factor q"


def interior_nodes(ring: Ring, cells: int = INTERIOR_CELLS) -> np.ndarray:
    """Nodes at least ``cells`` grid spacings away from both boundaries of the ring."""
    h = ring.grid.h
    return (ring.inner.phi > cells * h) & (ring.outer.phi < -cells * h)


def derivatives(u: ScalarField) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(|Du|, Lap u, Lap_inf u, |D^2u|_F)`` per node."""
    g = gradient(u)
    hess = hessian(u)
    norm = np.linalg.norm(g, axis=-1)
    lap = hess[..., 0, 0] + hess[..., 1, 1]
    lap_inf = np.einsum("...i,...ij,...j->...", g, hess, g)
    frob = np.sqrt(np.einsum("...ij,...ij->...", hess, hess))
    return norm, lap, lap_inf, frob


def q_laplacian(u: ScalarField, q: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pointwise q-Laplacian, its natural scale ``q |Du|^(q-2) |D^2u|_F`` and |Du|."""
    norm, lap, lap_inf, frob = derivatives(u)
    safe = np.maximum(norm, 1e-300)
    values = q * safe ** (q - 2.0) * lap + q * (q - 2.0) * safe ** (q - 4.0) * lap_inf
    scale = q * safe ** (q - 2.0) * frob
    return values, scale, norm


def require_convex_ring(ring: Ring) -> None:
    for name, region in (("inner", ring.inner), ("outer", ring.outer)):
        deficit = convexity_deficit(region)
        if deficit > CONVEX_DEFICIT:
            raise PreconditionError(f"{name} body of the ring is not convex (deficit {deficit:.3g})")


def q_laplacian_sign_check(
    u: ScalarField,
    p: float,
    q: float,
    ring: Ring,
    tol: Optional[float] = None,
    eps: Optional[float] = None,
) -> Report:
    """Sign of the q-Laplacian of a p-capacitary potential of a convex ring.

    Nonpositive for q <= p, nonnegative for q >= p, zero at q = p. Values are
    divided by their natural scale before comparison with ``tol``.

    Raises:
        PreconditionError: If q <= 1 or either body of the ring is not convex
    """
    if not q > 1:
        raise PreconditionError(f"q must exceed 1, got {q}")
    require_convex_ring(ring)
    tol = get_tolerance("q_laplacian") if tol is None else tol
    eps = 1e-6 / u.grid.h if eps is None else eps

    values, scale, norm = q_laplacian(u, q)
    nodes = interior_nodes(ring) & (norm > eps)
    if not nodes.any():
        raise PreconditionError("no interior ring node with nonvanishing gradient")
    relative = values[nodes] / scale[nodes]
    if abs(q - p) < 1e-12:
        violation = float(np.max(np.abs(relative)))
        expected = "zero"
    elif q < p:
        violation = float(np.max(relative))
        expected = "nonpositive"
    else:
        violation = float(np.max(-relative))
        expected = "nonnegative"
    logger.info(f"q-Laplacian check p={p} q={q}: expected {expected}, worst relative value {violation:.3g}")
    return Report.judge(
        "q_laplacian_sign",
        "the q-Laplacian of the p-capacitary potential of a convex ring is nonpositive for q <= p "
        "and nonnegative for q >= p",
        violation,
        tol,
        values={
            "min_relative": Measured(float(np.min(relative))),
            "max_relative": Measured(float(np.max(relative))),
            "nodes": Measured(float(nodes.sum()), "count"),
        },
        metadata={"p": p, "q": q, "n": u.grid.n, "R": u.grid.radius, "expected_sign": expected,
                  "normalization": NORMALIZATION},
    )
