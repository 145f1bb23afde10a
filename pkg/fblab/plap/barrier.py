"""
Barriers f(w) built from a harmonic potential w of a convex ring.

For 1 < p < 2 the reparametrization

    f(t) = c * int_0^t exp(-k * int_tau^1 zeta1(s) ds) dtau,   k = (2 - p) / (p - 1)

turns w into a p-subsolution as soon as zeta1 dominates |Dw|^-4 Lap_inf w as a
function of w. For p >= 2 the identity already works.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import cumulative_simpson, trapezoid

from ..errors import PreconditionError
from ..grid_core.grid import ScalarField
from ..reporting import Measured, Report
from ..verify.tolerances import get_tolerance
from .laplacians import derivatives, interior_nodes, require_convex_ring
from .solver import Ring

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 4097
ENVELOPE_BINS = 64
SAFETY_FACTOR = 1.1
ANCHOR = "the p-Laplacian of f(w) is nonnegative for the constructed barrier f and harmonic w"


@dataclass(frozen=True, eq=False)
class BarrierProfile:
    t: np.ndarray
    zeta1: np.ndarray
    f: np.ndarray
    p: float

    def __post_init__(self):
        if self.t[0] != 0.0 or self.t[-1] != 1.0 or np.any(np.diff(self.t) <= 0):
            raise PreconditionError("barrier samples must partition [0, 1]")
        if np.any(self.zeta1 < 0):
            raise PreconditionError("zeta1 must be nonnegative")
        if abs(self.f[0]) > 1e-12 or abs(self.f[-1] - 1.0) > 1e-12:
            raise PreconditionError("barrier must satisfy f(0) = 0 and f(1) = 1")
        if np.any(np.diff(self.f) <= 0):
            raise PreconditionError("barrier must be strictly increasing")

    def derivatives(self, w: np.ndarray):
        """f'(w) and f''(w) by interpolation of sampled differences."""
        first = np.gradient(self.f, self.t)
        second = np.gradient(first, self.t)
        return np.interp(w, self.t, first), np.interp(w, self.t, second)

    def __call__(self, w: np.ndarray) -> np.ndarray:
        return np.interp(w, self.t, self.f)


def construct_barrier(
    zeta1: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]],
    p: float,
    t: Optional[np.ndarray] = None,
) -> BarrierProfile:
    """Sample the barrier for a nonnegative ``zeta1`` (array on ``t`` or a callable).

    Raises:
        PreconditionError: If p <= 1, zeta1 is negative or has no finite integral
    """
    if not p > 1:
        raise PreconditionError(f"p must exceed 1, got {p}")
    if callable(zeta1):
        t = np.linspace(0.0, 1.0, DEFAULT_SAMPLES) if t is None else np.asarray(t, dtype=float)
        zeta = np.broadcast_to(np.asarray(zeta1(t), dtype=float), t.shape).copy()
    else:
        zeta = np.asarray(zeta1, dtype=float)
        t = np.linspace(0.0, 1.0, len(zeta)) if t is None else np.asarray(t, dtype=float)
    if zeta.shape != t.shape:
        raise PreconditionError("zeta1 and t must have the same length")
    total = trapezoid(zeta, t)
    if not np.all(np.isfinite(zeta)) or not np.isfinite(total):
        raise PreconditionError("zeta1 must have a finite integral")

    if p >= 2:
        return BarrierProfile(t, zeta, t.copy(), p)
    k = (2.0 - p) / (p - 1.0)
    running = cumulative_simpson(zeta, x=t, initial=0.0)
    tail = running[-1] - running
    f = cumulative_simpson(np.exp(-k * tail), x=t, initial=0.0)
    return BarrierProfile(t, zeta, f / f[-1], p)


def fit_envelope(w: ScalarField, ring: Ring, bins: int = ENVELOPE_BINS) -> np.ndarray:
    """Staircase upper envelope of |Dw|^-4 |Lap_inf w| over w-bins, times a safety factor.

    Empty bins borrow from their neighbours; the result is the smallest
    nondecreasing profile that dominates the bin maxima.
    """
    norm, _, lap_inf, _ = derivatives(w)
    nodes = interior_nodes(ring)
    ratio = np.abs(lap_inf[nodes]) / norm[nodes] ** 4
    index = np.clip((w.values[nodes] * bins).astype(int), 0, bins - 1)
    peaks = np.full(bins, -np.inf)
    np.maximum.at(peaks, index, ratio)
    filled = np.isfinite(peaks)
    if not filled.any():
        raise PreconditionError("no interior node to fit the envelope on")
    centers = np.arange(bins)
    peaks = np.interp(centers, centers[filled], peaks[filled])
    return SAFETY_FACTOR * np.maximum.accumulate(peaks)


def envelope_profile(envelope: np.ndarray, t: np.ndarray) -> np.ndarray:
    bins = len(envelope)
    return envelope[np.clip((t * bins).astype(int), 0, bins - 1)]


def p_laplacian_of_composition(w: ScalarField, barrier: BarrierProfile, p: float):
    """Pointwise p-Laplacian of f(w) by the chain rule, and its natural scale."""
    norm, lap, lap_inf, frob = derivatives(w)
    first, second = barrier.derivatives(np.clip(w.values, 0.0, 1.0))
    grad_v = first * norm
    lap_v = first * lap + second * norm ** 2
    lap_inf_v = first ** 3 * lap_inf + first ** 2 * second * norm ** 4
    safe = np.maximum(grad_v, 1e-300)
    values = p * safe ** (p - 2.0) * lap_v + p * (p - 2.0) * safe ** (p - 4.0) * lap_inf_v
    scale = p * safe ** (p - 2.0) * (np.abs(first) * frob + np.abs(second) * norm ** 2)
    return values, scale


def barrier_subsolution_check(
    w: ScalarField,
    f: Optional[BarrierProfile],
    p: float,
    ring: Ring,
    tol: Optional[float] = None,
    eps: Optional[float] = None,
) -> Report:
    """Check that f(w) is a p-subsolution and 1 - f(w) a p-supersolution in the ring.

    With ``f`` None the barrier is constructed from the fitted envelope.

    Raises:
        PreconditionError: If |Dw| falls below ``eps`` inside the ring or the ring is not convex
    """
    require_convex_ring(ring)
    tol = get_tolerance("barrier") if tol is None else tol
    eps = 1e-6 / w.grid.h if eps is None else eps
    nodes = interior_nodes(ring)
    norm = derivatives(w)[0]
    if not nodes.any():
        raise PreconditionError("ring has no interior nodes")
    if np.min(norm[nodes]) < eps:
        raise PreconditionError(f"gradient of w drops below {eps:.3g} inside the ring")

    envelope = None
    if f is None:
        envelope = fit_envelope(w, ring)
        t = np.linspace(0.0, 1.0, DEFAULT_SAMPLES)
        f = construct_barrier(envelope_profile(envelope, t), p, t)

    values, scale = p_laplacian_of_composition(w, f, p)
    relative = values[nodes] / np.maximum(scale[nodes], 1e-300)
    worst = float(np.min(relative))
    logger.info(f"Barrier check p={p}: min relative p-Laplacian {worst:.3g}")
    report_values = {
        "min_relative": Measured(worst),
        "supersolution_max_relative": Measured(-worst),
        "min_p_laplacian": Measured(float(np.min(values[nodes]))),
    }
    if envelope is not None:
        report_values["envelope_max"] = Measured(float(np.max(envelope)))
    return Report.judge(
        "barrier_subsolution",
        ANCHOR,
        -worst,
        tol,
        report_values,
        metadata={"p": p, "n": w.grid.n, "R": w.grid.radius, "normalization": "p-Laplacian includes the factor p"},
    )
