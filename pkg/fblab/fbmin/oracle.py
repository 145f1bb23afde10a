"""
Radial oracle: the best ball around a ball.

For K = B(0, a) and Omega = B(0, rho) the total energy is
E(rho) = Cap_p(a, rho) + |S^{n-1}| rho^{n-1}. Its critical point is the
radius where the free boundary condition (p - 1)|u'(rho)|^p = (n - 1)/rho
holds, and that is the root searched here.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import ConvergenceError, PreconditionError
from ..plap.radial import radial_derivative, radial_energy

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 60
IDENTITY_TOL = 1e-6


def _validate(a: float, p: float, n: int) -> None:
    if not a > 0:
        raise PreconditionError(f"inner radius must be positive, got a={a}")
    if not p > 1:
        raise PreconditionError(f"p must exceed 1, got {p}")
    if int(n) != n or n < 2:
        raise PreconditionError(f"dimension must be an integer >= 2, got {n}")


def fb_identity_residual(a: float, rho: float, p: float, n: int) -> float:
    """(p - 1)|u'(rho)|^p - (n - 1)/rho for the annulus potential; zero at the optimum."""
    slope = abs(radial_derivative(a, rho, p, n, rho))
    return (p - 1.0) * slope ** p - (n - 1.0) / rho


def radial_optimal_radius(a: float, p: float, n: int = 2) -> Tuple[float, float]:
    """Return ``(rho_star, E(rho_star))``.

    The bracket starts at 2a and doubles until the free boundary residual
    changes sign; near a the residual is always positive.

    Raises:
        PreconditionError: If a <= 0, p <= 1 or n < 2
        ConvergenceError: If no sign change is found or the root misses the identity
    """
    _validate(a, p, n)
    low = a * (1.0 + 1e-9)
    high = 2.0 * a
    for _ in range(MAX_DOUBLINGS):
        if fb_identity_residual(a, high, p, n) < 0:
            break
        low, high = high, 2.0 * high
    else:
        raise ConvergenceError(f"no interior minimum of the radial energy below rho={high:.3g}")

    rho = brentq(lambda r: fb_identity_residual(a, r, p, n), low, high, xtol=1e-14 * high, rtol=4 * np.finfo(float).eps, maxiter=500)
    relative = abs(fb_identity_residual(a, rho, p, n)) * rho / (n - 1.0)
    if relative > IDENTITY_TOL:
        raise ConvergenceError(
            f"free boundary identity off by {relative:.3g} at rho={rho:.12g}",
            last_iterate=rho,
            residual=relative,
        )
    energy = radial_energy(a, rho, p, n)
    logger.info(f"Radial optimum a={a} p={p} n={n}: rho*={rho:.10g}, E={energy:.10g}")
    return float(rho), float(energy)


def radial_energy_sweep(a: float, p: float, n: int, rhos: Sequence[float]) -> np.ndarray:
    """Rows ``(rho, E(rho))`` for each radius beyond ``a``."""
    _validate(a, p, n)
    rhos = np.asarray(rhos, dtype=float)
    if np.any(rhos <= a):
        raise PreconditionError(f"sweep radii must exceed a={a}")
    return np.array([(rho, radial_energy(a, rho, p, n)) for rho in rhos]).reshape(-1, 2)
