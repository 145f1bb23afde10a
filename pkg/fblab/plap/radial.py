"""
Closed forms for the p-capacitary potential of the annulus a < |x| < rho in R^n.
"""

import math
from typing import Dict, Union

import numpy as np
from scipy.special import gamma

from ..errors import PreconditionError

ArrayLike = Union[float, np.ndarray]


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


def _check(a: float, rho: float, p: float, n: int) -> None:
    if not 0 < a < rho:
        raise PreconditionError(f"need 0 < a < rho, got a={a}, rho={rho}")
    if not p > 1:
        raise PreconditionError(f"p must exceed 1, got {p}")
    if int(n) != n or n < 2:
        raise PreconditionError(f"dimension must be an integer >= 2, got {n}")


def exponent(p: float, n: int) -> float:
    return (p - n) / (p - 1.0)


def _is_critical(p: float, n: int) -> bool:
    return abs(p - n) < 1e-12


def _out(values: np.ndarray, like) -> ArrayLike:
    return float(values) if np.ndim(like) == 0 else values


def radial_potential(a: float, rho: float, p: float, n: int, r: ArrayLike) -> ArrayLike:
    """u(r), equal to 1 at r = a and 0 at r = rho."""
    _check(a, rho, p, n)
    radii = np.asarray(r, dtype=float)
    if np.any(radii < a) or np.any(radii > rho):
        raise PreconditionError(f"radius must lie in [{a}, {rho}]")
    if _is_critical(p, n):
        values = np.log(rho / radii) / math.log(rho / a)
    else:
        beta = exponent(p, n)
        values = (radii ** beta - rho ** beta) / (a ** beta - rho ** beta)
    return _out(values, r)


def radial_derivative(a: float, rho: float, p: float, n: int, r: ArrayLike) -> ArrayLike:
    """u'(r) (negative: the potential decreases outward)."""
    _check(a, rho, p, n)
    radii = np.asarray(r, dtype=float)
    if _is_critical(p, n):
        values = -1.0 / (radii * math.log(rho / a))
    else:
        beta = exponent(p, n)
        values = beta * radii ** (beta - 1.0) / (a ** beta - rho ** beta)
    return _out(values, r)


def radial_capacity(a: float, rho: float, p: float, n: int) -> float:
    """p-Dirichlet energy of the annulus potential."""
    _check(a, rho, p, n)
    if _is_critical(p, n):
        return sphere_area(n) * math.log(rho / a) ** (1.0 - n)
    beta = exponent(p, n)
    return sphere_area(n) * abs(beta) ** (p - 1.0) * abs(a ** beta - rho ** beta) ** (1.0 - p)


def radial_energy(a: float, rho: float, p: float, n: int) -> float:
    """Capacity plus the area of the outer sphere."""
    return radial_capacity(a, rho, p, n) + sphere_area(n) * rho ** (n - 1)


def radial_extension_terms(a: float, r1: float, r2: float, p: float, n: int = 2) -> Dict[str, float]:
    """Exact energy gap, annulus energy and boundary flux term for concentric balls.

    With u1 the potential of (a, r1) and u2 that of (a, r2)::

        A = Cap(a, r1) - Cap(a, r2)
        B = (p - 1) * energy of u2 on r1 < |x| < r2
        C = p |S_r1| u2(r1) (|u1'(r1)|^(p-1) - |u2'(r1)|^(p-1))
    """
    if not r1 < r2:
        raise PreconditionError(f"need r1 < r2, got {r1}, {r2}")
    _check(a, r1, p, n)
    if _is_critical(p, n):
        outer = math.log(r2 / r1) / math.log(r2 / a) ** n
    else:
        beta = exponent(p, n)
        outer = abs(beta) ** (p - 1.0) * abs(r2 ** beta - r1 ** beta) / abs(a ** beta - r2 ** beta) ** p
    big_a = radial_capacity(a, r1, p, n) - radial_capacity(a, r2, p, n)
    big_b = (p - 1.0) * sphere_area(n) * outer
    slope_1 = abs(radial_derivative(a, r1, p, n, r1))
    slope_2 = abs(radial_derivative(a, r2, p, n, r1))
    big_c = p * sphere_area(n) * r1 ** (n - 1) * radial_potential(a, r2, p, n, r1) * (
        slope_1 ** (p - 1.0) - slope_2 ** (p - 1.0)
    )
    return {"A": big_a, "B": big_b, "C": big_c}
