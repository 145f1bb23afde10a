"""
Analytic capsules: the convex hull of two balls and its lateral surface.

In the half-plane (x, rho) of the axis through the centers, the hull of the
discs B((0, 0), r1) and B((d, 0), r2) is bounded by the common tangent
through T1 = (r1 sin a, r1 cos a) and T2 = (d + r2 sin a, r2 cos a) with
sin a = (r1 - r2) / d. In R^3 the lateral surface is a cone (a cylinder when
r1 = r2) whose mean curvature along a ruling is cos a / rho(s); in the plane
the lateral part is a straight segment of zero curvature.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import PreconditionError
from ..reporting import Measured, Report
from ..verify.tolerances import get_tolerance
from .matrices import LocalGraph, viscosity_mean_curvature

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Capsule:
    r1: float
    r2: float
    d: float

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise PreconditionError("capsule radii must be positive")
        if not self.d > abs(self.r1 - self.r2):
            raise PreconditionError(f"one ball lies inside the other (d={self.d}, r1={self.r1}, r2={self.r2})")

    @property
    def sin_alpha(self) -> float:
        return (self.r1 - self.r2) / self.d

    @property
    def cos_alpha(self) -> float:
        return float(np.sqrt(1.0 - self.sin_alpha ** 2))

    @property
    def normal(self) -> np.ndarray:
        """Outward normal of the lateral line in the (x, rho) half-plane."""
        return np.array([self.sin_alpha, self.cos_alpha])

    @property
    def ruling(self) -> np.ndarray:
        return np.array([self.cos_alpha, -self.sin_alpha])

    @property
    def tangency(self) -> Tuple[np.ndarray, np.ndarray]:
        t1 = self.r1 * self.normal
        t2 = np.array([self.d, 0.0]) + self.r2 * self.normal
        return t1, t2

    @property
    def ruling_length(self) -> float:
        return self.d * self.cos_alpha

    def lateral_curvature(self, s: np.ndarray, dim: int = 3) -> np.ndarray:
        """Mean curvature at arclength ``s`` from T1 along the ruling."""
        s = np.asarray(s, dtype=float)
        if dim == 2:
            return np.zeros_like(s)
        return self.cos_alpha / (self.r1 * self.cos_alpha - s * self.sin_alpha)

    def signed_distance_2d(self, q: np.ndarray) -> np.ndarray:
        """Signed distance to the hull of the two discs in the (x, rho) plane."""
        q = np.asarray(q, dtype=float)
        c1 = np.zeros(2)
        c2 = np.array([self.d, 0.0])
        tau = self.ruling
        before = (q - c1) @ tau < 0
        after = (q - c2) @ tau > 0
        lateral = (q - c1) @ self.normal - self.r1
        out = np.where(before, np.linalg.norm(q - c1, axis=-1) - self.r1, lateral)
        return np.where(after, np.linalg.norm(q - c2, axis=-1) - self.r2, out)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance in R^3, axis along x."""
        points = np.asarray(points, dtype=float)
        rho = np.linalg.norm(points[..., 1:], axis=-1)
        return self.signed_distance_2d(np.stack([points[..., 0], rho], axis=-1))

    def surface_frame(self, s: float):
        """Point, outward normal and tangent basis (ruling, circumferential) at ruling arclength s."""
        t1, _ = self.tangency
        q = t1 + s * self.ruling
        point = np.array([q[0], 0.0, q[1]])
        normal = np.array([self.normal[0], 0.0, self.normal[1]])
        ruling = np.array([self.ruling[0], 0.0, self.ruling[1]])
        return point, normal, ruling, np.array([0.0, 1.0, 0.0])


def capsule_ruling_profile(r1: float, r2: float, d: float, samples: int, dim: int = 3) -> np.ndarray:
    """Analytic (s, kappa) along the ruling from T1 to T2, shape (samples, 2).

    Raises:
        PreconditionError: If one ball contains the other or samples < 2
    """
    if samples < 2:
        raise PreconditionError("a profile needs at least two samples")
    capsule = Capsule(r1, r2, d)
    s = np.linspace(0.0, capsule.ruling_length, samples)
    return np.stack([s, capsule.lateral_curvature(s, dim)], axis=1)


def hull_inverse_curvature_concavity_check(profile: np.ndarray, tol: Optional[float] = None) -> Report:
    """Midpoint concavity of 1/kappa along a hull segment, or kappa identically zero.

    Raises:
        PreconditionError: If s is not increasing or kappa is negative
    """
    profile = np.asarray(profile, dtype=float)
    s, kappa = profile[:, 0], profile[:, 1]
    if np.any(np.diff(s) <= 0):
        raise PreconditionError("profile must be sorted by strictly increasing s")
    tol = get_tolerance("concavity") if tol is None else tol
    if np.any(kappa < -tol):
        raise PreconditionError("hull curvature must be nonnegative")
    anchor = "along a segment of the hull boundary the inverse mean curvature is concave, or the curvature vanishes"

    if np.any(kappa <= tol):
        violation = float(np.max(kappa))
        return Report.judge(
            "inverse_curvature_concavity", anchor, violation, tol,
            values={"max_kappa": Measured(violation, "1/length")},
            metadata={"branch": "degenerate", "samples": len(s)},
        )

    inverse = 1.0 / kappa
    i, j = np.triu_indices(len(s), k=1)
    mid = np.interp(0.5 * (s[i] + s[j]), s, inverse)
    violation = float(np.max(0.5 * (inverse[i] + inverse[j]) - mid))
    return Report.judge(
        "inverse_curvature_concavity", anchor, violation, tol,
        values={"worst_midpoint_gap": Measured(violation, "length")},
        metadata={"branch": "concave", "samples": len(s)},
    )


def affinity_error(profile: np.ndarray) -> float:
    """Max deviation of 1/kappa from its least-squares line."""
    s, kappa = profile[:, 0], profile[:, 1]
    inverse = 1.0 / kappa
    coef = np.polyfit(s, inverse, 1)
    return float(np.max(np.abs(np.polyval(coef, s) - inverse)))


def capsule_tangency_graph(capsule: Capsule, s: float, radius: float, samples: int = 32) -> LocalGraph:
    """The capsule boundary near the ruling point at arclength ``s`` as a graph over its tangent plane.

    e(xi, eta) is the distance along the inward normal from the tangent plane
    point at (xi, eta) to the surface.
    """
    point, normal, e1, e2 = capsule.surface_frame(s)
    reach = min(capsule.r1, capsule.r2)

    def depth(coords: np.ndarray) -> np.ndarray:
        out = np.empty(len(coords))
        for k, (xi, eta) in enumerate(coords):
            base = point + xi * e1 + eta * e2

            def along(e):
                return float(capsule.signed_distance(base - e * normal))

            start = along(0.0)
            if start <= 1e-14:
                out[k] = 0.0
                continue
            out[k] = brentq(along, 0.0, reach, xtol=1e-14, rtol=1e-12)
        return out

    return LocalGraph.from_function(depth, 2, radius, samples)


def upper_semicontinuity_check(capsule: Capsule, radius: Optional[float] = None, approach: int = 8,
                               tol: Optional[float] = None) -> Report:
    """Curvature along the ruling near T1 stays below the viscosity curvature at T1.

    The touching neighbourhood is the stencil ``radius``, by default a
    thousandth of the smaller ball radius; the ruling is approached down from
    s = radius.
    """
    tol = get_tolerance("semicontinuity") if tol is None else tol
    radius = 1e-3 * min(capsule.r1, capsule.r2) if radius is None else radius
    at_tangency = viscosity_mean_curvature(capsule_tangency_graph(capsule, 0.0, radius))
    s = np.geomspace(1e-3 * radius, radius, approach)
    approaching = float(np.max(capsule.lateral_curvature(s)))
    return Report.judge(
        "hull_curvature_semicontinuity",
        "the interior mean curvature of a convex hull is upper semicontinuous on its boundary",
        approaching - at_tangency,
        tol,
        values={"kappa_tangency": Measured(at_tangency, "1/length"),
                "limsup_along_ruling": Measured(approaching, "1/length")},
        metadata={"r1": capsule.r1, "r2": capsule.r2, "d": capsule.d, "radius": radius},
    )
