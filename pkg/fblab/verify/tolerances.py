"""
Single table of check tolerances.

``cells`` tolerances are multiples of the grid spacing h; ``rel`` tolerances
are relative errors; ``abs`` tolerances are used as they are.
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from ..errors import ConfigError


@dataclass(frozen=True)
class Tolerance:
    value: float
    kind: str = "abs"
    description: str = ""

    def resolve(self, h: Optional[float] = None) -> float:
        if self.kind == "cells":
            if h is None:
                raise ValueError("grid spacing required for a cell-scaled tolerance")
            return self.value * h
        return self.value


TOLERANCES: Dict[str, Tolerance] = {
    # plap
    "comparison": Tolerance(1e-4, "abs", "pointwise excess of the small-body potential"),
    "extension": Tolerance(0.5, "cells", "energy-gap chain, times the energy scale"),
    "extension_closed_form": Tolerance(0.03, "rel", "extension terms against concentric-ball formulas"),
    "q_laplacian": Tolerance(0.05, "rel", "q-Laplacian over its natural scale"),
    "hopf_slope": Tolerance(0.05, "rel", "fitted growth slope against the radial derivative"),
    "barrier": Tolerance(0.05, "rel", "p-Laplacian of the barrier over its natural scale"),
    "barrier_closed_form": Tolerance(1e-8, "abs", "quadrature of the barrier formula"),
    "grid_order": Tolerance(1.5, "abs", "minimal empirical convergence order"),
    "scaling": Tolerance(0.02, "rel", "dilation covariance of potential and energy"),
    # grid_core
    "perimeter_order": Tolerance(0.9, "abs", "minimal convergence rate of the contour perimeter"),
    # geomlab
    "convexity": Tolerance(1e-2, "abs", "convexity deficit"),
    "curvature": Tolerance(0.05, "rel", "contour curvature of a circle"),
    "inf_convolution": Tolerance(1e-6, "abs", "brute-force inf-convolution against the closed form"),
    "harmonic_identity": Tolerance(1e-10, "abs", "two expressions of the harmonic mean"),
    "trace_equality": Tolerance(1e-10, "abs", "equality cases of the trace inequality"),
    "trace_inequality": Tolerance(1e-12, "abs", "trace inequality slack"),
    "concavity": Tolerance(1e-6, "abs", "midpoint concavity of inverse curvature"),
    "cone_affinity": Tolerance(1e-6, "abs", "affinity of inverse curvature along a cone ruling"),
    "block_reduction": Tolerance(0.05, "rel", "full against block-restricted viscosity curvature"),
    "semicontinuity": Tolerance(1e-3, "abs", "upper semicontinuity of hull curvature"),
    "gradient_convexity": Tolerance(0.02, "rel", "convexity of 1/|Du| along a flat side"),
    # fbmin
    "oracle_identity": Tolerance(1e-6, "rel", "free boundary identity at the radial optimum"),
    "fb_residual": Tolerance(0.10, "rel", "free boundary residual over curvature"),
    "fb_graph": Tolerance(0.10, "rel", "graph curvature operator against the gradient term"),
    "hausdorff": Tolerance(2.0, "cells", "agreement of free boundaries"),
    "inclusion": Tolerance(2.0, "cells", "inclusion slack"),
    "boundedness": Tolerance(2.0, "cells", "change of the free boundary when the box doubles"),
    "clearance": Tolerance(5.0, "cells", "minimal distance between free boundary and K"),
    "hull_inequality": Tolerance(0.10, "rel", "gradient term on the hull boundary against its curvature"),
}


def get_tolerance(name: str, h: Optional[float] = None, overrides: Optional[Mapping[str, float]] = None) -> float:
    """Resolve a tolerance, honouring per-suite overrides (same units as the table).

    Raises:
        ConfigError: If ``name`` is not in the table
    """
    if name not in TOLERANCES:
        raise ConfigError(f"unknown tolerance '{name}'", key=f"tolerances.{name}")
    entry = TOLERANCES[name]
    if overrides and name in overrides:
        entry = Tolerance(float(overrides[name]), entry.kind, entry.description)
    return entry.resolve(h)
