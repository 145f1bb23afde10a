"""
Randomized matrix trials, user supplied matrix pairs and analytic capsule checks.
"""

import json
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import PreconditionError
from ..geomlab.capsule import (
    Capsule,
    affinity_error,
    capsule_ruling_profile,
    capsule_tangency_graph,
    hull_inverse_curvature_concavity_check,
    upper_semicontinuity_check,
)
from ..geomlab.matrices import (
    SymMatrix,
    block_reduction_check,
    brute_force_inf_convolution,
    inf_convolution,
    random_spd,
    trace_inequality_check,
)
from ..reporting import Measured, Report
from .tolerances import get_tolerance

logger = logging.getLogger(__name__)

BRUTE_FORCE_TRIALS = 500
BRUTE_FORCE_MAX_DIM = 4
TRACE_MAX_DIM = 6
PROFILE_SAMPLES = 65
CAPSULES = {
    "cylinder": (1.0, 1.0, 2.0),
    "cone": (1.0, 2.0, 4.0),
    "narrowing_cone": (2.0, 1.0, 4.0),
}


def matrix_trials(trials: int = 1000, seed: int = 0, tolerances: Optional[dict] = None) -> Report:
    """Random SPD pairs: trace inequality, harmonic-mean identity, brute-force inf-convolution, 1D equality.

    The first ``min(trials, 500)`` pairs (dimension at most 4) also go through
    the numerical minimization.
    """
    rng = np.random.default_rng(seed)
    tol_trace = get_tolerance("trace_inequality", overrides=tolerances)
    tol_identity = get_tolerance("harmonic_identity", overrides=tolerances)
    tol_brute = get_tolerance("inf_convolution", overrides=tolerances)
    tol_equal = get_tolerance("trace_equality", overrides=tolerances)

    worst_trace = worst_identity = worst_brute = worst_equal = -np.inf
    failures = 0
    for trial in range(trials):
        brute = trial < BRUTE_FORCE_TRIALS
        dim = int(rng.integers(1, (BRUTE_FORCE_MAX_DIM if brute else TRACE_MAX_DIM) + 1))
        B1, B2 = random_spd(rng, dim), random_spd(rng, dim)
        report = trace_inequality_check(B1, B2, tol_trace)
        worst_trace = max(worst_trace, tol_trace - report.margin)
        failures += not report.passed
        result = inf_convolution(B1, B2)
        worst_identity = max(worst_identity, result.identity_error)
        if dim == 1:
            lhs, rhs = report.values["lhs"].value, report.values["rhs"].value
            worst_equal = max(worst_equal, abs(lhs - rhs) / rhs)
        if brute:
            x = rng.standard_normal(dim)
            exact = float(result.matrix.quadratic(x))
            numeric = brute_force_inf_convolution(B1, B2, x)
            worst_brute = max(worst_brute, abs(numeric - exact) / max(abs(exact), 1.0))

    # Equality also holds for equal matrices in every dimension.
    for dim in range(1, TRACE_MAX_DIM + 1):
        B = random_spd(rng, dim)
        report = trace_inequality_check(B, SymMatrix(B.entries), tol_trace)
        lhs, rhs = report.values["lhs"].value, report.values["rhs"].value
        worst_equal = max(worst_equal, abs(lhs - rhs) / rhs)

    logger.info(f"Matrix lab: {trials} trials, {failures} trace inequality failures")
    metadata = {"trials": trials, "seed": seed}
    details = [
        Report.judge("trace_inequality", "1/Tr(2(B1^-1 + B2^-1)^-1) >= 1/(2 Tr B1) + 1/(2 Tr B2)",
                     worst_trace, tol_trace, {"failures": Measured(float(failures), "count")}, metadata),
        Report.judge("harmonic_identity", "B1 (B1 + B2)^-1 B2 = (B1^-1 + B2^-1)^-1",
                     worst_identity, tol_identity, metadata=metadata),
        Report.judge("inf_convolution_brute_force",
                     "min over y of (<B1 y, y> + <B2 (2x - y), 2x - y>) / 2 = 2 <(B1^-1 + B2^-1)^-1 x, x>",
                     worst_brute if np.isfinite(worst_brute) else 0.0, tol_brute,
                     metadata={**metadata, "pairs": min(trials, BRUTE_FORCE_TRIALS)}),
        Report.judge("trace_equality", "the trace inequality is an equality in dimension one and for B1 = B2",
                     worst_equal, tol_equal, metadata=metadata),
    ]
    return Report.combine("matrix_lab", "inf-convolution of quadratic forms", details, metadata)


def capsule_checks(samples: int = PROFILE_SAMPLES, tolerances: Optional[dict] = None) -> Report:
    """Concavity of 1/kappa on capsule rulings, cone affinity, block reduction and semicontinuity."""
    tol_concave = get_tolerance("concavity", overrides=tolerances)
    details = []
    for name, (r1, r2, d) in CAPSULES.items():
        report = hull_inverse_curvature_concavity_check(capsule_ruling_profile(r1, r2, d, samples), tol_concave)
        report.metadata.update({"capsule": name, "r1": r1, "r2": r2, "d": d})
        details.append(report)

    plane = hull_inverse_curvature_concavity_check(capsule_ruling_profile(1.0, 1.0, 3.0, samples, dim=2), tol_concave)
    plane.metadata["capsule"] = "two_disks_plane"
    details.append(plane)

    r1, r2, d = CAPSULES["cone"]
    affine = affinity_error(capsule_ruling_profile(r1, r2, d, samples))
    details.append(Report.judge(
        "cone_affinity", "1/kappa is affine along a cone ruling", affine,
        get_tolerance("cone_affinity", overrides=tolerances),
        {"max_deviation": Measured(affine, "length")}, {"r1": r1, "r2": r2, "d": d},
    ))

    for name, (r1, r2, d) in CAPSULES.items():
        capsule = Capsule(r1, r2, d)
        graph = capsule_tangency_graph(capsule, 0.5 * capsule.ruling_length, 0.05 * min(r1, r2))
        block = block_reduction_check(graph, tol=get_tolerance("block_reduction", overrides=tolerances))
        block.metadata["capsule"] = name
        expected = float(capsule.lateral_curvature(0.5 * capsule.ruling_length))
        block.values["analytic"] = Measured(expected, "1/length")
        details.append(block)
        semicontinuity = upper_semicontinuity_check(
            capsule, tol=get_tolerance("semicontinuity", overrides=tolerances)
        )
        semicontinuity.metadata["capsule"] = name
        details.append(semicontinuity)
    return Report.combine("capsule_lab", "curvature of the convex hull of two balls", details,
                          {"samples": samples})


def load_matrix_pairs(text: str) -> List[Tuple[SymMatrix, SymMatrix]]:
    """Pairs ``[[B1, B2], ...]`` from a JSON document.

    Raises:
        PreconditionError: If the document is not a list of matrix pairs
    """
    try:
        pairs = json.loads(text)
    except json.JSONDecodeError as e:
        raise PreconditionError(f"matrix pairs are not valid JSON: {str(e)}")
    if not isinstance(pairs, list) or not pairs or any(not isinstance(pair, list) or len(pair) != 2 for pair in pairs):
        raise PreconditionError("expected a nonempty JSON list of [B1, B2] pairs")
    return [(SymMatrix.from_json(b1), SymMatrix.from_json(b2)) for b1, b2 in pairs]


def matrix_pair_checks(pairs: Sequence[Tuple[SymMatrix, SymMatrix]], tolerances: Optional[dict] = None) -> Report:
    """Trace inequality and harmonic-mean identity on user supplied pairs."""
    tol_trace = get_tolerance("trace_inequality", overrides=tolerances)
    tol_identity = get_tolerance("harmonic_identity", overrides=tolerances)
    details = []
    for index, (B1, B2) in enumerate(pairs):
        report = trace_inequality_check(B1, B2, tol_trace)
        identity = inf_convolution(B1, B2).identity_error
        report.values["identity_error"] = Measured(identity)
        report.metadata.update({"pair": index, "B1": B1.to_list(), "B2": B2.to_list()})
        details.append(report)
        details.append(Report.judge("harmonic_identity", "B1 (B1 + B2)^-1 B2 = (B1^-1 + B2^-1)^-1",
                                    identity, tol_identity, metadata={"pair": index, "dim": B1.dim}))
    logger.info(f"Matrix input: {len(pairs)} pairs checked")
    return Report.combine("matrix_input", "inf-convolution of quadratic forms", details, {"pairs": len(pairs)})
