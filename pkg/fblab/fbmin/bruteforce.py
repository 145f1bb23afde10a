"""
Exhaustive search of the total energy over small shape families.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConvergenceError, PreconditionError, ShapeSpecError
from ..grid_core.region import Region, rasterize
from ..grid_core.shapes import Disk, Ellipse, Shape
from ..plap.solver import PLapConfig
from .energy import EnergyTerms, total_energy

logger = logging.getLogger(__name__)

FAMILIES = {
    "ellipses": ("a", "b"),
    "offset_disks": ("r", "cx"),
}


@dataclass
class ShapeFamily:
    """A finite grid over at most three shape parameters.

    ``ellipses`` takes axes ``a`` and ``b``; ``offset_disks`` a radius ``r``
    and a horizontal center offset ``cx``.
    """
    kind: str
    values: Dict[str, Sequence[float]]

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise PreconditionError(f"unknown shape family '{self.kind}', expected one of {sorted(FAMILIES)}")
        names = FAMILIES[self.kind]
        if set(self.values) != set(names):
            raise PreconditionError(f"family '{self.kind}' needs parameters {names}, got {sorted(self.values)}")
        self.values = {name: [float(v) for v in self.values[name]] for name in names}

    @classmethod
    def from_ranges(cls, kind: str, **ranges: Tuple[float, float, float]) -> "ShapeFamily":
        """Build from ``name=(start, stop, step)`` ranges, both ends included."""
        values = {}
        for name, (start, stop, step) in ranges.items():
            count = int(round((stop - start) / step)) + 1
            values[name] = np.linspace(start, stop, count).tolist()
        return cls(kind, values)

    def members(self) -> Iterator[Tuple[Dict[str, float], Shape]]:
        names = FAMILIES[self.kind]
        for combo in product(*(self.values[name] for name in names)):
            params = dict(zip(names, combo))
            if self.kind == "ellipses":
                yield params, Ellipse(params["a"], params["b"])
            else:
                yield params, Disk(params["r"], (params["cx"], 0.0))


@dataclass
class FamilyEntry:
    params: Dict[str, float]
    energy: Optional[EnergyTerms] = None
    feasible: bool = True
    reason: str = ""


@dataclass
class BruteForceResult:
    best: Optional[FamilyEntry]
    table: List[FamilyEntry] = field(default_factory=list)

    def rows(self, names: Sequence[str]):
        for entry in self.table:
            energy = entry.energy or EnergyTerms(np.nan, np.nan, np.nan)
            yield [entry.params[name] for name in names] + [*energy, entry.feasible]


def _evaluate(K: Region, p: float, params: Dict[str, float], shape: Shape, clearance: float,
              cfg: Optional[PLapConfig]) -> FamilyEntry:
    try:
        omega = rasterize(shape, K.grid)
    except ShapeSpecError as e:
        return FamilyEntry(params, feasible=False, reason=str(e))
    if np.any(omega.phi[K.phi < clearance] >= 0):
        return FamilyEntry(params, feasible=False, reason="does not contain K with clearance")
    try:
        return FamilyEntry(params, total_energy(K, omega, p, cfg))
    except (PreconditionError, ConvergenceError) as e:
        return FamilyEntry(params, feasible=False, reason=str(e))


def parametric_bruteforce(
    K: Region,
    p: float,
    family: ShapeFamily,
    cfg: Optional[PLapConfig] = None,
    threads: int = 1,
    clearance_cells: float = 2.0,
) -> BruteForceResult:
    """Total energy of every family member; infeasible members are kept in the table, marked.

    The table follows the family's enumeration order whatever the thread count.
    """
    members = list(family.members())
    clearance = clearance_cells * K.grid.h
    if threads <= 1:
        table = [_evaluate(K, p, params, shape, clearance, cfg) for params, shape in members]
    else:
        table: List[Optional[FamilyEntry]] = [None] * len(members)
        with ThreadPoolExecutor(max_workers=threads) as executor:
            future_to_index = {
                executor.submit(_evaluate, K, p, params, shape, clearance, cfg): k
                for k, (params, shape) in enumerate(members)
            }
            for future in as_completed(future_to_index):
                table[future_to_index[future]] = future.result()

    feasible = [entry for entry in table if entry.feasible]
    best = min(feasible, key=lambda entry: entry.energy.total) if feasible else None
    logger.info(
        f"Brute force over {len(table)} {family.kind}: {len(feasible)} feasible"
        + (f", best {best.params} with total {best.energy.total:.8g}" if best else "")
    )
    return BruteForceResult(best, table)
