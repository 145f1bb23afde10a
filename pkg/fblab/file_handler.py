import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .grid_core.grid import ScalarField
from .reporting import Report

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class FileHandler:
    def __init__(self, output_dir: str):
        """Initialize FileHandler with an output directory.

        Args:
            output_dir (str): Directory that receives reports and CSV artifacts;
                created if missing
        """
        self.output_dir = Path(output_dir)
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            logger.error(f"Cannot create output directory {output_dir}: {str(e)}")
            raise
        self.written: List[Path] = []

    def _target(self, name: str) -> Path:
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def _record(self, path: Path) -> Path:
        if path not in self.written:
            self.written.append(path)
        logger.debug(f"Wrote {path}")
        return path

    def write_report(self, report: Report, name: str = "report.json") -> Path:
        """Write a Report as JSON with sorted keys.

        Returns:
            Path: Path of the written file
        """
        path = self._target(name)
        path.write_text(report.to_json() + "\n", encoding="utf-8")
        return self._record(path)

    def write_json(self, data: Dict, name: str) -> Path:
        path = self._target(name)
        path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return self._record(path)

    def write_field(self, field: ScalarField, name: str = "field.csv") -> Path:
        """Write a scalar field as ``x,y,value`` rows in row-major node order."""
        positions = field.node_positions.reshape(-1, 2)
        values = field.values.reshape(-1)
        rows = ((repr(float(x)), repr(float(y)), repr(float(v))) for (x, y), v in zip(positions, values))
        return self.write_rows(name, ("x", "y", "value"), rows)

    def write_contours(self, loops: Sequence[np.ndarray], name: str = "contour.csv") -> Path:
        """Write closed polylines as ``x,y`` rows with a blank line between loops."""
        path = self._target(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write("x,y\n")
            for k, loop in enumerate(loops):
                if k:
                    f.write("\n")
                for x, y in np.vstack([loop, loop[:1]]):
                    f.write(f"{float(x)!r},{float(y)!r}\n")
        return self._record(path)

    def write_rows(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        path = self._target(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        return self._record(path)

    def write_manifest(self) -> Path:
        """List every written file with its SHA-256 content hash."""
        entries = {}
        for path in sorted(self.written):
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
            entries[str(path.relative_to(self.output_dir))] = {"sha256": digest, "bytes": path.stat().st_size}
        path = self.output_dir / MANIFEST_NAME
        path.write_text(json.dumps({"files": entries}, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        logger.info(f"Manifest lists {len(entries)} files")
        return path
