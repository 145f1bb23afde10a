"""
Structured pass/fail records for numerical checks.
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

import numpy as np


class Status(str, Enum):
    PASSED = "PASSED"
    FAILED = "FAILED"
    SKIPPED = "SKIPPED"


@dataclass
class Measured:
    value: float
    unit: str = ""


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Report:
    """Outcome of one check.

    ``margin`` is signed slack: a check passes iff ``margin >= 0``. Every
    judged report carries the tolerance that produced its margin.
    """
    check: str
    anchor: str = ""
    status: Status = Status.PASSED
    values: Dict[str, Measured] = field(default_factory=dict)
    tol: Optional[float] = None
    margin: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    details: List["Report"] = field(default_factory=list)
    error: Optional[str] = None
    created: str = field(default_factory=_now)

    @property
    def passed(self) -> bool:
        return self.status == Status.PASSED

    @classmethod
    def judge(
        cls,
        check: str,
        anchor: str,
        violation: float,
        tol: float,
        values: Optional[Dict[str, Measured]] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "Report":
        """Pass iff ``violation <= tol``; the margin is ``tol - violation``."""
        margin = float(tol) - float(violation)
        status = Status.PASSED if margin >= 0 and math.isfinite(margin) else Status.FAILED
        return cls(check, anchor, status, dict(values or {}), float(tol), margin, dict(metadata or {}))

    @classmethod
    def skipped(cls, check: str, anchor: str, reason: str, metadata: Optional[Dict[str, Any]] = None) -> "Report":
        meta = dict(metadata or {})
        meta["skip_reason"] = reason
        return cls(check, anchor, Status.SKIPPED, metadata=meta)

    @classmethod
    def failed(cls, check: str, anchor: str, error: str, metadata: Optional[Dict[str, Any]] = None) -> "Report":
        return cls(check, anchor, Status.FAILED, metadata=dict(metadata or {}), error=error)

    @classmethod
    def combine(
        cls,
        check: str,
        anchor: str,
        details: Iterable["Report"],
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "Report":
        """Aggregate sub-reports: any failure fails, all skipped skips."""
        details = list(details)
        statuses = {detail.status for detail in details}
        if Status.FAILED in statuses:
            status = Status.FAILED
        elif Status.PASSED in statuses:
            status = Status.PASSED
        else:
            status = Status.SKIPPED
        margins = [d.margin for d in details if d.margin is not None and d.status != Status.SKIPPED]
        return cls(
            check,
            anchor,
            status,
            margin=min(margins) if margins else None,
            metadata=dict(metadata or {}),
            details=details,
        )

    def to_dict(self, include_timestamp: bool = True) -> Dict[str, Any]:
        data = {
            "check": self.check,
            "anchor": self.anchor,
            "status": self.status.value,
            "pass": self.passed,
            "values": {name: {"value": _clean(m.value), "unit": m.unit} for name, m in self.values.items()},
            "tol": _clean(self.tol),
            "margin": _clean(self.margin),
            "config": _clean(self.metadata),
            "details": [detail.to_dict(include_timestamp) for detail in self.details],
            "error": self.error,
        }
        if include_timestamp:
            data["created"] = self.created
        return data

    def to_json(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(include_timestamp), sort_keys=True, indent=2)


def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars become Python floats, non-finite become None."""
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    try:
        number = float(value)
    except (TypeError, ValueError):
        return str(value)
    return number if math.isfinite(number) else None


def strip_timestamps(data: Any) -> Any:
    """Drop ``created`` keys recursively so reports can be compared."""
    if isinstance(data, dict):
        return {k: strip_timestamps(v) for k, v in data.items() if k != "created"}
    if isinstance(data, list):
        return [strip_timestamps(v) for v in data]
    return data
