"""Tolerance configuration.

The residual tolerance used by every check can be overridden globally through
the ``OPFACTOR_TOL`` environment variable.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class Tolerances:
    residual: float = 1e-9
    # relative to the largest singular value
    rank: float = 1e-9
    containment: float = 1e-9
    projection_commute: float = 1e-8
    hermitian: float = 1e-10


def residual_tol() -> float:
    raw = os.environ.get("OPFACTOR_TOL")
    if raw is None or raw == "":
        return Tolerances.residual
    value = float(raw)
    if not value > 0:
        raise ValueError(f"OPFACTOR_TOL must be positive, got {raw!r}")
    return value


DEFAULTS = Tolerances()
