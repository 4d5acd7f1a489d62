"""Centered L2 discrepancy (CD2) and use-table column selection."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InsufficientColumnsError, InvalidArgumentError
from .lattice import DesignTable

DEFAULT_BUDGET = 100_000
# Squared-CD2 values closer than this are treated as ties (lowest index list wins).
TIE_TOL = 1e-12


@dataclass(frozen=True)
class UnitCubeDesign:
    points: np.ndarray  # (n, s) reals on the half-integer grid (2u - 1) / (2n)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def s(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class ColumnSelection:
    indices: tuple[int, ...]
    cd2: float
    method: str  # "exhaustive" | "greedy"

    def to_dict(self) -> dict:
        return {"indices": list(self.indices), "cd2": self.cd2, "method": self.method}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ColumnSelection":
        return cls(indices=tuple(int(i) for i in d["indices"]), cd2=float(d["cd2"]), method=d["method"])


def to_unit_cube(table: DesignTable, indices) -> UnitCubeDesign:
    idx = list(indices)
    if not idx:
        raise InvalidArgumentError("at least one column index is required")
    if len(set(idx)) != len(idx):
        raise InvalidArgumentError(f"duplicate column indices: {idx}")
    if any(not 0 <= i < table.m for i in idx):
        raise InvalidArgumentError(f"column index out of range 0..{table.m - 1}: {idx}")
    u = table.levels[:, idx].astype(np.float64)
    return UnitCubeDesign(points=np.ascontiguousarray((2.0 * u - 1.0) / (2.0 * table.n)))


def cd2_squared(design: UnitCubeDesign) -> float:
    pts = np.ascontiguousarray(design.points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise InvalidArgumentError("design must be a non-empty n x s array")
    return float(kernels.cd2_squared(pts))


def cd2(design: UnitCubeDesign) -> float:
    """Centered L2 discrepancy of ``design``; smaller means more evenly spread."""
    # Rounding can leave a tiny negative value for near-perfect designs.
    return math.sqrt(max(cd2_squared(design), 0.0))


def _better(value, idx, best_value, best_idx) -> bool:
    if best_idx is None or value < best_value - TIE_TOL:
        return True
    return abs(value - best_value) <= TIE_TOL and tuple(idx) < tuple(best_idx)


def _exhaustive(table: DesignTable, s: int):
    x_all = (2.0 * table.levels.astype(np.float64) - 1.0) / (2.0 * table.n)
    best_v, best_idx = math.inf, None
    for idx in itertools.combinations(range(table.m), s):
        v = float(kernels.cd2_squared(np.ascontiguousarray(x_all[:, idx])))
        if _better(v, idx, best_v, best_idx):
            best_v, best_idx = v, idx
    return best_idx


def _greedy(table: DesignTable, s: int):
    n = table.n
    cols = np.ascontiguousarray(((2.0 * table.levels.astype(np.float64) - 1.0) / (2.0 * n)).T)
    prod1 = np.ones(n)
    prod2 = np.ones((n, n))
    chosen: list[int] = []
    for step in range(1, s + 1):
        remaining = [c for c in range(table.m) if c not in chosen]
        scores = kernels.cd2_scan(prod1, prod2, np.ascontiguousarray(cols[remaining]), step)
        best_v, best_c = math.inf, None
        for c, v in zip(remaining, scores):
            if best_c is None or v < best_v - TIE_TOL:
                best_v, best_c = float(v), c
        chosen.append(best_c)
        kernels.cd2_absorb(prod1, prod2, cols[best_c])
    return tuple(sorted(chosen))


def select_columns(table: DesignTable, s: int, budget: int = DEFAULT_BUDGET) -> ColumnSelection:
    """Pick the ``s`` columns of ``table`` with the smallest CD2.

    All ``C(m, s)`` subsets are scored when that count fits in ``budget``;
    otherwise greedy forward selection is used (start from the best single
    column, then repeatedly add the column that keeps CD2 smallest). Ties go
    to the lowest index in both paths.
    """
    if s < 1:
        raise InvalidArgumentError(f"s must be >= 1, got {s}")
    if budget < 1:
        raise InvalidArgumentError(f"budget must be >= 1, got {budget}")
    if s > table.m:
        raise InsufficientColumnsError(
            f"table U_{table.n} has only {table.m} columns, cannot select {s}")
    if math.comb(table.m, s) <= budget:
        idx, method = _exhaustive(table, s), "exhaustive"
    else:
        idx, method = _greedy(table, s), "greedy"
    return ColumnSelection(indices=idx, cd2=cd2(to_unit_cube(table, idx)), method=method)
