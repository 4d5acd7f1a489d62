"""Single-shot uniform-design search over a box of controller gains.

1. One level count ``n`` is shared by every gain; gain ``i`` gets step
   ``(k_max - k_min) / (n - 1)`` and levels ``k_min + step * (j - 1)``.
2. A GLP table ``U_n(n^m)`` is built and its best ``s`` columns selected by CD2.
3. Row ``j`` of the selected table picks one level per gain; every row is
   simulated and scored.
4. The row with the smallest index wins.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .discrepancy import DEFAULT_BUDGET, ColumnSelection, select_columns
from .errors import InsufficientColumnsError, InvalidArgumentError, NoFeasibleCandidateError
from .lattice import DesignTable, build_full_table
from .odesim import SimConfig, Trajectory, simulate
from .perfindex import CRITERIA, IndexReport, SampledSignal, aggregate

SEARCH_CRITERIA = CRITERIA + ("overshoot",)


@dataclass(frozen=True)
class ParameterSpace:
    names: tuple[str, ...]
    lows: tuple[float, ...]
    highs: tuple[float, ...]
    n: int

    @property
    def s(self) -> int:
        return len(self.names)

    @property
    def steps(self) -> tuple[float, ...]:
        return tuple((hi - lo) / (self.n - 1) for lo, hi in zip(self.lows, self.highs))

    def levels(self, i: int) -> np.ndarray:
        """The ``n`` admissible values of gain ``i``; exact endpoints at both ends."""
        lo, hi, step = self.lows[i], self.highs[i], self.steps[i]
        vals = lo + step * np.arange(self.n)
        vals[-1] = hi
        return vals

    def ranges(self) -> list[tuple[str, float, float]]:
        return list(zip(self.names, self.lows, self.highs))


def build_space(ranges, n: int) -> ParameterSpace:
    """``ranges`` is a sequence of ``(name, k_min, k_max)``."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgumentError(f"n must be an integer >= 2, got {n!r}")
    ranges = list(ranges)
    if not ranges:
        raise InvalidArgumentError("at least one parameter range is required")
    names, lows, highs = [], [], []
    for name, lo, hi in ranges:
        lo, hi = float(lo), float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise InvalidArgumentError(f"invalid range for {name!r}: [{lo}, {hi}]")
        names.append(str(name))
        lows.append(lo)
        highs.append(hi)
    if len(set(names)) != len(names):
        raise InvalidArgumentError(f"duplicate parameter names: {names}")
    return ParameterSpace(tuple(names), tuple(lows), tuple(highs), int(n))


def map_row(space: ParameterSpace, table: DesignTable, selection: ColumnSelection, j: int) -> np.ndarray:
    """Gain vector for 1-based row ``j``: gain ``i`` takes level ``M(j, i)``."""
    if table.n != space.n:
        raise InvalidArgumentError(f"table has {table.n} rows but the space has n={space.n}")
    if len(selection.indices) != space.s:
        raise InvalidArgumentError(f"selection has {len(selection.indices)} columns for {space.s} gains")
    if not 1 <= j <= space.n:
        raise InvalidArgumentError(f"row index {j} outside 1..{space.n}")
    out = np.empty(space.s)
    for i, col in enumerate(selection.indices):
        out[i] = space.levels(i)[table.levels[j - 1, col] - 1]
    return out


def overshoot_percent(traj: Trajectory) -> dict[str, float]:
    """Peak excursion past a constant reference, in percent of the reference."""
    out = {}
    for c, name in enumerate(traj.channel_names):
        r = traj.references[0, c]
        if r == 0 or len(traj) == 0:
            continue
        y = traj.references[:, c] - traj.errors[:, c]
        peak = np.max(y) if r > 0 else np.min(y)
        out[name] = max(0.0, float((peak - r) / r * 100.0))
    return out


@dataclass(frozen=True)
class RowResult:
    row: int
    gains: tuple[float, ...]
    aggregate: float
    diverged: bool
    report: IndexReport | None = None
    overshoot: tuple[tuple[str, float], ...] = ()

    def to_dict(self, names) -> dict:
        return {
            "row": self.row,
            "gains": dict(zip(names, self.gains)),
            "aggregate": _finite_or_none(self.aggregate),
            "diverged": self.diverged,
            "indices": None if self.report is None else self.report.to_dict(),
            "overshoot_percent": dict(self.overshoot),
        }


def _finite_or_none(v):
    return float(v) if math.isfinite(v) else None


def evaluate(plant, gains, cfg: SimConfig, criterion: str = "itae", weights=None, row: int = 0):
    """Score one gain vector. Returns ``(RowResult, Trajectory | None)``.

    Diverged runs get ``aggregate = inf`` so they sort last.
    """
    gains = np.asarray(gains, dtype=np.float64)
    if criterion not in SEARCH_CRITERIA:
        raise InvalidArgumentError(f"unknown criterion {criterion!r}; expected one of {SEARCH_CRITERIA}")
    if plant.objective is not None:
        v = float(plant.objective(gains))
        bad = not math.isfinite(v)
        return RowResult(row, tuple(gains.tolist()), math.inf if bad else v, bad), None
    traj = simulate(plant, gains, cfg)
    if traj.diverged or len(traj) < 2:
        return RowResult(row, tuple(gains.tolist()), math.inf, True), traj
    channels = [(name, SampledSignal(cfg.dt, traj.channel(name))) for name in plant.channel_names]
    report = aggregate(channels, weights, "itae" if criterion == "overshoot" else criterion)
    over = overshoot_percent(traj) if plant.step_channels else {}
    value = report.aggregate
    if criterion == "overshoot":
        if not plant.step_channels:
            raise InvalidArgumentError(f"plant {plant.name!r} has no step references for overshoot")
        value = sum(w * over.get(n, 0.0) for w, n in zip(report.weights, plant.channel_names))
    return RowResult(row, tuple(gains.tolist()), float(value), False, report, tuple(over.items())), traj


def make_objective(plant, cfg: SimConfig, criterion: str = "itae", weights=None):
    def objective(gains) -> float:
        return evaluate(plant, gains, cfg, criterion, weights)[0].aggregate
    return objective


@dataclass
class SearchReport:
    space: ParameterSpace
    table: DesignTable
    selection: ColumnSelection
    rows: list[RowResult]
    best_index: int  # position in ``rows``
    criterion: str
    weights: tuple[float, ...] | None
    wall_time: float = 0.0
    backend: str = kernels.BACKEND

    @property
    def best(self) -> RowResult:
        return self.rows[self.best_index]

    def ranked(self) -> list[RowResult]:
        return sorted(self.rows, key=lambda r: (r.aggregate, r.row))

    def selected_table(self) -> np.ndarray:
        return self.table.levels[:, list(self.selection.indices)]

    def to_dict(self) -> dict:
        # wall_time is left out on purpose: files must be byte-identical across runs.
        names = self.space.names
        return {
            "n": self.space.n,
            "parameters": [{"name": n, "min": lo, "max": hi, "step": st}
                           for (n, lo, hi), st in zip(self.space.ranges(), self.space.steps)],
            "generators": [self.table.generators[i] for i in self.selection.indices],
            "selection": self.selection.to_dict(),
            "criterion": self.criterion,
            "weights": None if self.weights is None else list(self.weights),
            "best": self.best.to_dict(names),
            "diverged_rows": sum(r.diverged for r in self.rows),
            "rows": [r.to_dict(names) for r in self.ranked()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        chans = []
        for r in self.rows:
            if r.report is not None:
                chans = [n for n, _ in r.report.per_channel]
                break
        w.writerow(["rank", "row", *self.space.names, "aggregate", "diverged",
                    *[f"{self.criterion}_{c}" for c in chans]])
        for rank, r in enumerate(self.ranked(), 1):
            per = [repr(v) for _, v in r.report.per_channel] if r.report else [""] * len(chans)
            agg = repr(r.aggregate) if math.isfinite(r.aggregate) else "inf"
            w.writerow([rank, r.row, *[repr(g) for g in r.gains], agg, int(r.diverged), *per])
        return buf.getvalue()


def run_search(plant, space: ParameterSpace, cfg: SimConfig | None = None, criterion: str = "itae",
               weights=None, workers: int = 1, budget: int = DEFAULT_BUDGET) -> SearchReport:
    cfg = cfg or plant.default_sim
    if space.s != len(plant.gain_slots):
        raise InvalidArgumentError(f"space has {space.s} parameters, plant {plant.name!r} "
                                   f"has {len(plant.gain_slots)} gain slots")
    table = build_full_table(space.n)
    if table.m < space.s:
        raise InsufficientColumnsError(
            f"U_{space.n} has only {table.m} coprime columns, need {space.s}")
    selection = select_columns(table, space.s, budget)
    gain_rows = [map_row(space, table, selection, j) for j in range(1, space.n + 1)]

    def one(j):
        return evaluate(plant, gain_rows[j - 1], cfg, criterion, weights, row=j)[0]

    t0 = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(1, space.n + 1)))
    else:
        rows = [one(j) for j in range(1, space.n + 1)]
    wall = time.perf_counter() - t0

    if all(r.diverged for r in rows):
        raise NoFeasibleCandidateError(f"all {space.n} candidates diverged")
    best_index = min(range(len(rows)), key=lambda i: (rows[i].aggregate, rows[i].row))
    w = None if weights is None else tuple(float(x) for x in weights)
    return SearchReport(space, table, selection, rows, best_index, criterion, w, wall)
