"""Real-coded adaptive genetic algorithm used as the comparison baseline.

Crossover and mutation probabilities adapt per pair of parents in the manner
of the classic adaptive GA: parents fitter than the population mean get
probabilities that shrink linearly to zero at the current best, the rest use
fixed fallbacks. Fitness is ``1 / (1 + index)``, so diverged candidates
(index ``inf``) have fitness 0.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class GaConfig:
    population: int = 40
    generations: int = 100
    kc1: float = 1.0
    kc2: float = 0.5
    km1: float = 0.5
    km2: float = 0.05
    seed: int = 0
    mutation_scale: float = 0.05  # Gaussian sigma as a fraction of each gain's range
    max_evaluations: int | None = None

    def __post_init__(self):
        if self.population < 2 or self.population % 2:
            raise InvalidArgumentError(f"population must be even and >= 2, got {self.population}")
        if self.generations < 1:
            raise InvalidArgumentError(f"generations must be >= 1, got {self.generations}")
        for name in ("kc1", "kc2", "km1", "km2"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise InvalidArgumentError(f"{name} must lie in (0, 1], got {v}")
        if not self.mutation_scale > 0:
            raise InvalidArgumentError("mutation_scale must be positive")
        if self.max_evaluations is not None and self.max_evaluations < self.population:
            raise InvalidArgumentError("max_evaluations must cover at least the initial population")


def fitness(index: float) -> float:
    return 0.0 if not math.isfinite(index) else 1.0 / (1.0 + index)


def adaptive_probability(k_hi: float, k_lo: float, f: float, f_max: float, f_avg: float) -> float:
    if f_max - f_avg <= 1e-15 * max(1.0, abs(f_max)):
        return k_lo
    if f >= f_avg:
        return k_hi * (f_max - f) / (f_max - f_avg)
    return k_lo


@dataclass
class GaReport:
    names: tuple[str, ...]
    best_gains: tuple[float, ...]
    best_aggregate: float
    history: list[tuple[int, float, float]]  # (generation, best index, mean finite index)
    evaluations: int
    seed: int
    config: GaConfig
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        # wall_time is printed by the CLI, never serialized.
        def fin(v):
            return float(v) if math.isfinite(v) else None
        return {
            "seed": self.seed,
            "evaluations": self.evaluations,
            "best_gains": dict(zip(self.names, self.best_gains)),
            "best_aggregate": fin(self.best_aggregate),
            "generations_run": len(self.history),
            "config": asdict(self.config),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def curve_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["generation", "best", "mean"])
        for g, b, m in self.history:
            w.writerow([g, repr(b) if math.isfinite(b) else "inf", repr(m) if math.isfinite(m) else "inf"])
        return buf.getvalue()


def _mean_finite(values) -> float:
    vals = [v for v in values if math.isfinite(v)]
    return float(np.mean(vals)) if vals else math.inf


def run_ga(objective, ranges, cfg: GaConfig | None = None, workers: int = 1) -> GaReport:
    """Minimise ``objective(gains)`` over the box ``ranges = [(name, lo, hi), ...]``.

    All random draws for a generation happen before any of its evaluations,
    so results depend on the seed alone, not on worker scheduling.
    """
    cfg = cfg or GaConfig()
    names = tuple(r[0] for r in ranges)
    lo = np.array([float(r[1]) for r in ranges])
    hi = np.array([float(r[2]) for r in ranges])
    if np.any(hi <= lo):
        raise InvalidArgumentError(f"invalid box: {ranges}")
    s, P = lo.size, cfg.population
    sigma = cfg.mutation_scale * (hi - lo)
    rng = np.random.default_rng(cfg.seed)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def evaluate(batch):
        if pool is not None:
            return [float(v) for v in pool.map(objective, list(batch))]
        return [float(objective(x)) for x in batch]

    t0 = time.perf_counter()
    try:
        pop = lo + rng.random((P, s)) * (hi - lo)
        agg = evaluate(pop)
        evals = P
        history = [(1, min(agg), _mean_finite(agg))]
        for gen in range(2, cfg.generations + 1):
            remaining = P - 1
            if cfg.max_evaluations is not None:
                remaining = min(remaining, cfg.max_evaluations - evals)
            if remaining <= 0:
                break
            fit = np.array([fitness(a) for a in agg])
            f_max, f_avg = float(fit.max()), float(fit.mean())
            elite = min(range(P if len(agg) == P else len(agg)), key=lambda i: (agg[i], i))
            n_cur = len(agg)

            def tournament():
                a, b = rng.integers(n_cur, size=2)
                return a if (agg[a], a) <= (agg[b], b) else b

            children = []
            while len(children) < P - 1:
                i1, i2 = tournament(), tournament()
                f_par = max(fit[i1], fit[i2])
                pc = adaptive_probability(cfg.kc1, cfg.kc2, f_par, f_max, f_avg)
                pm = adaptive_probability(cfg.km1, cfg.km2, f_par, f_max, f_avg)
                r, w = rng.random(), rng.random()
                x1, x2 = pop[i1], pop[i2]
                if r < pc:
                    c1, c2 = w * x1 + (1 - w) * x2, (1 - w) * x1 + w * x2
                else:
                    c1, c2 = x1.copy(), x2.copy()
                for c in (c1, c2):
                    mask = rng.random(s) < pm
                    noise = rng.normal(0.0, 1.0, s) * sigma
                    children.append(np.clip(c + mask * noise, lo, hi))
            children = np.array(children[:remaining])
            child_agg = evaluate(children)
            evals += len(children)
            pop = np.vstack([pop[elite][None, :], children])
            agg = [agg[elite]] + child_agg
            history.append((gen, min(agg), _mean_finite(agg)))
    finally:
        if pool is not None:
            pool.shutdown()
    wall = time.perf_counter() - t0
    best = min(range(len(agg)), key=lambda i: (agg[i], i))
    return GaReport(names, tuple(pop[best].tolist()), agg[best], history, evals, cfg.seed, cfg, wall)
