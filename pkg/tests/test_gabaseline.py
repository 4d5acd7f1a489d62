import math

import numpy as np
import pytest

from udtune.errors import InvalidArgumentError
from udtune.gabaseline import GaConfig, adaptive_probability, fitness, run_ga

BOX = [("k1", 0.0, 10.0), ("k2", 0.0, 10.0), ("k3", 0.0, 10.0)]
CENTER = np.array([3.3, 7.1, 5.0])


def bowl(k):
    d = np.asarray(k) - CENTER
    return float(d @ d)


def test_fitness():
    assert fitness(0.0) == 1.0
    assert fitness(3.0) == 0.25
    assert fitness(math.inf) == 0.0
    assert fitness(math.nan) == 0.0


def test_adaptive_probability():
    assert adaptive_probability(1.0, 0.5, 0.9, 0.9, 0.5) == 0.0
    assert adaptive_probability(1.0, 0.5, 0.5, 0.9, 0.5) == pytest.approx(1.0)
    assert adaptive_probability(1.0, 0.5, 0.7, 0.9, 0.5) == pytest.approx(0.5)
    assert adaptive_probability(1.0, 0.5, 0.2, 0.9, 0.5) == 0.5
    assert adaptive_probability(1.0, 0.5, 0.4, 0.4, 0.4) == 0.5


@pytest.mark.parametrize("kw", [dict(population=7), dict(population=0), dict(generations=0),
                                dict(kc1=0.0), dict(km2=1.5), dict(mutation_scale=0.0),
                                dict(population=10, max_evaluations=5)])
def test_config_validation(kw):
    with pytest.raises(InvalidArgumentError):
        GaConfig(**kw)


def test_converges_on_quadratic_and_beats_random_sampling():
    cfg = GaConfig(population=40, generations=60, seed=0)
    rep = run_ga(bowl, BOX, cfg)
    diag = math.sqrt(3) * 10
    assert np.linalg.norm(np.array(rep.best_gains) - CENTER) < 0.05 * diag
    # Oracle: pure random search with the same number of evaluations.
    rng = np.random.default_rng(12345)
    pts = rng.random((rep.evaluations, 3)) * 10
    rand_best = min(bowl(p) for p in pts)
    assert rep.best_aggregate <= rand_best
    assert rep.evaluations == 40 + 59 * 39


def test_same_seed_same_result_different_seed_differs():
    cfg = GaConfig(population=10, generations=15, seed=3)
    a, b = run_ga(bowl, BOX, cfg), run_ga(bowl, BOX, cfg)
    assert a.to_json() == b.to_json() and a.curve_csv() == b.curve_csv()
    c = run_ga(bowl, BOX, GaConfig(population=10, generations=15, seed=4))
    assert c.best_gains != a.best_gains


def test_workers_do_not_change_result():
    cfg = GaConfig(population=12, generations=10, seed=1)
    assert run_ga(bowl, BOX, cfg, workers=1).to_json() == run_ga(bowl, BOX, cfg, workers=3).to_json()


def test_elitism_makes_best_monotone():
    rep = run_ga(bowl, BOX, GaConfig(population=8, generations=40, seed=2))
    best = [b for _, b, _ in rep.history]
    assert all(y <= x for x, y in zip(best, best[1:]))
    assert len(rep.history) == 40


def test_candidates_are_clamped_to_box():
    seen = []

    def obj(k):
        seen.append(np.array(k))
        return -float(np.sum(k))  # pushes against the upper faces

    run_ga(obj, BOX, GaConfig(population=10, generations=30, seed=0, mutation_scale=0.5))
    arr = np.array(seen)
    assert arr.min() >= 0.0 and arr.max() <= 10.0
    assert np.isclose(arr.max(), 10.0)


def test_evaluation_cap():
    rep = run_ga(bowl, BOX, GaConfig(population=20, generations=100, seed=0, max_evaluations=301))
    assert rep.evaluations == 301


def test_diverged_candidates_have_zero_fitness():
    def obj(k):
        return math.inf if k[0] > 5 else bowl(k)
    rep = run_ga(obj, BOX, GaConfig(population=10, generations=20, seed=0))
    assert math.isfinite(rep.best_aggregate)
    assert rep.best_gains[0] <= 5


def test_report_serialisation_omits_wall_time():
    rep = run_ga(bowl, BOX, GaConfig(population=4, generations=2))
    assert "wall_time" not in rep.to_json()
    assert rep.curve_csv().splitlines()[0] == "generation,best,mean"
