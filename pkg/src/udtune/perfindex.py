"""Integral performance indices (ISE, IAE, ITAE) over sampled error signals.

The infinite upper limit is truncated at the last sample and every integral
uses the trapezoidal rule on the uniform grid ``t_k = k * dt``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, NonFiniteSignalError

CRITERIA = ("ise", "iae", "itae")


@dataclass(frozen=True)
class SampledSignal:
    dt: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if not self.dt > 0:
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        if vals.ndim != 1 or vals.size < 2:
            raise InvalidArgumentError("a sampled signal needs at least 2 samples")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSignalError("signal contains non-finite samples")
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.dt


def ise(e: SampledSignal) -> float:
    return float(np.trapezoid(e.values ** 2, dx=e.dt))


def iae(e: SampledSignal) -> float:
    return float(np.trapezoid(np.abs(e.values), dx=e.dt))


def itae(e: SampledSignal) -> float:
    return float(np.trapezoid(e.times * np.abs(e.values), dx=e.dt))


_FUNCS = {"ise": ise, "iae": iae, "itae": itae}


def index_value(criterion: str, e: SampledSignal) -> float:
    try:
        return _FUNCS[criterion](e)
    except KeyError:
        raise InvalidArgumentError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}") from None


@dataclass(frozen=True)
class IndexReport:
    """Per-channel values of ``criterion`` and their weighted sum ``aggregate``.

    ``ise``, ``iae`` and ``itae`` are the same weighted sums for each index,
    kept for diagnostics.
    """

    ise: float
    iae: float
    itae: float
    per_channel: tuple[tuple[str, float], ...]
    weights: tuple[float, ...]
    aggregate: float
    criterion: str = "itae"
    extra: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "aggregate": self.aggregate,
            "ise": self.ise,
            "iae": self.iae,
            "itae": self.itae,
            "per_channel": {name: v for name, v in self.per_channel},
            "weights": list(self.weights),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def csv_header(self) -> list[str]:
        return ["criterion", "aggregate", "ise", "iae", "itae"] + [f"{self.criterion}_{n}" for n, _ in self.per_channel]

    def csv_row(self) -> list:
        return [self.criterion, repr(self.aggregate), repr(self.ise), repr(self.iae), repr(self.itae)] + [
            repr(v) for _, v in self.per_channel]


def aggregate(channels, weights=None, criterion: str = "itae") -> IndexReport:
    """Combine named error channels into one ranking value.

    ``channels`` is a sequence of ``(name, SampledSignal)``; ``weights``
    defaults to 1 for every channel.
    """
    channels = list(channels)
    if not channels:
        raise InvalidArgumentError("at least one channel is required")
    if weights is None:
        weights = [1.0] * len(channels)
    weights = [float(w) for w in weights]
    if len(weights) != len(channels):
        raise InvalidArgumentError(f"{len(weights)} weights for {len(channels)} channels")
    if any(w < 0 or not np.isfinite(w) for w in weights):
        raise InvalidArgumentError(f"weights must be finite and nonnegative: {weights}")
    if criterion not in _FUNCS:
        raise InvalidArgumentError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    totals = {}
    for name, f in _FUNCS.items():
        totals[name] = sum(w * f(sig) for w, (_, sig) in zip(weights, channels))
    per = tuple((name, _FUNCS[criterion](sig)) for name, sig in channels)
    return IndexReport(ise=totals["ise"], iae=totals["iae"], itae=totals["itae"], per_channel=per,
                       weights=tuple(weights), aggregate=totals[criterion], criterion=criterion)
