"""Good-lattice-point construction of uniform design tables U_n(n^m)."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgumentError, NonCoprimeGeneratorError


@dataclass(frozen=True)
class DesignTable:
    """An ``n x m`` table of levels in ``1..n``; column ``j`` is generated by ``generators[j]``."""

    n: int
    generators: tuple[int, ...]
    levels: np.ndarray  # shape (n, m), int64, read-only

    @property
    def m(self) -> int:
        return len(self.generators)

    def column(self, j: int) -> np.ndarray:
        return self.levels[:, j]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"h_{h}" for h in self.generators])
        w.writerows(self.levels.tolist())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DesignTable":
        rows = list(csv.reader(io.StringIO(text)))
        generators = tuple(int(c.split("_", 1)[1]) for c in rows[0])
        levels = np.array([[int(v) for v in r] for r in rows[1:]], dtype=np.int64)
        levels.setflags(write=False)
        return cls(n=levels.shape[0], generators=generators, levels=levels)


def coprime_generators(n: int) -> list[int]:
    """All ``h`` in ``[1, n-1]`` with ``gcd(h, n) == 1``, ascending."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgumentError(f"n must be an integer >= 2, got {n!r}")
    return [h for h in range(1, n) if math.gcd(h, n) == 1]


def glp_column(n: int, h: int) -> np.ndarray:
    """Levels ``u_1..u_n`` from the additive recursion ``u_1 = h``, ``u_{i+1} = u_i + h`` wrapped into ``1..n``."""
    if n < 2 or not 1 <= h < n:
        raise InvalidArgumentError(f"generator must satisfy 1 <= h < n (n={n}, h={h})")
    if math.gcd(h, n) != 1:
        raise NonCoprimeGeneratorError(f"gcd({h}, {n}) = {math.gcd(h, n)} != 1")
    return kernels.glp_column(int(n), int(h))


def build_full_table(n: int) -> DesignTable:
    gens = coprime_generators(n)
    levels = np.empty((n, len(gens)), dtype=np.int64)
    for j, h in enumerate(gens):
        levels[:, j] = glp_column(n, h)
    levels.setflags(write=False)
    return DesignTable(n=n, generators=tuple(gens), levels=levels)
