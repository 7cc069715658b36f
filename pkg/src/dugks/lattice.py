"""D2Q9 lattice constants and the discrete moments every kinetic operation relies on."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Rest, the four axis directions, then the four diagonals.
DIRECTIONS = np.array(
    [
        [0, 0],
        [1, 0],
        [0, 1],
        [-1, 0],
        [0, -1],
        [1, 1],
        [-1, 1],
        [-1, -1],
        [1, -1],
    ],
    dtype=np.int64,
)
WEIGHTS = np.array([4 / 9] + [1 / 9] * 4 + [1 / 36] * 4, dtype=np.float64)

DEFAULT_RT = 1.0 / 3.0
Q = 9


@dataclass(frozen=True, slots=True)
class LatticeD2Q9:
    """Velocity set ``c * DIRECTIONS`` with the standard D2Q9 weights."""

    rt: float = DEFAULT_RT

    def __post_init__(self) -> None:
        if self.rt <= 0:
            raise ValueError(f"RT must be positive, got {self.rt}")

    @property
    def directions(self) -> np.ndarray:
        return DIRECTIONS

    @property
    def weights(self) -> np.ndarray:
        return WEIGHTS

    @property
    def c(self) -> float:
        return math.sqrt(3.0 * self.rt)

    @property
    def cs2(self) -> float:
        return self.c * self.c / 3.0

    @property
    def sound_speed(self) -> float:
        return self.c / math.sqrt(3.0)

    @property
    def velocities(self) -> np.ndarray:
        return self.c * self.directions.astype(np.float64)


D2Q9 = LatticeD2Q9()


def moment0(f: np.ndarray) -> np.ndarray | float:
    """Return the zeroth moment, summing over the trailing population axis."""

    f = np.asarray(f, dtype=np.float64)
    result = f.sum(axis=-1)
    return float(result) if result.ndim == 0 else result


def moment1(f: np.ndarray, lattice: LatticeD2Q9 = D2Q9) -> np.ndarray:
    """Return ``sum_a xi_a f_a`` with a trailing axis of length two."""

    f = np.asarray(f, dtype=np.float64)
    return f @ lattice.velocities


def moment2(f: np.ndarray, lattice: LatticeD2Q9 = D2Q9) -> np.ndarray:
    """Return the second moment tensor ``sum_a xi_a xi_a f_a``."""

    f = np.asarray(f, dtype=np.float64)
    xi = lattice.velocities
    return np.einsum("...a,ad,ae->...de", f, xi, xi)


__all__ = [
    "D2Q9",
    "DEFAULT_RT",
    "DIRECTIONS",
    "LatticeD2Q9",
    "Q",
    "WEIGHTS",
    "moment0",
    "moment1",
    "moment2",
]
