"""Periodic structured-grid fields and the gradient operators used by the force term."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import D2Q9, Q, LatticeD2Q9

# WENO-Z5 and the face derivative stencils reach five cells.
MIN_CELLS = 5
NORMAL_EPS = 1e-12


class GridError(ValueError):
    """Raised for grids too small for the stencils or fields on mismatched grids."""


@dataclass(frozen=True, slots=True)
class Grid2D:
    nx: int
    ny: int
    h: float = 1.0
    periodic: bool = True

    def __post_init__(self) -> None:
        if self.nx < MIN_CELLS or self.ny < MIN_CELLS:
            raise GridError(
                f"Grid {self.nx}x{self.ny} is smaller than the {MIN_CELLS}-cell stencil"
            )
        if not self.h > 0:
            raise GridError(f"Cell size must be positive, got {self.h}")
        if not self.periodic:
            raise GridError("Only periodic grids are supported")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell_area(self) -> float:
        return self.h * self.h


def _check_values(grid: Grid2D, values: np.ndarray, trailing: tuple[int, ...]) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64)
    expected = grid.shape + trailing
    if array.shape != expected:
        raise GridError(f"Expected field of shape {expected}, got {array.shape}")
    return array


@dataclass(slots=True)
class ScalarField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = _check_values(self.grid, self.values, ())

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def copy(self) -> ScalarField:
        return ScalarField(self.grid, self.values.copy())


@dataclass(slots=True)
class VectorField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = _check_values(self.grid, self.values, (2,))

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def copy(self) -> VectorField:
        return VectorField(self.grid, self.values.copy())


@dataclass(slots=True)
class DistField:
    """Per-cell populations, population index fastest."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = _check_values(self.grid, self.values, (Q,))

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def copy(self) -> DistField:
        return DistField(self.grid, self.values.copy())


def periodic_index(i: int, n: int) -> int:
    return i % n


def shifted(values: np.ndarray, offset: int, axis: int) -> np.ndarray:
    """Return the array whose entry ``k`` holds ``values[k + offset]`` along *axis*."""

    return np.roll(values, -offset, axis=axis)


def cell_centers(grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    x = (np.arange(grid.nx, dtype=np.float64) + 0.5) * grid.h
    y = (np.arange(grid.ny, dtype=np.float64) + 0.5) * grid.h
    return np.meshgrid(x, y, indexing="ij")


def face_centers(grid: Grid2D, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of the faces between cell ``k`` and ``k + 1`` along *axis*."""

    x, y = cell_centers(grid)
    if axis == 0:
        return x + 0.5 * grid.h, y
    if axis == 1:
        return x, y + 0.5 * grid.h
    raise ValueError(f"axis must be 0 or 1, got {axis}")


def total(values: np.ndarray) -> float:
    """Correctly rounded global sum, independent of memory layout."""

    return math.fsum(np.asarray(values, dtype=np.float64).ravel().tolist())


def isotropic_gradient(phi: ScalarField, lattice: LatticeD2Q9 = D2Q9) -> VectorField:
    """Lattice-weighted gradient ``(1/(cs2 h)) sum_a w_a xi_a phi(x + e_a h)``."""

    grid = phi.grid
    acc = np.zeros(grid.shape + (2,), dtype=np.float64)
    for alpha in range(1, Q):
        ex, ey = (int(v) for v in lattice.directions[alpha])
        neighbour = np.roll(phi.values, shift=(-ex, -ey), axis=(0, 1))
        acc[..., 0] += lattice.weights[alpha] * ex * neighbour
        acc[..., 1] += lattice.weights[alpha] * ey * neighbour
    # sum_a w_a e_a e_a = (cs2 / c^2) I
    acc *= lattice.c * lattice.c / (lattice.cs2 * grid.h)
    return VectorField(grid, acc)


def central_gradient(phi: ScalarField) -> VectorField:
    grid = phi.grid
    values = phi.values
    gx = (shifted(values, 1, 0) - shifted(values, -1, 0)) / (2.0 * grid.h)
    gy = (shifted(values, 1, 1) - shifted(values, -1, 1)) / (2.0 * grid.h)
    return VectorField(grid, np.stack((gx, gy), axis=-1))


def interface_normal(grad: VectorField, eps: float = NORMAL_EPS) -> VectorField:
    norm = np.sqrt(grad.values[..., 0] ** 2 + grad.values[..., 1] ** 2)
    denom = (norm + eps)[..., None]
    normal = np.zeros_like(grad.values)
    np.divide(grad.values, denom, out=normal, where=denom > 0)
    return VectorField(grad.grid, normal)


__all__ = [
    "DistField",
    "Grid2D",
    "GridError",
    "MIN_CELLS",
    "NORMAL_EPS",
    "ScalarField",
    "VectorField",
    "cell_centers",
    "central_gradient",
    "face_centers",
    "interface_normal",
    "isotropic_gradient",
    "periodic_index",
    "shifted",
    "total",
]
