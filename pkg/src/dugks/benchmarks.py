"""Interface advection benchmarks and their diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Callable, Sequence

import numpy as np
from skimage import measure

from .fields import Grid2D, GridError, ScalarField, cell_centers, total
from .reconstruction import FaceScheme
from .solver import Solver, SolverConfig, SolverState, VelocitySampler, steps_for

ZALESAK_SLOT_WIDTH = 0.1875
ZALESAK_SLOT_LENGTH = 1.75
VORTEX_PERIODS = 8
CONVERGENCE_GRIDS = (50, 100, 200, 400)
CONVERGENCE_CN = 0.015


class CaseKind(Enum):
    TRANSLATION = "translation"
    ZALESAK = "zalesak"
    VORTEX = "vortex"


DEFAULT_L0 = {
    CaseKind.TRANSLATION: 100,
    CaseKind.ZALESAK: 200,
    CaseKind.VORTEX: 200,
}


@dataclass(frozen=True, slots=True)
class BenchmarkCase:
    kind: CaseKind
    l0: float
    u0: float
    radius: float
    center: tuple[float, float]
    n_vortex: int = VORTEX_PERIODS
    slot_width: float = 0.0
    slot_length: float = 0.0

    def __post_init__(self) -> None:
        if not self.l0 > 0 or not self.u0 > 0:
            raise ValueError("L0 and U0 must be positive")
        cx, cy = self.center
        if not (
            0 <= cx - self.radius
            and cx + self.radius <= self.l0
            and 0 <= cy - self.radius
            and cy + self.radius <= self.l0
        ):
            raise ValueError(f"Feature of radius {self.radius} at {self.center} leaves the domain")
        if self.kind is CaseKind.VORTEX and self.n_vortex < 1:
            raise ValueError(f"n_vortex must be positive, got {self.n_vortex}")

    @property
    def period_time(self) -> float:
        """Physical time after which the exact solution returns to the initial state."""

        if self.kind is CaseKind.TRANSLATION:
            return self.l0 / self.u0
        if self.kind is CaseKind.ZALESAK:
            return 2.0 * self.l0 / self.u0
        return self.n_vortex * self.l0 / self.u0

    def period_steps(self, dt: float) -> int:
        return steps_for(self.period_time, dt)

    def sampler(self) -> VelocitySampler:
        return partial(velocity, self)

    def grid(self, h: float = 1.0) -> Grid2D:
        cells = int(round(self.l0 / h))
        return Grid2D(cells, cells, h)

    def initial_field(self, grid: Grid2D, w: float) -> ScalarField:
        if self.kind is CaseKind.ZALESAK:
            return init_zalesak(
                grid, self.center, self.radius, self.slot_width, self.slot_length, w
            )
        return init_circle(grid, self.center, self.radius, w)


def translation_case(l0: float = 100, u0: float = 0.02) -> BenchmarkCase:
    return BenchmarkCase(CaseKind.TRANSLATION, l0, u0, 0.25 * l0, (0.5 * l0, 0.5 * l0))


def zalesak_case(
    l0: float = 200, u0: float = 0.02, slot_length: float = ZALESAK_SLOT_LENGTH
) -> BenchmarkCase:
    radius = 0.4 * l0
    return BenchmarkCase(
        CaseKind.ZALESAK,
        l0,
        u0,
        radius,
        (0.5 * l0, 0.5 * l0),
        slot_width=ZALESAK_SLOT_WIDTH * radius,
        slot_length=slot_length * radius,
    )


def vortex_case(l0: float = 200, u0: float = 0.02, n_vortex: int = VORTEX_PERIODS) -> BenchmarkCase:
    return BenchmarkCase(
        CaseKind.VORTEX, l0, u0, 0.15 * l0, (0.5 * l0, 0.75 * l0), n_vortex=n_vortex
    )


def make_case(
    kind: CaseKind,
    *,
    l0: float | None = None,
    u0: float = 0.02,
    n_vortex: int = VORTEX_PERIODS,
    slot_length: float = ZALESAK_SLOT_LENGTH,
) -> BenchmarkCase:
    size = DEFAULT_L0[kind] if l0 is None else l0
    if kind is CaseKind.TRANSLATION:
        return translation_case(size, u0)
    if kind is CaseKind.ZALESAK:
        return zalesak_case(size, u0, slot_length)
    return vortex_case(size, u0, n_vortex)


def init_circle(
    grid: Grid2D, center: tuple[float, float], radius: float, w: float
) -> ScalarField:
    x, y = cell_centers(grid)
    distance = np.hypot(x - center[0], y - center[1])
    return ScalarField(grid, -np.tanh(2.0 * (distance - radius) / w))


def slotted_disk_distance(
    x: np.ndarray,
    y: np.ndarray,
    center: tuple[float, float],
    radius: float,
    slot_width: float,
    slot_length: float,
) -> np.ndarray:
    """Signed distance to a disk minus a vertical slot cut up from its bottom rim.

    Positive inside the remaining shape.
    """

    cx, cy = center
    inside_disk = radius - np.hypot(x - cx, y - cy)
    # Box distance, positive outside the slot.
    qx = np.abs(x - cx) - 0.5 * slot_width
    qy = np.abs(y - (cy - radius + 0.5 * slot_length)) - 0.5 * slot_length
    outside_slot = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0)) + np.minimum(
        np.maximum(qx, qy), 0.0
    )
    return np.minimum(inside_disk, outside_slot)


def init_zalesak(
    grid: Grid2D,
    center: tuple[float, float],
    radius: float,
    slot_width: float,
    slot_length: float,
    w: float,
) -> ScalarField:
    x, y = cell_centers(grid)
    distance = slotted_disk_distance(x, y, center, radius, slot_width, slot_length)
    return ScalarField(grid, np.tanh(2.0 * distance / w))


def velocity(case: BenchmarkCase, x, y, t: float = 0.0) -> np.ndarray:
    x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    u0, l0 = case.u0, case.l0
    if case.kind is CaseKind.TRANSLATION:
        ux = np.full(x.shape, u0)
        uy = np.full(x.shape, u0)
    elif case.kind is CaseKind.ZALESAK:
        ux = -u0 * math.pi * (y / l0 - 0.5)
        uy = u0 * math.pi * (x / l0 - 0.5)
    else:
        reversal = math.cos(math.pi * t / case.period_time)
        sx, sy = np.sin(math.pi * x / l0), np.sin(math.pi * y / l0)
        ux = u0 * sx * sx * np.sin(2.0 * math.pi * y / l0) * reversal
        uy = -u0 * sy * sy * np.sin(2.0 * math.pi * x / l0) * reversal
    return np.stack((ux, uy), axis=-1)


def divergence(case: BenchmarkCase, grid: Grid2D, t: float = 0.0) -> np.ndarray:
    """Cell divergence of the sampled velocity from its values at the face centres."""

    x, y = cell_centers(grid)
    half = 0.5 * grid.h
    east = velocity(case, x + half, y, t)[..., 0]
    west = velocity(case, x - half, y, t)[..., 0]
    north = velocity(case, x, y + half, t)[..., 1]
    south = velocity(case, x, y - half, t)[..., 1]
    return (east - west + north - south) / grid.h


def l2_error(phi_final: ScalarField, phi_init: ScalarField) -> float:
    if phi_final.grid != phi_init.grid:
        raise GridError("l2_error needs both fields on the same grid")
    denominator = total(phi_init.values**2)
    if denominator == 0.0:
        raise ValueError("Reference field is identically zero")
    return math.sqrt(total((phi_final.values - phi_init.values) ** 2) / denominator)


def positive_mass(phi: ScalarField) -> float:
    values = phi.values
    return total(np.where(values > 0.0, values, 0.0)) * phi.grid.cell_area


def total_mass(phi: ScalarField) -> float:
    return total(phi.values) * phi.grid.cell_area


def phi_extrema(phi: ScalarField) -> tuple[float, float]:
    return float(phi.values.min()), float(phi.values.max())


def contour_lines(phi: ScalarField, level: float = 0.0) -> list[np.ndarray]:
    """Marching-squares polylines of ``phi == level`` in physical coordinates."""

    h = phi.grid.h
    return [(line + 0.5) * h for line in measure.find_contours(phi.values, level)]


def simulate(
    case: BenchmarkCase,
    config: SolverConfig,
    *,
    periods: int = 1,
    on_period: Callable[[int, SolverState], None] | None = None,
) -> tuple[ScalarField, SolverState]:
    """Run *case* for whole periods and return the initial field and final state."""

    phi0 = case.initial_field(config.grid, config.w)
    solver = Solver(config, case.sampler())
    solver.initialize(phi0)
    steps = case.period_steps(config.dt)
    for period in range(1, periods + 1):
        solver.advance(steps)
        if on_period is not None:
            on_period(period, solver.state)
    return phi0, solver.state


@dataclass(slots=True)
class ConvergenceRow:
    cells: int
    l2: float
    order: float | None


def convergence_study(
    preset: str,
    grids: Sequence[int] = CONVERGENCE_GRIDS,
    cn: float = CONVERGENCE_CN,
    *,
    scheme: FaceScheme | None = None,
    chi: float = 0.5,
    pe: float = 60.0,
    u0: float = 0.02,
) -> list[ConvergenceRow]:
    """Translation to one period on each grid with ``W = cn * L0`` and ``dx = 1``."""

    rows: list[ConvergenceRow] = []
    for cells in grids:
        rows.append(convergence_cell(preset, cells, cn, scheme=scheme, chi=chi, pe=pe, u0=u0))
    return with_orders(rows)


def convergence_cell(
    preset: str,
    cells: int,
    cn: float = CONVERGENCE_CN,
    *,
    scheme: FaceScheme | None = None,
    chi: float = 0.5,
    pe: float = 60.0,
    u0: float = 0.02,
) -> ConvergenceRow:
    case = translation_case(l0=cells, u0=u0)
    config = SolverConfig.from_preset(
        preset,
        grid=case.grid(),
        face_scheme=scheme,
        chi=chi,
        w=cn * cells,
        pe=pe,
        u0=u0,
    )
    phi0, state = simulate(case, config)
    return ConvergenceRow(cells, l2_error(state.phi, phi0), None)


def with_orders(rows: list[ConvergenceRow]) -> list[ConvergenceRow]:
    """Fill in observed orders ``log(e_coarse / e_fine) / log(n_fine / n_coarse)``."""

    for coarse, fine in zip(rows, rows[1:]):
        if coarse.l2 > 0 and fine.l2 > 0:
            fine.order = math.log(coarse.l2 / fine.l2) / math.log(fine.cells / coarse.cells)
    return rows


PRESET_NAMES = ("DUGKS-AC", "DUGKS-I", "DUGKS-II")

# Reported values, keyed by (row, column).
PUBLISHED: dict[str, dict[tuple[str, str], float]] = {
    "table1": {
        (preset, scheme): value
        for preset, values in (
            ("DUGKS-AC", (0.3528, 0.1244, 0.0278, 0.0111)),
            ("DUGKS-I", (0.3747, 0.0999, 0.0160, 0.0064)),
            ("DUGKS-II", (0.3747, 0.0999, 0.0160, 0.0064)),
        )
        for scheme, value in zip(("CDI2", "CDI4", "WENO-Z3", "WENO-Z5"), values)
    },
    "table2": {
        (preset, pe): value
        for preset, values in (
            ("DUGKS-AC", (0.0108, 0.0416, 0.0577, 0.0829, 0.0901)),
            ("DUGKS-I", (0.0077, 0.0032, 0.0059, 0.1147, 0.1907)),
            ("DUGKS-II", (0.0077, 0.0032, 0.0059, 0.0948, 0.1906)),
        )
        for pe, value in zip(("50", "250", "500", "1000", "2000"), values)
    },
    "table3": {
        (preset, chi): value
        for preset, values in (
            ("DUGKS-AC", (0.0196, 0.0117, 0.0091, 0.0111, 0.025, 0.041)),
            ("DUGKS-I", (0.0196, 0.0118, 0.0073, 0.0064, 0.0052, 0.0052)),
            ("DUGKS-II", (0.0196, 0.0118, 0.0073, 0.0064, 0.0051, 0.0051)),
        )
        for chi, value in zip(("0.1", "0.2", "0.4", "0.5", "0.8", "1.0"), values)
    },
    "table4": {
        (preset, str(cells)): value
        for preset, values in (
            ("DUGKS-AC", (0.2860, 0.1912, 0.1090, 0.0360)),
            ("DUGKS-I", (6.998e-2, 2.793e-2, 4.294e-3, 4.220e-4)),
            ("DUGKS-II", (6.997e-2, 2.792e-2, 4.291e-3, 4.210e-4)),
            ("LBE-AC", (1.036e-1, 3.448e-2, 4.991e-3, 7.66e-4)),
        )
        for cells, value in zip(CONVERGENCE_GRIDS, values)
    },
    "table4_order": {
        (preset, str(cells)): value
        for preset, values in (
            ("DUGKS-AC", (0.56, 0.81, 1.60)),
            ("DUGKS-I", (1.36, 2.70, 3.34)),
            ("DUGKS-II", (1.33, 2.70, 3.35)),
            ("LBE-AC", (1.59, 2.79, 2.70)),
        )
        for cells, value in zip(CONVERGENCE_GRIDS[1:], values)
    },
    "vortex_metrics": {
        ("LBE-AC", "l2"): 0.0666,
        ("DUGKS-AC", "l2"): 0.0779,
        ("DUGKS-I", "l2"): 0.0579,
        ("DUGKS-II", "l2"): 0.0579,
        ("DUGKS-AC", "mass_loss"): 5.73e-2,
        ("LBE-AC", "mass_loss"): 5.65e-2,
        ("DUGKS-I", "mass_loss"): 6.34e-2,
        ("DUGKS-II", "mass_loss"): 6.34e-2,
    },
}


__all__ = [
    "BenchmarkCase",
    "CaseKind",
    "ConvergenceRow",
    "DEFAULT_L0",
    "PRESET_NAMES",
    "PUBLISHED",
    "contour_lines",
    "convergence_cell",
    "convergence_study",
    "divergence",
    "init_circle",
    "init_zalesak",
    "l2_error",
    "make_case",
    "phi_extrema",
    "positive_mass",
    "simulate",
    "slotted_disk_distance",
    "total_mass",
    "translation_case",
    "velocity",
    "vortex_case",
    "with_orders",
    "zalesak_case",
]
