"""The DUGKS time step on a periodic grid.

Only ``f_tilde`` is carried between steps. One step:

1. ``phi``, ``f_eq`` and the force at cell centres (time ``t``);
2. ``f_hat_plus`` at cell centres;
3. ``f_hat`` at every face, traced back along the characteristic with a linear or
   parabolic reconstruction of ``f_hat_plus`` around the face centre;
4. face ``phi``, ``f_eq`` and force at ``t + dt/2``, then the original ``f``;
5. ``f_tilde_plus`` at centres minus the flux divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterator

import numpy as np

from .fields import (
    NORMAL_EPS,
    DistField,
    Grid2D,
    GridError,
    ScalarField,
    VectorField,
    cell_centers,
    central_gradient,
    face_centers,
    interface_normal,
    isotropic_gradient,
    shifted,
    total,
)
from .kinetic import (
    KineticModel,
    Variant,
    equilibrium,
    f_hat_plus_from_f_tilde,
    f_original_from_f_hat,
    f_tilde_plus,
    relaxation_time,
    source_term,
    theta,
)
from .lattice import D2Q9, LatticeD2Q9, moment0
from .reconstruction import (
    FaceScheme,
    face_first_derivatives,
    face_second_derivatives,
    face_value,
)

VelocitySampler = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


class FluxMode(Enum):
    LINEAR = "linear"
    PARABOLIC = "parabolic"


class GradientScheme(Enum):
    ISOTROPIC = "isotropic"
    CENTRAL = "central"


class TimeDerivative(Enum):
    """How variant B estimates ``d(phi u)/dt`` in its force."""

    BACKWARD = "backward"
    ZERO = "zero"


PRESETS: dict[str, tuple[Variant, FluxMode]] = {
    "DUGKS-AC": (Variant.B, FluxMode.LINEAR),
    "DUGKS-I": (Variant.A, FluxMode.PARABOLIC),
    "DUGKS-II": (Variant.B, FluxMode.PARABOLIC),
}


class DivergenceError(RuntimeError):
    """Raised when a step produces non-finite populations."""

    def __init__(self, step: int, last_metrics: dict[str, float] | None = None):
        super().__init__(f"Non-finite values after step {step}")
        self.step = step
        self.last_metrics = dict(last_metrics or {})


def derived_timestep(config: SolverConfig) -> float:
    if not 0.0 < config.chi <= 1.0:
        raise ValueError(f"chi must lie in (0, 1], got {config.chi}")
    return config.chi * config.grid.h


def classic_timestep(cfl: float, dx_min: float, xi_max: float, u_max: float) -> float:
    """The unscaled rule ``dt = CFL dx / (|xi|max + |u|max)``."""

    return cfl * dx_min / (xi_max + u_max)


@dataclass(frozen=True, slots=True)
class SolverConfig:
    model: KineticModel
    flux_mode: FluxMode
    face_scheme: FaceScheme
    grid: Grid2D
    chi: float = 0.5
    pe: float = 60.0
    u0: float = 0.02
    gradient: GradientScheme = GradientScheme.ISOTROPIC
    normal_eps: float = NORMAL_EPS
    dtphiu: TimeDerivative = TimeDerivative.BACKWARD

    def __post_init__(self) -> None:
        if not 0.0 < self.chi <= 1.0:
            raise ValueError(f"chi must lie in (0, 1], got {self.chi}")
        if self.normal_eps < 0:
            raise ValueError(f"normal_eps must be non-negative, got {self.normal_eps}")

    @classmethod
    def create(
        cls,
        *,
        variant: Variant,
        flux_mode: FluxMode,
        grid: Grid2D,
        face_scheme: FaceScheme | None = None,
        chi: float = 0.5,
        w: float = 4.0,
        pe: float = 60.0,
        u0: float = 0.02,
        lattice: LatticeD2Q9 = D2Q9,
        **options: Any,
    ) -> SolverConfig:
        tau_f = relaxation_time(u0, w, pe, lattice.cs2)
        model = KineticModel(variant, w, tau_f, lattice)
        return cls(
            model=model,
            flux_mode=flux_mode,
            face_scheme=face_scheme or FaceScheme(),
            grid=grid,
            chi=chi,
            pe=pe,
            u0=u0,
            **options,
        )

    @classmethod
    def from_preset(cls, preset: str, **kwargs: Any) -> SolverConfig:
        try:
            variant, flux_mode = PRESETS[preset]
        except KeyError:
            raise ValueError(f"Unknown preset {preset!r}") from None
        return cls.create(variant=variant, flux_mode=flux_mode, **kwargs)

    @property
    def dt(self) -> float:
        return derived_timestep(self)

    @property
    def w(self) -> float:
        return self.model.w

    @property
    def tau_f(self) -> float:
        return self.model.tau_f


@dataclass(slots=True)
class SolverState:
    f_tilde: DistField
    phi: ScalarField
    phiu_prev: VectorField
    time: float = 0.0
    step_count: int = 0


def global_mass(state: SolverState) -> float:
    return total(state.phi.values) * state.phi.grid.cell_area


def initialize(config: SolverConfig, phi0: ScalarField, sampler: VelocitySampler) -> SolverState:
    if phi0.grid != config.grid:
        raise GridError(f"Initial field is on {phi0.grid}, solver expects {config.grid}")
    if not phi0.is_finite():
        raise ValueError("Initial order parameter contains non-finite values")

    dt = config.dt
    x, y = cell_centers(config.grid)
    u = np.asarray(sampler(x, y, 0.0), dtype=np.float64)
    phi = phi0.values.copy()
    normal = _cell_normal(config, phi0)
    feq = equilibrium(config.model, phi, u)
    force = source_term(config.model, theta(phi, config.w), normal, np.zeros_like(u))
    f_tilde = feq - 0.5 * dt * force
    return SolverState(
        f_tilde=DistField(config.grid, f_tilde),
        phi=ScalarField(config.grid, moment0(f_tilde)),
        phiu_prev=VectorField(config.grid, phi[..., None] * u),
    )


def step(state: SolverState, config: SolverConfig, sampler: VelocitySampler) -> SolverState:
    model = config.model
    grid = config.grid
    dt = config.dt
    s = 0.5 * dt
    tau_f = model.tau_f

    x, y = cell_centers(grid)
    u = np.asarray(sampler(x, y, state.time), dtype=np.float64)
    phi = state.phi.values
    normal = _cell_normal(config, state.phi)
    phiu = phi[..., None] * u
    dtphiu = None
    if model.variant is Variant.B:
        if config.dtphiu is TimeDerivative.BACKWARD:
            dtphiu = (phiu - state.phiu_prev.values) / dt
        else:
            dtphiu = np.zeros_like(phiu)

    feq = equilibrium(model, phi, u)
    force = source_term(model, theta(phi, config.w), normal, dtphiu)
    f_tilde = state.f_tilde.values
    f_hat_plus = f_hat_plus_from_f_tilde(f_tilde, feq, force, tau_f, dt)

    update = f_tilde_plus(f_tilde, feq, force, tau_f, dt)
    for axis in (0, 1):
        flux = _face_flux(config, sampler, f_hat_plus, normal, dtphiu, state.time + s, axis)
        update -= dt / grid.h * (flux - shifted(flux, -1, axis))

    step_count = state.step_count + 1
    if not np.isfinite(update).all():
        raise DivergenceError(step_count)
    return SolverState(
        f_tilde=DistField(grid, update),
        phi=ScalarField(grid, moment0(update)),
        phiu_prev=VectorField(grid, phiu),
        time=step_count * dt,
        step_count=step_count,
    )


def _cell_normal(config: SolverConfig, phi: ScalarField) -> np.ndarray:
    if config.gradient is GradientScheme.CENTRAL:
        grad = central_gradient(phi)
    else:
        grad = isotropic_gradient(phi, config.model.lattice)
    return interface_normal(grad, config.normal_eps).values


def _face_flux(
    config: SolverConfig,
    sampler: VelocitySampler,
    f_hat_plus: np.ndarray,
    normal: np.ndarray,
    dtphiu: np.ndarray | None,
    time: float,
    axis: int,
) -> np.ndarray:
    """Normal flux ``xi_n f`` through the faces between cells ``k`` and ``k + 1``."""

    model = config.model
    s = 0.5 * config.dt
    f_hat = characteristic_face_values(config, f_hat_plus, axis)
    phi_face = f_hat.sum(axis=-1)
    xf, yf = face_centers(config.grid, axis)
    u_face = np.asarray(sampler(xf, yf, time), dtype=np.float64)
    normal_face = 0.5 * (normal + shifted(normal, 1, axis))
    dtphiu_face = None
    if dtphiu is not None:
        dtphiu_face = 0.5 * (dtphiu + shifted(dtphiu, 1, axis))

    feq = equilibrium(model, phi_face, u_face)
    force = source_term(model, theta(phi_face, config.w), normal_face, dtphiu_face)
    f_face = f_original_from_f_hat(f_hat, feq, force, model.tau_f, s)
    return f_face * model.lattice.velocities[:, axis]


def characteristic_face_values(
    config: SolverConfig, f_hat_plus: np.ndarray, axis: int
) -> np.ndarray:
    """``f_hat_plus`` at ``x_b - xi s`` for every face normal to *axis*.

    Entry ``k`` along *axis* belongs to the face between cells ``k`` and ``k + 1``.
    """

    scheme = config.face_scheme
    h = config.grid.h
    s = 0.5 * config.dt
    xi = config.model.lattice.velocities
    xi_n = xi[:, axis]
    xi_t = xi[:, 1 - axis]

    # Work in a frame where the face normal is axis 0.
    cells = f_hat_plus if axis == 0 else np.swapaxes(f_hat_plus, 0, 1)
    stencil = [shifted(cells, k, 0) for k in range(-2, 4)]
    faces = np.empty_like(cells)
    for wind in (1, -1, 0):
        idx = np.flatnonzero(np.sign(xi_n) == wind)
        if idx.size:
            faces[..., idx] = face_value(scheme, [c[..., idx] for c in stencil], wind)

    x_cells = stencil[1:5]
    y_faces = [shifted(faces, k, 1) for k in range(-2, 3)]
    d_n, d_t = face_first_derivatives(x_cells, y_faces, h)
    value = faces - s * (xi_n * d_n + xi_t * d_t)

    if config.flux_mode is FluxMode.PARABOLIC:
        left, right = stencil[2], stencil[3]
        xy_block = (
            shifted(left, -1, 1),
            shifted(left, 1, 1),
            shifted(right, -1, 1),
            shifted(right, 1, 1),
        )
        d_nn, d_tt, d_nt = face_second_derivatives(x_cells, y_faces[1:4], xy_block, h)
        value = value + 0.5 * s * s * (
            xi_n * xi_n * d_nn + 2.0 * xi_n * xi_t * d_nt + xi_t * xi_t * d_tt
        )

    return value if axis == 0 else np.swapaxes(value, 0, 1)


class Solver:
    """Couples a configuration with a velocity sampler and the evolving state."""

    def __init__(self, config: SolverConfig, sampler: VelocitySampler):
        self.config = config
        self.sampler = sampler
        self._state: SolverState | None = None

    @property
    def state(self) -> SolverState:
        if self._state is None:
            raise RuntimeError("Solver has not been initialised")
        return self._state

    def initialize(self, phi0: ScalarField) -> SolverState:
        self._state = initialize(self.config, phi0, self.sampler)
        return self._state

    def step(self) -> SolverState:
        self._state = step(self.state, self.config, self.sampler)
        return self._state

    def advance(self, steps: int) -> SolverState:
        for _ in range(steps):
            self.step()
        return self.state

    def iter_steps(self, steps: int) -> Iterator[SolverState]:
        for _ in range(steps):
            yield self.step()

    @property
    def mass(self) -> float:
        return global_mass(self.state)


def steps_for(time: float, dt: float) -> int:
    """Number of whole steps covering *time*."""

    return int(math.floor(time / dt + 0.5))


__all__ = [
    "DivergenceError",
    "FluxMode",
    "GradientScheme",
    "PRESETS",
    "Solver",
    "SolverConfig",
    "SolverState",
    "TimeDerivative",
    "VelocitySampler",
    "characteristic_face_values",
    "classic_timestep",
    "derived_timestep",
    "global_mass",
    "initialize",
    "step",
    "steps_for",
]
