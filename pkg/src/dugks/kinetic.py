"""Kinetic models for the conservative Allen-Cahn equation.

Two equilibrium/forcing variants are provided:

* ``Variant.A``: second-order equilibrium in ``u`` and the plain interface force
  ``w_a Theta xi_a . n``.
* ``Variant.B``: equilibrium linear in ``u``; the force carries an extra
  ``w_a xi_a . d(phi u)/dt / cs2`` term that restores the first moment.

The transforms between the auxiliary populations of the DUGKS cycle live here as
well. All functions broadcast over leading axes, populations on the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .lattice import D2Q9, LatticeD2Q9, moment2


class Variant(Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True, slots=True)
class KineticModel:
    variant: Variant
    w: float
    tau_f: float
    lattice: LatticeD2Q9 = field(default=D2Q9)

    def __post_init__(self) -> None:
        if not self.w > 0:
            raise ValueError(f"Interface width W must be positive, got {self.w}")
        if not self.tau_f > 0:
            raise ValueError(f"Relaxation time must be positive, got {self.tau_f}")

    @property
    def mobility(self) -> float:
        return mobility(self)


def mobility(model: KineticModel) -> float:
    return model.lattice.cs2 * model.tau_f


def relaxation_time(u0: float, w: float, pe: float, cs2: float = D2Q9.cs2) -> float:
    """``tau_f = M / cs2`` with ``M = U0 W / Pe`` (interface width as length scale)."""

    if not pe > 0:
        raise ValueError(f"Peclet number must be positive, got {pe}")
    return u0 * w / (pe * cs2)


def mach_number(u: np.ndarray, lattice: LatticeD2Q9 = D2Q9) -> float:
    speed = np.sqrt(np.sum(np.asarray(u, dtype=np.float64) ** 2, axis=-1))
    return float(np.max(speed)) / lattice.sound_speed


def theta(phi: np.ndarray | float, w: float) -> np.ndarray | float:
    return 2.0 * (1.0 - phi * phi) / w


def equilibrium(model: KineticModel, phi: np.ndarray | float, u: np.ndarray) -> np.ndarray:
    lattice = model.lattice
    cs2 = lattice.cs2
    phi = np.asarray(phi, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    xu = u @ lattice.velocities.T
    bracket = 1.0 + xu / cs2
    if model.variant is Variant.A:
        uu = np.sum(u * u, axis=-1)[..., None]
        bracket = bracket + xu * xu / (2.0 * cs2 * cs2) - uu / (2.0 * cs2)
    return lattice.weights * phi[..., None] * bracket


def source_term(
    model: KineticModel,
    theta_value: np.ndarray | float,
    normal: np.ndarray,
    dtphiu: np.ndarray | None = None,
) -> np.ndarray:
    """Forcing populations; *dtphiu* is ignored for variant A."""

    lattice = model.lattice
    theta_value = np.asarray(theta_value, dtype=np.float64)
    xn = np.asarray(normal, dtype=np.float64) @ lattice.velocities.T
    force = lattice.weights * theta_value[..., None] * xn
    if model.variant is Variant.B and dtphiu is not None:
        xd = np.asarray(dtphiu, dtype=np.float64) @ lattice.velocities.T
        force = force + lattice.weights * xd / lattice.cs2
    return force


def force_second_moment(
    model: KineticModel,
    theta_value: np.ndarray | float,
    normal: np.ndarray,
    dtphiu: np.ndarray | None = None,
) -> np.ndarray:
    """Second moment tensor of the forcing; it vanishes for both variants on D2Q9."""

    return moment2(source_term(model, theta_value, normal, dtphiu), model.lattice)


def f_hat_plus_from_f_tilde(f_tilde, feq, force, tau_f: float, dt: float) -> np.ndarray:
    s = 0.5 * dt
    denom = 2.0 * tau_f + dt
    return (
        (2.0 * tau_f - s) / denom * np.asarray(f_tilde)
        + 3.0 * s / denom * np.asarray(feq)
        + 3.0 * tau_f * s / denom * np.asarray(force)
    )


def f_tilde_plus(f_tilde, feq, force, tau_f: float, dt: float) -> np.ndarray:
    denom = 2.0 * tau_f + dt
    return (
        (2.0 * tau_f - dt) / denom * np.asarray(f_tilde)
        + 2.0 * dt / denom * np.asarray(feq)
        + 2.0 * tau_f * dt / denom * np.asarray(force)
    )


def f_original_from_f_hat(f_hat, feq, force, tau_f: float, s: float) -> np.ndarray:
    denom = 2.0 * tau_f + s
    return (
        2.0 * tau_f / denom * np.asarray(f_hat)
        + s / denom * np.asarray(feq)
        + tau_f * s / denom * np.asarray(force)
    )


def f_hat_from_f_original(f, feq, force, tau_f: float, s: float) -> np.ndarray:
    """Inverse of :func:`f_original_from_f_hat`."""

    return (
        (2.0 * tau_f + s) / (2.0 * tau_f) * np.asarray(f)
        - s / (2.0 * tau_f) * np.asarray(feq)
        - 0.5 * s * np.asarray(force)
    )


__all__ = [
    "KineticModel",
    "Variant",
    "equilibrium",
    "f_hat_from_f_original",
    "f_hat_plus_from_f_tilde",
    "f_original_from_f_hat",
    "f_tilde_plus",
    "force_second_moment",
    "mach_number",
    "mobility",
    "relaxation_time",
    "source_term",
    "theta",
]
