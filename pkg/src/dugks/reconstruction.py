"""Face interpolation schemes and the face derivative stencils.

Every function here is elementwise: stencil entries may be Python floats or numpy
arrays of a common shape, in which case all faces are reconstructed at once.
Stencils are ordered along the face normal and centred on the face ``i + 1/2``,
i.e. a stencil of length ``2k`` holds the cells ``i - k + 1 .. i + k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

ArrayLike = float | np.ndarray

WENO_EPS = 1e-6
WENO_P = 1

Z3_LINEAR_WEIGHTS = (2.0 / 3.0, 1.0 / 3.0)
Z5_LINEAR_WEIGHTS = (0.1, 0.6, 0.3)


class SchemeKind(Enum):
    CDI2 = "CDI2"
    CDI4 = "CDI4"
    WENO_Z3 = "WENO-Z3"
    WENO_Z5 = "WENO-Z5"

    @classmethod
    def parse(cls, text: str) -> SchemeKind:
        key = text.strip().upper().replace("_", "-")
        aliases = {"2CDI": "CDI2", "4CDI": "CDI4", "WZ3": "WENO-Z3", "WZ5": "WENO-Z5"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"Unknown face scheme {text!r}")


# Cells needed on each side of the face.
_HALF_WIDTH = {
    SchemeKind.CDI2: 1,
    SchemeKind.CDI4: 2,
    SchemeKind.WENO_Z3: 2,
    SchemeKind.WENO_Z5: 3,
}


@dataclass(frozen=True, slots=True)
class FaceScheme:
    kind: SchemeKind = SchemeKind.WENO_Z5
    weno_eps: float = WENO_EPS
    weno_p: int = WENO_P

    def __post_init__(self) -> None:
        if not self.weno_eps > 0:
            raise ValueError(f"weno_eps must be positive, got {self.weno_eps}")
        if self.weno_p < 1:
            raise ValueError(f"weno_p must be at least 1, got {self.weno_p}")

    @property
    def half_width(self) -> int:
        return _HALF_WIDTH[self.kind]

    @property
    def is_weno(self) -> bool:
        return self.kind in (SchemeKind.WENO_Z3, SchemeKind.WENO_Z5)

    @property
    def label(self) -> str:
        return self.kind.value


def _centred(stencil: Sequence[ArrayLike], half_width: int) -> dict[int, ArrayLike]:
    """Map offsets ``-half_width + 1 .. half_width`` (relative to cell i) to values."""

    size = len(stencil)
    if size % 2 or size < 2 * half_width:
        raise ValueError(
            f"Stencil of {size} values cannot feed a scheme needing {2 * half_width}"
        )
    centre = size // 2 - 1
    return {k: stencil[centre + k] for k in range(-half_width + 1, half_width + 1)}


def _z_weights(
    indicators: Sequence[ArrayLike],
    linear: Sequence[float],
    tau: ArrayLike,
    eps: float,
    p: int,
) -> list[ArrayLike]:
    raw = [g * (1.0 + (tau / (eps + b)) ** p) for g, b in zip(linear, indicators)]
    norm = sum(raw[1:], raw[0])
    return [r / norm for r in raw]


def _z3_upwind(fm1, f0, f1, eps, p):
    b1 = (f1 - f0) ** 2
    b2 = (f0 - fm1) ** 2
    tau = abs(b1 - b2)
    weights = _z_weights((b1, b2), Z3_LINEAR_WEIGHTS, tau, eps, p)
    candidates = (0.5 * f0 + 0.5 * f1, -0.5 * fm1 + 1.5 * f0)
    return weights, candidates


def _z5_upwind(fm2, fm1, f0, f1, f2, eps, p):
    b0 = 13.0 / 12.0 * (fm2 - 2.0 * fm1 + f0) ** 2 + 0.25 * (fm2 - 4.0 * fm1 + 3.0 * f0) ** 2
    b1 = 13.0 / 12.0 * (fm1 - 2.0 * f0 + f1) ** 2 + 0.25 * (fm1 - f1) ** 2
    b2 = 13.0 / 12.0 * (f0 - 2.0 * f1 + f2) ** 2 + 0.25 * (3.0 * f0 - 4.0 * f1 + f2) ** 2
    tau = abs(b0 - b2)
    weights = _z_weights((b0, b1, b2), Z5_LINEAR_WEIGHTS, tau, eps, p)
    candidates = (
        fm2 / 3.0 - 7.0 / 6.0 * fm1 + 11.0 / 6.0 * f0,
        -fm1 / 6.0 + 5.0 / 6.0 * f0 + f1 / 3.0,
        f0 / 3.0 + 5.0 / 6.0 * f1 - f2 / 6.0,
    )
    return weights, candidates


def _weno_biased(scheme: FaceScheme, cells: dict[int, ArrayLike], wind: int):
    """Weights and candidate values, biased towards the cell upstream of *wind*."""

    eps, p = scheme.weno_eps, scheme.weno_p
    if scheme.kind is SchemeKind.WENO_Z3:
        if wind > 0:
            return _z3_upwind(cells[-1], cells[0], cells[1], eps, p)
        return _z3_upwind(cells[2], cells[1], cells[0], eps, p)
    if wind > 0:
        return _z5_upwind(cells[-2], cells[-1], cells[0], cells[1], cells[2], eps, p)
    return _z5_upwind(cells[3], cells[2], cells[1], cells[0], cells[-1], eps, p)


def _combine(weights, candidates) -> ArrayLike:
    value = weights[0] * candidates[0]
    for w, c in zip(weights[1:], candidates[1:]):
        value = value + w * c
    return value


def face_value(scheme: FaceScheme, stencil: Sequence[ArrayLike], wind: int = 1) -> ArrayLike:
    """Interpolate the value at face ``i + 1/2``.

    *wind* is the sign of the velocity component normal to the face. WENO schemes
    bias towards the upstream side; with ``wind == 0`` the two mirrored
    reconstructions are averaged. Central schemes ignore *wind*.
    """

    cells = _centred(stencil, scheme.half_width)
    if scheme.kind is SchemeKind.CDI2:
        return 0.5 * (cells[0] + cells[1])
    if scheme.kind is SchemeKind.CDI4:
        return (7.0 * (cells[0] + cells[1]) - cells[-1] - cells[2]) / 12.0
    if wind == 0:
        left = _combine(*_weno_biased(scheme, cells, 1))
        right = _combine(*_weno_biased(scheme, cells, -1))
        return 0.5 * (left + right)
    return _combine(*_weno_biased(scheme, cells, 1 if wind > 0 else -1))


def weno_weights(scheme: FaceScheme, stencil: Sequence[ArrayLike], wind: int = 1) -> list[ArrayLike]:
    """Return the normalised nonlinear weights of a WENO reconstruction."""

    if not scheme.is_weno:
        raise ValueError(f"{scheme.label} has no nonlinear weights")
    cells = _centred(stencil, scheme.half_width)
    weights, _ = _weno_biased(scheme, cells, 1 if wind >= 0 else -1)
    return weights


def face_first_derivatives(
    x_cells: Sequence[ArrayLike], y_faces: Sequence[ArrayLike], h: float
) -> tuple[ArrayLike, ArrayLike]:
    """Normal and tangential derivatives at face ``(i + 1/2, j)``.

    *x_cells* holds cells ``i - 1 .. i + 2`` of row ``j``; *y_faces* holds the face
    values of rows ``j - 2 .. j + 2`` at the same face column.
    """

    fm1, f0, f1, f2 = x_cells
    gm2, gm1, _, g1, g2 = y_faces
    dx = (fm1 - 15.0 * f0 + 15.0 * f1 - f2) / (12.0 * h)
    dy = (8.0 * (g1 - gm1) - g2 + gm2) / (12.0 * h)
    return dx, dy


def face_second_derivatives(
    x_cells: Sequence[ArrayLike],
    y_faces: Sequence[ArrayLike],
    xy_block: Sequence[ArrayLike],
    h: float,
) -> tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Second derivatives at face ``(i + 1/2, j)``.

    *xy_block* is ``(f[i, j-1], f[i, j+1], f[i+1, j-1], f[i+1, j+1])``.
    """

    fm1, f0, f1, f2 = x_cells
    gm1, g0, g1 = y_faces
    a_lo, a_hi, b_lo, b_hi = xy_block
    h2 = h * h
    dxx = (f2 - f1 - f0 + fm1) / (2.0 * h2)
    dyy = (g1 - 2.0 * g0 + gm1) / h2
    dxy = (b_hi - b_lo - a_hi + a_lo) / (2.0 * h2)
    return dxx, dyy, dxy


def cdi2_face_derivatives(
    x_cells: Sequence[ArrayLike], y_faces: Sequence[ArrayLike], h: float
) -> tuple[ArrayLike, ArrayLike]:
    """Second-order face derivatives from ``(f_i, f_{i+1})`` and faces ``(j-1, j+1)``."""

    f0, f1 = x_cells
    gm1, g1 = y_faces
    return (f1 - f0) / h, (g1 - gm1) / (2.0 * h)


def isotropic_face_value(rows: Sequence[Sequence[ArrayLike]]) -> ArrayLike:
    """Row-filtered CDI2 value; *rows* are the ``(f_i, f_{i+1})`` pairs of ``j-1, j, j+1``."""

    lo, mid, hi = (0.5 * (a + b) for a, b in rows)
    return (lo + 4.0 * mid + hi) / 6.0


def isotropic_face_derivative(rows: Sequence[Sequence[ArrayLike]], h: float) -> ArrayLike:
    """Row-filtered normal derivative; *rows* as in :func:`isotropic_face_value`."""

    lo, mid, hi = ((b - a) / h for a, b in rows)
    return (lo + 10.0 * mid + hi) / 12.0


__all__ = [
    "FaceScheme",
    "SchemeKind",
    "WENO_EPS",
    "WENO_P",
    "Z3_LINEAR_WEIGHTS",
    "Z5_LINEAR_WEIGHTS",
    "cdi2_face_derivatives",
    "face_first_derivatives",
    "face_second_derivatives",
    "face_value",
    "isotropic_face_derivative",
    "isotropic_face_value",
    "weno_weights",
]
