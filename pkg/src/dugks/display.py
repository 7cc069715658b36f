"""Helper functions for presenting run progress and results."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:  # Avoid circular imports at runtime
    from .config import RunSpec
    from .runner import PeriodReport


def describe_artifacts(files: Sequence[Path]) -> str:
    """Count snapshots and contours; name the remaining files."""

    snapshots = contours = 0
    others = set()
    for path in files:
        if path.name.startswith("phi_"):
            if path.suffix != ".txt":
                snapshots += 1
        elif path.name.startswith("contour_"):
            contours += 1
        else:
            others.add(path.name)
    return f"snapshots: {snapshots}, contours: {contours}, other files: {', '.join(sorted(others))}"


def describe_spec(spec: "RunSpec") -> str:
    case = spec.case()
    return (
        f"{spec.benchmark.value} {case.grid().nx}x{case.grid().ny}, {spec.preset}, "
        f"{spec.scheme.value}, chi={spec.chi:g}, Pe={spec.pe:g}, W={spec.width:g}"
    )


def describe_period(report: "PeriodReport") -> str:
    label = f"{report.period:g}"
    l2 = "n/a" if report.l2 is None else f"{report.l2:.4e}"
    return (
        f"Period {label}: step {report.step}, t={report.time:g}, L2={l2}, "
        f"mass+={report.positive_mass:.6g}, phi in [{report.phi_min:.6f}, {report.phi_max:.6f}]"
    )


def format_metric(value: float | None) -> str:
    if value is None:
        return "-"
    return f"{value:.4g}"
