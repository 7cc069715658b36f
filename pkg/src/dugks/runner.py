"""Drive one benchmark run and write its artifacts as it goes."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .artifacts import (
    CsvStream,
    save_binary_snapshot,
    save_snapshot,
    write_contours,
    write_summary,
)
from .benchmarks import CaseKind, contour_lines, l2_error, phi_extrema, positive_mass, total_mass
from .config import RunSpec
from .display import describe_artifacts, describe_period, describe_spec
from .fields import ScalarField, cell_centers
from .kinetic import mach_number
from .solver import DivergenceError, Solver, steps_for

MACH_LIMIT = 0.3
TAU_RATIO_LIMIT = 1e-3


@dataclass(slots=True)
class PeriodReport:
    """Diagnostics at a period boundary (or half period for the vortex)."""

    period: float
    step: int
    time: float
    l2: float
    positive_mass: float
    total_mass: float
    phi_min: float
    phi_max: float

    def metrics(self) -> dict[str, float]:
        return {
            "period": self.period,
            "step": self.step,
            "time": self.time,
            "l2": self.l2,
            "positive_mass": self.positive_mass,
            "total_mass": self.total_mass,
            "phi_min": self.phi_min,
            "phi_max": self.phi_max,
        }


@dataclass(slots=True)
class RunResult:
    output_dir: Path
    reports: list[PeriodReport] = field(default_factory=list)
    steps: int = 0
    interrupted: bool = False
    files: list[Path] = field(default_factory=list)

    @property
    def final(self) -> PeriodReport | None:
        return self.reports[-1] if self.reports else None


class BenchmarkRunner:
    """Runs a :class:`RunSpec` and streams its diagnostics into the output directory."""

    def __init__(self, spec: RunSpec, *, quiet: bool = False) -> None:
        self.spec = spec
        self.quiet = quiet
        self.case = spec.case()
        self.config = spec.solver_config()
        self.output_dir = spec.output_dir
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.solver = Solver(self.config, self.case.sampler())
        self.files: list[Path] = []
        self._phi0: ScalarField | None = None
        self._initial_positive_mass = 0.0
        self._last_metrics: dict[str, float] = {}
        # Range of phi over every step, not only the sampled ones.
        self._running_range = (math.inf, -math.inf)
        self._mass = CsvStream(self.output_dir / "mass.csv", ("step", "time", "positive_mass", "total_mass"))
        self._extrema = CsvStream(self.output_dir / "extrema.csv", ("step", "min", "max"))
        self._errors = CsvStream(self.output_dir / "errors.csv", ("period", "l2"))
        self.files.extend((self._mass.path, self._extrema.path, self._errors.path))

    def __enter__(self) -> "BenchmarkRunner":
        return self

    def __exit__(self, exc_type: object, exc: object, tb: object) -> None:
        self.close()

    def close(self) -> None:
        for stream in (self._mass, self._extrema, self._errors):
            stream.close()

    def marks(self) -> list[tuple[float, int]]:
        """``(period label, step)`` pairs at which a :class:`PeriodReport` is produced."""

        dt = self.config.dt
        period_time = self.case.period_time
        marks: list[tuple[float, int]] = []
        for period in range(1, self.spec.periods + 1):
            if self.case.kind is CaseKind.VORTEX:
                marks.append((period - 0.5, steps_for((period - 0.5) * period_time, dt)))
            marks.append((float(period), steps_for(period * period_time, dt)))

        limit = self.spec.max_steps
        if limit is not None:
            kept = [mark for mark in marks if mark[1] <= limit]
            if not kept or kept[-1][1] < limit:
                kept.append((limit * dt / period_time, limit))
            marks = kept
        return marks

    def iter_periods(self) -> Iterator[PeriodReport]:
        """Advance the solver and yield diagnostics at every mark."""

        phi0 = self.case.initial_field(self.config.grid, self.config.w)
        state = self.solver.initialize(phi0)
        self._phi0 = phi0
        self._initial_positive_mass = positive_mass(phi0)
        self._track_range()
        self._record_series()
        self._snapshot()
        self._contour()

        check_every = self.spec.check_every
        snapshot_every = self.spec.snapshot_every
        for label, target in self.marks():
            while state.step_count < target:
                state = self.solver.step()
                self._track_range()
                if state.step_count % check_every == 0:
                    self._record_series()
                if snapshot_every and state.step_count % snapshot_every == 0:
                    self._snapshot()
            if state.step_count % check_every:
                self._record_series()
            self._contour()
            yield self._report(label)

        if not snapshot_every or state.step_count % snapshot_every:
            self._snapshot()

    def run(self) -> RunResult:
        result = RunResult(output_dir=self.output_dir, files=self.files)
        self._warn_about_regime()
        if not self.quiet:
            print(f"Running {describe_spec(self.spec)}")

        status = "completed"
        try:
            for report in self.iter_periods():
                result.reports.append(report)
                if float(report.period).is_integer():
                    self._errors.write(int(report.period), report.l2)
                if not self.quiet:
                    print(describe_period(report))
        except KeyboardInterrupt:
            print("\nInterrupted by user", file=sys.stderr)
            result.interrupted = True
            status = "interrupted"
        except DivergenceError as exc:
            exc.last_metrics = dict(self._last_metrics)
            status = f"diverged at step {exc.step}"
            print(
                f"Divergence detected at step {exc.step}; last finite metrics: {self._describe_last()}",
                file=sys.stderr,
            )
            raise
        finally:
            result.steps = self.solver.state.step_count if self._phi0 is not None else 0
            self._write_summary(result, status)
            self.close()

        if result.reports:
            final = result.reports[-1]
            print(
                f"\nFinished. {result.steps} steps, final L2 {final.l2:.4e}, "
                f"artifacts in {self.output_dir} ({describe_artifacts(self.files)})"
            )
        else:
            print("\nFinished. No period was completed.")
        return result

    def _warn_about_regime(self) -> None:
        x, y = cell_centers(self.config.grid)
        mach = mach_number(self.case.sampler()(x, y, 0.0), self.config.model.lattice)
        if mach > MACH_LIMIT:
            print(
                f"Warning: Mach number {mach:.3f} exceeds {MACH_LIMIT}; the equilibria assume low Mach.",
                file=sys.stderr,
            )
        if self.config.tau_f < TAU_RATIO_LIMIT * self.config.dt:
            print(
                f"Warning: tau_f={self.config.tau_f:.3g} is below {TAU_RATIO_LIMIT:g}*dt; "
                "expect oscillations at this Peclet number.",
                file=sys.stderr,
            )

    def _track_range(self) -> None:
        low, high = phi_extrema(self.solver.state.phi)
        self._running_range = (min(self._running_range[0], low), max(self._running_range[1], high))

    def _record_series(self) -> None:
        state = self.solver.state
        phi = state.phi
        low, high = phi_extrema(phi)
        mass = positive_mass(phi)
        self._mass.write(state.step_count, state.time, mass, total_mass(phi))
        self._extrema.write(state.step_count, low, high)
        self._last_metrics = {
            "step": state.step_count,
            "time": state.time,
            "positive_mass": mass,
            "phi_min": low,
            "phi_max": high,
        }

    def _report(self, label: float) -> PeriodReport:
        state = self.solver.state
        assert self._phi0 is not None
        low, high = phi_extrema(state.phi)
        return PeriodReport(
            period=label,
            step=state.step_count,
            time=state.time,
            l2=l2_error(state.phi, self._phi0),
            positive_mass=positive_mass(state.phi),
            total_mass=total_mass(state.phi),
            phi_min=low,
            phi_max=high,
        )

    def _snapshot(self) -> None:
        state = self.solver.state
        stem = self.output_dir / f"phi_{state.step_count:08d}"
        if self.spec.binary_snapshots:
            self.files.append(save_binary_snapshot(stem, state.phi, state.time))
            self.files.append(stem.with_suffix(".txt"))
        else:
            path = stem.with_suffix(".csv")
            save_snapshot(path, state.phi, state.time)
            self.files.append(path)

    def _contour(self) -> None:
        state = self.solver.state
        path = self.output_dir / f"contour_{state.step_count:08d}.csv"
        write_contours(path, contour_lines(state.phi))
        self.files.append(path)

    def _describe_last(self) -> str:
        if not self._last_metrics:
            return "none"
        return ", ".join(f"{key}={value:.6g}" for key, value in self._last_metrics.items())

    def _write_summary(self, result: RunResult, status: str) -> None:
        metrics: dict[str, object] = {"status": status, "steps": result.steps}
        if result.reports:
            final = result.reports[-1]
            metrics.update(final.metrics())
            if self._initial_positive_mass > 0:
                metrics["mass_loss"] = mass_loss(self._initial_positive_mass, final.positive_mass)
        low, high = self._running_range
        if low <= high:
            metrics.update(running_phi_min=low, running_phi_max=high)
        elif self._last_metrics:
            metrics.update({f"last_{key}": value for key, value in self._last_metrics.items()})
        path = self.output_dir / "summary.txt"
        write_summary(path, self.spec.echo(), metrics)
        if path not in self.files:
            self.files.append(path)


def run(spec: RunSpec, *, quiet: bool = False) -> RunResult:
    with BenchmarkRunner(spec, quiet=quiet) as runner:
        return runner.run()


def mass_loss(initial: float, final: float) -> float:
    return (initial - final) / initial if initial else math.nan


__all__ = ["BenchmarkRunner", "PeriodReport", "RunResult", "mass_loss", "run"]
