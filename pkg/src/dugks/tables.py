"""Parameter sweeps that reproduce the published accuracy tables."""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .artifacts import write_csv
from .benchmarks import (
    CONVERGENCE_CN,
    CONVERGENCE_GRIDS,
    PRESET_NAMES,
    PUBLISHED,
    ConvergenceRow,
    l2_error,
    phi_extrema,
    positive_mass,
    with_orders,
)
from .config import ConfigError, build_spec
from .display import format_metric
from .fields import GridError
from .runner import mass_loss
from .solver import DivergenceError, Solver

TABLES = ("table1", "table2", "table3", "table4", "vortex_metrics", "zalesak")


@dataclass(frozen=True, slots=True)
class TableCell:
    table: str
    row: str
    column: str
    column_key: str
    settings: tuple[tuple[str, str], ...]


@dataclass(slots=True)
class CellResult:
    cell: TableCell
    metrics: dict[str, float] = field(default_factory=dict)
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


CellWorker = Callable[[TableCell, Mapping[str, str]], CellResult]


def _cells(
    table: str, base: dict[str, str], column_key: str | None, columns: Sequence[str]
) -> list[TableCell]:
    cells = []
    for preset in PRESET_NAMES:
        for column in columns:
            settings = {**base, "preset": preset}
            if column_key is not None:
                settings[column_key] = column
            cells.append(TableCell(table, preset, column, column_key or "", tuple(settings.items())))
    return cells


def table_cells(which: str, grids: Sequence[int] = CONVERGENCE_GRIDS) -> list[TableCell]:
    """Enumerate the parameter matrix of table *which*."""

    translation = {"benchmark": "translation", "l0": "100", "periods": "10"}
    if which == "table1":
        return _cells(which, translation, "scheme", ("CDI2", "CDI4", "WENO-Z3", "WENO-Z5"))
    if which == "table2":
        return _cells(which, translation, "pe", ("50", "250", "500", "1000", "2000"))
    if which == "table3":
        return _cells(which, translation, "chi", ("0.1", "0.2", "0.4", "0.5", "0.8", "1.0"))
    if which == "table4":
        base = {"benchmark": "translation", "periods": "1", "cn": repr(CONVERGENCE_CN)}
        return _cells(which, base, "l0", tuple(str(cells) for cells in grids))
    if which == "vortex_metrics":
        base = {"benchmark": "vortex", "l0": "200", "periods": "1"}
        return _cells(which, base, None, ("all",))
    if which == "zalesak":
        base = {"benchmark": "zalesak", "l0": "200", "periods": "1"}
        return _cells(which, base, None, ("all",))
    raise ValueError(f"Unknown table {which!r}; expected one of {', '.join(TABLES)}")


def _failed(cell: TableCell, exc: BaseException) -> CellResult:
    return CellResult(cell, error=f"{type(exc).__name__}: {exc}")


def run_cell(cell: TableCell, overrides: Mapping[str, str] | None = None) -> CellResult:
    """Run one cell; failures are captured on the result instead of raised."""

    raw = {key: (value, f"{cell.table} cell") for key, value in cell.settings}
    for key, value in (overrides or {}).items():
        if key not in {"preset", cell.column_key}:
            raw[key] = (value, f"override {key}")

    try:
        spec = build_spec(raw)
        case = spec.case()
        config = spec.solver_config()
        solver = Solver(config, case.sampler())
        phi0 = case.initial_field(config.grid, config.w)
        state = solver.initialize(phi0)
        steps = spec.periods * case.period_steps(config.dt)
        if spec.max_steps is not None:
            steps = min(steps, spec.max_steps)

        low, high = phi_extrema(state.phi)
        while state.step_count < steps:
            state = solver.step()
            step_low, step_high = phi_extrema(state.phi)
            low, high = min(low, step_low), max(high, step_high)
        initial_mass = positive_mass(phi0)
        metrics = {
            "l2": l2_error(state.phi, phi0),
            "mass_loss": mass_loss(initial_mass, positive_mass(state.phi)),
            "phi_min": low,
            "phi_max": high,
        }
    except (ConfigError, DivergenceError, GridError, ValueError) as exc:
        return _failed(cell, exc)
    return CellResult(cell, metrics)


def _run_all(
    cells: Sequence[TableCell],
    overrides: Mapping[str, str],
    parallel: int,
    worker: CellWorker = run_cell,
) -> list[CellResult]:
    """Run *cells* in order; an exception escaping *worker* only fails its own cell."""

    results: list[CellResult] = []
    if parallel <= 1:
        for cell in cells:
            try:
                results.append(worker(cell, overrides))
            except Exception as exc:
                results.append(_failed(cell, exc))
        return results
    with ProcessPoolExecutor(max_workers=parallel) as executor:
        futures = [executor.submit(worker, cell, dict(overrides)) for cell in cells]
        for cell, future in zip(cells, futures):
            try:
                results.append(future.result())
            except Exception as exc:
                results.append(_failed(cell, exc))
    return results


def _published(which: str, result: CellResult, metric: str) -> float | None:
    cell = result.cell
    if which == "vortex_metrics":
        return PUBLISHED[which].get((cell.row, metric))
    if metric == "order":
        return PUBLISHED["table4_order"].get((cell.row, cell.column))
    if metric != "l2":
        return None
    return PUBLISHED.get(which, {}).get((cell.row, cell.column))


def _orders(results: Sequence[CellResult]) -> None:
    """Attach observed convergence orders to successful table4 results."""

    by_preset: dict[str, list[CellResult]] = {}
    for result in results:
        if not result.failed:
            by_preset.setdefault(result.cell.row, []).append(result)
    for group in by_preset.values():
        group.sort(key=lambda result: int(result.cell.column))
        rows = with_orders(
            [ConvergenceRow(int(result.cell.column), result.metrics["l2"], None) for result in group]
        )
        for result, row in zip(group, rows):
            if row.order is not None:
                result.metrics["order"] = row.order


def _label(column: str, metric: str) -> str:
    if column == "all":
        return metric
    if metric == "l2":
        return column
    return f"{column} {metric}"


def _layout(which: str, results: Sequence[CellResult]) -> tuple[list[str], list[list]]:
    """One row per preset; each (column, metric) gets a value and a published column.

    Failed cells read ``failed``; metrics a cell does not produce stay blank.
    """

    metrics = {
        "vortex_metrics": ("l2", "mass_loss", "phi_min", "phi_max"),
        "table4": ("l2", "order"),
    }.get(which, ("l2",))
    columns = list(dict.fromkeys(result.cell.column for result in results))
    slots = [
        (column, metric)
        for position, column in enumerate(columns)
        for metric in metrics
        if not (metric == "order" and position == 0)
    ]
    header = ["row"]
    for column, metric in slots:
        header += [_label(column, metric), f"{_label(column, metric)} published"]

    by_row: dict[str, dict[str, CellResult]] = {}
    for result in results:
        by_row.setdefault(result.cell.row, {})[result.cell.column] = result
    rows = []
    for row, cells in by_row.items():
        line: list = [row]
        for column, metric in slots:
            result = cells.get(column)
            if result is None:
                line += ["", ""]
                continue
            if result.failed:
                value = "failed"
            else:
                value = result.metrics.get(metric, "")
            line += [value, _blank(_published(which, result, metric))]
        rows.append(line)
    return header, rows


def _blank(value: float | None) -> float | str:
    return "" if value is None else value


def table_driver(
    which: str,
    out_dir: Path,
    *,
    overrides: Mapping[str, str] | None = None,
    parallel: int = 1,
    grids: Sequence[int] = CONVERGENCE_GRIDS,
    presets: Sequence[str] | None = None,
    quiet: bool = False,
) -> list[CellResult]:
    """Run every cell of *which* and write ``<out_dir>/<which>.csv``."""

    cells = table_cells(which, grids)
    if presets is not None:
        cells = [cell for cell in cells if cell.row in presets]
    results = _run_all(cells, overrides or {}, parallel)
    if which == "table4":
        _orders(results)

    failures = 0
    for result in results:
        cell = result.cell
        if result.failed:
            failures += 1
            print(f"{cell.row} / {cell.column}: failed ({result.error})", file=sys.stderr)
        elif not quiet:
            values = ", ".join(f"{key}={format_metric(value)}" for key, value in result.metrics.items())
            print(f"{cell.row} / {cell.column}: {values}")

    path = out_dir / f"{which}.csv"
    header, rows = _layout(which, results)
    write_csv(path, header, rows)
    print(f"\nFinished. {len(results) - failures} of {len(results)} cells completed, written to {path}.")
    if failures:
        print(f"Warning: {failures} cell(s) failed; see messages above.", file=sys.stderr)
    return results


def convergence_driver(
    preset: str,
    out_dir: Path,
    *,
    grids: Sequence[int] = CONVERGENCE_GRIDS,
    overrides: Mapping[str, str] | None = None,
    parallel: int = 1,
    quiet: bool = False,
) -> list[CellResult]:
    """Grid refinement study for a single preset, written as ``table4.csv``."""

    if preset not in PRESET_NAMES:
        raise ConfigError(f"Unknown preset {preset!r}; expected one of {', '.join(PRESET_NAMES)}")
    return table_driver(
        "table4",
        out_dir,
        overrides=overrides,
        parallel=parallel,
        grids=grids,
        presets=(preset,),
        quiet=quiet,
    )


__all__ = [
    "CellResult",
    "TABLES",
    "TableCell",
    "convergence_driver",
    "run_cell",
    "table_cells",
    "table_driver",
]
