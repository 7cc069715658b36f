"""Plain-text artifacts written next to a run: field snapshots, CSV tables, summaries."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .fields import Grid2D, GridError, ScalarField


class SnapshotError(RuntimeError):
    """Raised when a snapshot or CSV artifact cannot be interpreted."""


def format_value(value: Any) -> str:
    """Render floats with 17 significant digits so they parse back unchanged."""

    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _header_line(grid: Grid2D, time: float) -> str:
    return " ".join((str(grid.nx), str(grid.ny), format_value(grid.h), format_value(time)))


def _parse_header(line: str, path: Path) -> tuple[Grid2D, float]:
    parts = line.split()
    if len(parts) != 4:
        raise SnapshotError(f"Snapshot {path} has a malformed header: {line!r}")
    try:
        grid = Grid2D(int(parts[0]), int(parts[1]), float(parts[2]))
        time = float(parts[3])
    except (ValueError, GridError) as exc:
        raise SnapshotError(f"Snapshot {path} has a malformed header: {exc}") from exc
    return grid, time


def save_snapshot(path: Path, phi: ScalarField, time: float) -> None:
    """Write *phi* as ``nx ny h time`` followed by ``i,j,value`` rows."""

    path.parent.mkdir(parents=True, exist_ok=True)
    grid = phi.grid
    buffer = io.StringIO()
    buffer.write(_header_line(grid, time) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    for (i, j), value in np.ndenumerate(phi.values):
        writer.writerow((i, j, format_value(value)))
    path.write_text(buffer.getvalue(), encoding="utf-8")


def load_snapshot(path: Path) -> tuple[ScalarField, float] | None:
    """Return the field and time stored at *path*, if any."""

    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None

    header, _, body = raw.partition("\n")
    grid, time = _parse_header(header, path)
    values = np.full(grid.shape, np.nan)
    seen = 0
    for row in csv.reader(io.StringIO(body)):
        if not row:
            continue
        try:
            i, j, value = int(row[0]), int(row[1]), float(row[2])
            values[i, j] = value
        except (ValueError, IndexError) as exc:
            raise SnapshotError(f"Snapshot {path} has a malformed row {row!r}") from exc
        seen += 1
    if seen != grid.nx * grid.ny or np.isnan(values).any():
        raise SnapshotError(f"Snapshot {path} does not cover the {grid.nx}x{grid.ny} grid")
    return ScalarField(grid, values), time


def save_binary_snapshot(path: Path, phi: ScalarField, time: float) -> Path:
    """Write ``<stem>.bin`` (little-endian float64, i-major) and a ``<stem>.txt`` header."""

    path.parent.mkdir(parents=True, exist_ok=True)
    data_path = path.with_suffix(".bin")
    data_path.write_bytes(np.ascontiguousarray(phi.values, dtype="<f8").tobytes())
    path.with_suffix(".txt").write_text(_header_line(phi.grid, time) + "\n", encoding="utf-8")
    return data_path


def load_binary_snapshot(path: Path) -> tuple[ScalarField, float] | None:
    header_path = path.with_suffix(".txt")
    try:
        header = header_path.read_text(encoding="utf-8").strip()
        payload = path.with_suffix(".bin").read_bytes()
    except FileNotFoundError:
        return None

    grid, time = _parse_header(header, header_path)
    expected = grid.nx * grid.ny * 8
    if len(payload) != expected:
        raise SnapshotError(f"Snapshot {path} holds {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f8").reshape(grid.shape).astype(np.float64)
    return ScalarField(grid, values), time


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    path.write_text(buffer.getvalue(), encoding="utf-8")


def read_csv(path: Path) -> tuple[list[str], list[list[str]]] | None:
    """Return the header and raw string rows of *path*, if it exists."""

    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None
    rows = list(csv.reader(io.StringIO(raw)))
    if not rows:
        raise SnapshotError(f"CSV file {path} is empty")
    return rows[0], rows[1:]


class CsvStream:
    """Append-as-you-go CSV writer for time series that must survive an interrupted run."""

    def __init__(self, path: Path, header: Sequence[str]):
        path.parent.mkdir(parents=True, exist_ok=True)
        self.path = path
        self._handle = path.open("w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._handle, lineterminator="\n")
        self._writer.writerow(header)

    def write(self, *values: Any) -> None:
        self._writer.writerow([format_value(value) for value in values])
        self._handle.flush()

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()


def write_contours(path: Path, lines: Sequence[np.ndarray]) -> None:
    rows = (
        (index, point[0], point[1])
        for index, line in enumerate(lines)
        for point in line
    )
    write_csv(path, ("line", "x", "y"), rows)


def write_summary(path: Path, config_text: str, metrics: dict[str, Any]) -> None:
    """Persist the resolved configuration followed by the final metrics."""

    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [config_text.rstrip("\n"), "# final metrics"]
    lines.extend(f"{key} = {format_value(value)}" for key, value in metrics.items())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_summary_metrics(path: Path) -> dict[str, str] | None:
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None
    _, marker, tail = raw.partition("# final metrics")
    if not marker:
        raise SnapshotError(f"Summary {path} has no metrics section")
    metrics: dict[str, str] = {}
    for line in tail.splitlines():
        key, sep, value = line.partition("=")
        if sep:
            metrics[key.strip()] = value.strip()
    return metrics


__all__ = [
    "CsvStream",
    "SnapshotError",
    "format_value",
    "load_binary_snapshot",
    "load_snapshot",
    "read_csv",
    "read_summary_metrics",
    "save_binary_snapshot",
    "save_snapshot",
    "write_contours",
    "write_csv",
    "write_summary",
]
