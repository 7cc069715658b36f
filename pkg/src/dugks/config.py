"""Run configuration: flat ``key = value`` files with environment and flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from .benchmarks import BenchmarkCase, CaseKind, make_case
from .fields import Grid2D, GridError, MIN_CELLS, NORMAL_EPS
from .kinetic import Variant
from .reconstruction import WENO_EPS, WENO_P, FaceScheme, SchemeKind
from .solver import PRESETS, FluxMode, GradientScheme, SolverConfig, TimeDerivative

ENV_PREFIX = "DUGKS_"
CUSTOM_PRESET = "custom"


class ConfigError(RuntimeError):
    """Raised when a run configuration cannot be resolved."""


@dataclass(slots=True)
class RunSpec:
    benchmark: CaseKind
    preset: str = "DUGKS-I"
    model: Variant | None = None
    flux_mode: FluxMode | None = None
    scheme: SchemeKind = SchemeKind.WENO_Z5
    weno_eps: float = WENO_EPS
    weno_p: int = WENO_P
    chi: float = 0.5
    pe: float = 60.0
    w: float = 4.0
    u0: float = 0.02
    l0: int | None = None
    periods: int = 1
    n_vortex: int = 8
    cn: float | None = None
    gradient: GradientScheme = GradientScheme.ISOTROPIC
    normal_eps: float = NORMAL_EPS
    dtphiu: TimeDerivative = TimeDerivative.BACKWARD
    slot_length: float = 1.75
    output: Path | None = None
    snapshot_every: int = 0
    binary_snapshots: bool = False
    max_steps: int | None = None
    check_every: int = 100
    sources: dict[str, str] = field(default_factory=dict, compare=False, repr=False)

    @property
    def face_scheme(self) -> FaceScheme:
        return FaceScheme(self.scheme, self.weno_eps, self.weno_p)

    @property
    def output_dir(self) -> Path:
        return self.output if self.output is not None else Path("runs") / self.benchmark.value

    @property
    def width(self) -> float:
        if self.cn is not None:
            return self.cn * self.case().l0
        return self.w

    def case(self) -> BenchmarkCase:
        return make_case(
            self.benchmark,
            l0=self.l0,
            u0=self.u0,
            n_vortex=self.n_vortex,
            slot_length=self.slot_length,
        )

    def grid(self) -> Grid2D:
        return self.case().grid()

    def variant_and_mode(self) -> tuple[Variant, FluxMode]:
        if self.preset == CUSTOM_PRESET:
            if self.model is None or self.flux_mode is None:
                raise ConfigError("preset 'custom' needs both 'model' and 'flux_mode'")
            return self.model, self.flux_mode
        return PRESETS[self.preset]

    def solver_config(self) -> SolverConfig:
        variant, flux_mode = self.variant_and_mode()
        return SolverConfig.create(
            variant=variant,
            flux_mode=flux_mode,
            grid=self.grid(),
            face_scheme=self.face_scheme,
            chi=self.chi,
            w=self.width,
            pe=self.pe,
            u0=self.u0,
            gradient=self.gradient,
            normal_eps=self.normal_eps,
            dtphiu=self.dtphiu,
        )

    def echo(self) -> str:
        """The resolved configuration as re-parsable ``key = value`` lines."""

        lines = []
        for key in KEYS:
            value = getattr(self, key)
            if value is None:
                continue
            lines.append(f"{key} = {_render(value)}")
        return "\n".join(lines) + "\n"


def _render(value: Any) -> str:
    if hasattr(value, "value"):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise ValueError(f"must be positive, got {text}")
    return value


def _chi(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise ValueError(f"must lie in (0, 1], got {text}")
    return value


def _int_at_least(minimum: int) -> Callable[[str], int]:
    def convert(text: str) -> int:
        value = int(text)
        if value < minimum:
            raise ValueError(f"must be at least {minimum}, got {text}")
        return value

    return convert


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"expected a boolean, got {text}")


def _enum(kind: type) -> Callable[[str], Any]:
    def convert(text: str) -> Any:
        try:
            return kind(text.strip().lower())
        except ValueError:
            choices = ", ".join(str(member.value) for member in kind)
            raise ValueError(f"expected one of {choices}, got {text}") from None

    return convert


def _variant(text: str) -> Variant:
    try:
        return Variant(text.strip().upper())
    except ValueError:
        raise ValueError(f"expected A or B, got {text}") from None


def _preset(text: str) -> str:
    value = text.strip()
    for name in (*PRESETS, CUSTOM_PRESET):
        if value.upper() == name.upper():
            return name
    raise ValueError(f"expected one of {', '.join((*PRESETS, CUSTOM_PRESET))}, got {text}")


def _non_negative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise ValueError(f"must be non-negative, got {text}")
    return value


KEYS: dict[str, Callable[[str], Any]] = {
    "benchmark": _enum(CaseKind),
    "preset": _preset,
    "model": _variant,
    "flux_mode": _enum(FluxMode),
    "scheme": SchemeKind.parse,
    "weno_eps": _positive_float,
    "weno_p": _int_at_least(1),
    "chi": _chi,
    "pe": _positive_float,
    "w": _positive_float,
    "u0": _positive_float,
    "l0": _int_at_least(MIN_CELLS),
    "periods": _int_at_least(1),
    "n_vortex": _int_at_least(1),
    "cn": _positive_float,
    "gradient": _enum(GradientScheme),
    "normal_eps": _non_negative_float,
    "dtphiu": _enum(TimeDerivative),
    "slot_length": _positive_float,
    "output": Path,
    "snapshot_every": _int_at_least(0),
    "binary_snapshots": _bool,
    "max_steps": _int_at_least(1),
    "check_every": _int_at_least(1),
}


def _split_assignment(text: str, where: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep:
        raise ConfigError(f"{where}: expected 'key = value', got {text.strip()!r}")
    key = key.strip().lower()
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    return key, value.strip()


def collect_overrides(
    env: Mapping[str, str] | None = None, items: Sequence[str] = ()
) -> dict[str, str]:
    """Gather ``DUGKS_<KEY>`` variables and ``key=value`` flags, flags winning."""

    values: dict[str, str] = {}
    for key in KEYS:
        name = ENV_PREFIX + key.upper()
        if env is not None and name in env:
            values[key] = env[name]
    for item in items:
        key, value = _split_assignment(item, f"--set {item}")
        values[key] = value
    return values


def parse_config(
    text: str,
    *,
    env: Mapping[str, str] | None = None,
    overrides: Sequence[str] = (),
) -> RunSpec:
    """Resolve *text*, then environment variables, then ``key=value`` *overrides*."""

    raw: dict[str, tuple[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        where = f"line {lineno}"
        key, value = _split_assignment(content, where)
        raw[key] = (value, where)

    for key in KEYS:
        name = ENV_PREFIX + key.upper()
        if env is not None and name in env:
            raw[key] = (env[name], name)

    for item in overrides:
        where = f"--set {item}"
        key, value = _split_assignment(item, where)
        raw[key] = (value, where)

    return build_spec(raw)


def build_spec(raw: Mapping[str, tuple[str, str]]) -> RunSpec:
    """Convert and validate ``key -> (text, origin)`` pairs into a :class:`RunSpec`."""

    if "benchmark" not in raw:
        raise ConfigError("benchmark required (translation, zalesak or vortex)")

    values: dict[str, Any] = {}
    for key, (text, where) in raw.items():
        try:
            values[key] = KEYS[key](text)
        except ValueError as exc:
            raise ConfigError(f"{where}: invalid value for {key!r}: {exc}") from None

    preset = values.get("preset", "DUGKS-I")
    for key in ("model", "flux_mode"):
        if key in values and preset != CUSTOM_PRESET:
            raise ConfigError(f"{raw[key][1]}: {key!r} is only allowed with preset = custom")

    spec = RunSpec(**values, sources={key: where for key, (_, where) in raw.items()})
    try:
        spec.variant_and_mode()
        spec.solver_config()
    except (ValueError, GridError) as exc:
        raise ConfigError(f"inconsistent configuration: {exc}") from exc
    return spec


def load_config(
    path: Path,
    *,
    env: Mapping[str, str] | None = None,
    overrides: Sequence[str] = (),
) -> RunSpec:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    return parse_config(text, env=env, overrides=overrides)


__all__ = [
    "CUSTOM_PRESET",
    "ConfigError",
    "ENV_PREFIX",
    "KEYS",
    "RunSpec",
    "build_spec",
    "collect_overrides",
    "load_config",
    "parse_config",
]
