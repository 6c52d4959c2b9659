"""Line-oriented run configuration.

Each non-blank line is ``key = value``; ``#`` starts a comment. Keys are
either top-level (``scenario``, ``ic``, ``forcing``, ``plane``, ``seed``) or
``section.key``. Unknown keys, malformed values and missing required keys
raise errors that name the offending line.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace
from typing import Any, Callable

from .errors import ConfigError, ConfigTypeError, MissingRequired, UnknownKey, UnsupportedOrientation
from .io import config_hash
from .restrict import Hyperplane, make_hyperplane

SCENARIOS = ("simulate", "restrict", "certify", "gns", "uniqueness")
IC_PRESETS = ("taylor_green", "single_mode", "seeded_random")
FORCING_PRESETS = ("none", "taylor_green")


@dataclass(frozen=True)
class Preset:
    """A named preset with positional arguments, e.g. ``single_mode(1, 0)``."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class GridSection:
    dimension: int = 2
    n: int = 16
    period: float = 2 * math.pi


@dataclass(frozen=True)
class SimSection:
    nu: float | None = None
    dt: float | None = None
    t_end: float | None = None


@dataclass(frozen=True)
class OutputSection:
    directory: str = "out"
    thinning: int = 1


@dataclass(frozen=True)
class GNSSection:
    d: int | None = None
    p0: float = 4.0
    p1: float = 2.0
    p2: float = 2.0
    s: int = 0
    m: int = 1
    power: int = 2
    n_samples: int = 32


@dataclass(frozen=True)
class CertifySection:
    c: float | None = None
    lambda1: float | None = None
    amplitude: float = 1.0


@dataclass(frozen=True)
class UniquenessSection:
    epsilon: float = 1e-3
    mode_index: int = 0
    c: float | None = None


@dataclass(frozen=True)
class RestrictSection:
    input: str | None = None
    n2d: int | None = None


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "simulate"
    seed: int = 0
    ic: Preset = Preset("taylor_green")
    forcing: Preset = Preset("none")
    plane: Hyperplane | None = None
    grid: GridSection = GridSection()
    k_max: int | None = None
    sim: SimSection = SimSection()
    outputs: OutputSection = OutputSection()
    gns: GNSSection = GNSSection()
    certify: CertifySection = CertifySection()
    uniqueness: UniquenessSection = UniquenessSection()
    restrict: RestrictSection = RestrictSection()

    @property
    def basis_k_max(self) -> int:
        return self.k_max if self.k_max is not None else self.grid.n // 2 - 1

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=int(seed))

    def canonical(self) -> str:
        """Sorted ``key = value`` lines of the resolved config (defaults included)."""
        lines = []

        def walk(obj, prefix):
            for f in fields(obj):
                v = getattr(obj, f.name)
                key = f"{prefix}{f.name}"
                if hasattr(v, "__dataclass_fields__") and not isinstance(v, (Preset, Hyperplane)):
                    walk(v, key + ".")
                else:
                    lines.append(f"{key} = {v!r}" if not isinstance(v, Preset) else f"{key} = {v}")
        walk(self, "")
        return "\n".join(sorted(lines)) + "\n"

    @property
    def hash(self) -> str:
        return config_hash(self.canonical())


# --- value converters -------------------------------------------------------

def _int(v: str) -> int:
    try:
        return int(v)
    except ValueError:
        raise ValueError(f"expected an integer, got {v!r}") from None


def _float(v: str) -> float:
    try:
        x = float(v)
    except ValueError:
        raise ValueError(f"expected a number, got {v!r}") from None
    if math.isnan(x):
        raise ValueError("NaN is not allowed")
    return x


def _exponent(v: str) -> float:
    return math.inf if v.strip().lower() in ("inf", "infinity") else _float(v)


def _positive(conv: Callable[[str], Any]) -> Callable[[str], Any]:
    def wrapped(v: str):
        x = conv(v)
        if not (x > 0 and math.isfinite(x)):
            raise ValueError(f"must be positive and finite, got {v}")
        return x
    return wrapped


def _nonneg(conv: Callable[[str], Any]) -> Callable[[str], Any]:
    def wrapped(v: str):
        x = conv(v)
        if not (x >= 0 and math.isfinite(x)):
            raise ValueError(f"must be nonnegative and finite, got {v}")
        return x
    return wrapped


def _choice(options: tuple[str, ...]) -> Callable[[str], str]:
    def wrapped(v: str) -> str:
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}; got {v!r}")
        return v
    return wrapped


def _even_points(v: str) -> int:
    n = _int(v)
    if n < 4 or n % 2:
        raise ValueError(f"must be an even integer >= 4, got {n}")
    return n


def _dimension(v: str) -> int:
    d = _int(v)
    if d not in (2, 3):
        raise ValueError(f"must be 2 or 3, got {d}")
    return d


_PRESET_RE = re.compile(r"^([a-z_]+)\s*(?:\((.*)\))?$")


def _preset(allowed: tuple[str, ...]) -> Callable[[str], Preset]:
    def wrapped(v: str) -> Preset:
        m = _PRESET_RE.match(v)
        if not m or m.group(1) not in allowed:
            raise ValueError(f"unknown preset {v!r}; expected one of {', '.join(allowed)}")
        name, raw = m.group(1), m.group(2)
        args = tuple(a.strip() for a in raw.split(",")) if raw and raw.strip() else ()
        if name == "single_mode":
            if len(args) < 2:
                raise ValueError("single_mode needs at least two integer wavevector components")
            return Preset(name, tuple(_int(a) for a in args))
        if name == "seeded_random":
            if len(args) != 2:
                raise ValueError("seeded_random takes (seed, spectrum_decay)")
            return Preset(name, (_nonneg(_int)(args[0]), _float(args[1])))
        if name == "taylor_green" and len(args) > 1:
            raise ValueError("taylor_green takes at most one amplitude argument")
        if name == "none" and args:
            raise ValueError("none takes no arguments")
        return Preset(name, tuple(_float(a) for a in args))
    return wrapped


def _plane(v: str) -> Hyperplane:
    parts = [p for p in v.replace(" ", "").split(",") if p != ""]
    nums = [_float(p) for p in parts]
    if len(nums) == 3:
        return Hyperplane(*nums)
    if len(nums) == 4:
        return make_hyperplane(*nums)
    raise ValueError(f"plane needs 3 values (a1,a2,b) or 4 values (a1,a2,a3,b), got {len(nums)}")


def _path(v: str) -> str:
    if not v:
        raise ValueError("empty path")
    return v


# key -> (converter, attribute path)
KEYS: dict[str, tuple[Callable[[str], Any], tuple[str, ...]]] = {
    "scenario": (_choice(SCENARIOS), ("scenario",)),
    "seed": (_nonneg(_int), ("seed",)),
    "ic": (_preset(IC_PRESETS), ("ic",)),
    "forcing": (_preset(FORCING_PRESETS), ("forcing",)),
    "plane": (_plane, ("plane",)),
    "grid.dimension": (_dimension, ("grid", "dimension")),
    "grid.n": (_even_points, ("grid", "n")),
    "grid.period": (_positive(_float), ("grid", "period")),
    "basis.k_max": (_nonneg(_int), ("k_max",)),
    "sim.nu": (_positive(_float), ("sim", "nu")),
    "sim.dt": (_positive(_float), ("sim", "dt")),
    "sim.t_end": (_positive(_float), ("sim", "t_end")),
    "outputs.directory": (_path, ("outputs", "directory")),
    "outputs.thinning": (_positive(_int), ("outputs", "thinning")),
    "gns.d": (_positive(_int), ("gns", "d")),
    "gns.p0": (_exponent, ("gns", "p0")),
    "gns.p1": (_exponent, ("gns", "p1")),
    "gns.p2": (_exponent, ("gns", "p2")),
    "gns.s": (_nonneg(_int), ("gns", "s")),
    "gns.m": (_positive(_int), ("gns", "m")),
    "gns.power": (_positive(_int), ("gns", "power")),
    "gns.n_samples": (_positive(_int), ("gns", "n_samples")),
    "certify.c": (_positive(_float), ("certify", "c")),
    "certify.lambda1": (_positive(_float), ("certify", "lambda1")),
    "certify.amplitude": (_nonneg(_float), ("certify", "amplitude")),
    "uniqueness.epsilon": (_nonneg(_float), ("uniqueness", "epsilon")),
    "uniqueness.mode_index": (_nonneg(_int), ("uniqueness", "mode_index")),
    "uniqueness.c": (_positive(_float), ("uniqueness", "c")),
    "restrict.input": (_path, ("restrict", "input")),
    "restrict.n2d": (_even_points, ("restrict", "n2d")),
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "simulate": ("sim.nu", "sim.dt", "sim.t_end"),
    "uniqueness": ("sim.nu", "sim.dt", "sim.t_end"),
    "certify": ("sim.nu",),
    "restrict": ("plane",),
    "gns": (),
}


def _set(cfg: RunConfig, path: tuple[str, ...], value) -> RunConfig:
    if len(path) == 1:
        return replace(cfg, **{path[0]: value})
    section = getattr(cfg, path[0])
    return replace(cfg, **{path[0]: replace(section, **{path[1]: value})})


def parse_config(text: str, scenario: str | None = None) -> RunConfig:
    """Parse and validate config text; ``scenario`` fills in a missing scenario key."""
    cfg = RunConfig()
    seen: dict[str, int] = {}
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise UnknownKey(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno)
        seen[key] = lineno
        conv, path = KEYS[key]
        try:
            parsed = conv(value)
        except UnsupportedOrientation as exc:
            raise UnsupportedOrientation(f"line {lineno}: {key}: {exc}") from exc
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigTypeError(f"{key}: {exc}", lineno) from exc
        cfg = _set(cfg, path, parsed)

    if scenario is not None:
        if "scenario" in seen and cfg.scenario != scenario:
            raise ConfigError(f"config declares scenario {cfg.scenario!r} but {scenario!r} was requested",
                              seen["scenario"])
        cfg = replace(cfg, scenario=scenario)
    end = len(lines) + 1
    for key in REQUIRED[cfg.scenario]:
        if key not in seen:
            raise MissingRequired(f"missing required key {key!r} for scenario {cfg.scenario!r}", end)
    _cross_check(cfg, seen, end)
    return cfg


def _cross_check(cfg: RunConfig, seen: dict[str, int], end: int) -> None:
    line = lambda key: seen.get(key, end)  # noqa: E731
    sim = cfg.sim
    if sim.dt is not None and sim.t_end is not None and sim.dt > sim.t_end:
        raise ConfigTypeError(f"sim.dt={sim.dt} exceeds sim.t_end={sim.t_end}", line("sim.dt"))
    if cfg.k_max is not None and 2 * cfg.k_max >= cfg.grid.n:
        raise ConfigTypeError(f"basis.k_max={cfg.k_max} needs grid.n > {2 * cfg.k_max}", line("basis.k_max"))
    if cfg.ic.name == "single_mode" and len(cfg.ic.args) != (2 if cfg.plane is not None else cfg.grid.dimension):
        raise ConfigTypeError("single_mode wavevector length does not match the basis dimension", line("ic"))
    if cfg.plane is not None and cfg.scenario in ("simulate", "uniqueness") and cfg.grid.dimension != 2:
        raise ConfigTypeError("plane-restricted runs use a 2D grid (grid.dimension = 2)", line("grid.dimension"))


def load_config(path: str, scenario: str | None = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), scenario)
