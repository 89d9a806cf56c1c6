"""Run configuration: ``key=value`` lines or a JSON object."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, fields

from .assembler import LayoutSpec
from .decoder import NOISE_KINDS, NoiseModel

__all__ = ["RunConfig", "ConfigError", "parse_config", "read_config_dict", "config_from_dict", "format_config"]


class ConfigError(ValueError):
    """All validation errors of a configuration, reported together."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class RunConfig:
    dimension: int = 2
    d_fq: int | None = None
    d_Ff: int = 3
    grid: tuple[int, ...] = (1, 2)
    boundary: str = "periodic"
    noise: str = "iid-XZ"
    p: tuple[float, ...] = (0.001, 0.005, 0.02)
    trials: int = 10_000
    seed: int = 0
    out: str = "out"
    threads: int = 1
    first_column: str = "odd"
    include_sector: bool = False
    distance_time_limit: float = 300.0

    def layout(self) -> LayoutSpec:
        return LayoutSpec(self.d_Ff, self.grid, self.d_fq, None, self.first_column)

    def noise_model(self, p: float) -> NoiseModel:
        return NoiseModel(self.noise, p, self.seed)

    def replace(self, **changes) -> "RunConfig":
        data = asdict(self)
        data.update(changes)
        return _build(data)


_FIELDS = {f.name for f in fields(RunConfig)}


def _as_int(v):
    if isinstance(v, bool):
        raise ValueError
    if isinstance(v, int):
        return v
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return int(str(v).strip())


def _as_tuple(v, conv):
    if isinstance(v, (list, tuple)):
        return tuple(conv(x) for x in v)
    parts = [t for t in re.split(r"[,x\s]+", str(v).strip("[]() ")) if t]
    return tuple(conv(t) for t in parts)


def _as_bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError


_CONVERT = {
    "dimension": _as_int,
    "d_fq": lambda v: None if v in (None, "", "auto") else _as_int(v),
    "d_Ff": _as_int,
    "grid": lambda v: _as_tuple(v, int),
    "boundary": str,
    "noise": str,
    "p": lambda v: _as_tuple(v, float),
    "trials": _as_int,
    "seed": _as_int,
    "out": str,
    "threads": _as_int,
    "first_column": str,
    "include_sector": _as_bool,
    "distance_time_limit": float,
}


def _build(data: dict) -> RunConfig:
    errors = []
    clean = {}
    for k, v in data.items():
        if k not in _FIELDS:
            errors.append(f"unknown key {k!r}")
            continue
        try:
            clean[k] = _CONVERT[k](v)
        except (TypeError, ValueError):
            errors.append(f"{k}: cannot parse {v!r}")
    if errors:
        raise ConfigError(errors)
    dim = clean.get("dimension", 2)
    if "grid" not in clean and dim == 3:
        clean["grid"] = (1, 2, 2)
    if clean.get("d_fq") is None:
        clean["d_fq"] = 2 if dim == 2 else 3
    cfg = RunConfig(**clean)

    if cfg.dimension not in (2, 3):
        errors.append("dimension must be 2 or 3")
    d = cfg.d_Ff
    if d < 3 or d % 2 == 0:
        errors.append("d_Ff must be odd ≥ 3")
    if cfg.dimension == 3 and cfg.d_fq != 3:
        errors.append("3D requires the d_fq=3 table")
    if cfg.dimension == 2 and cfg.d_fq != 2:
        errors.append("2D uses the d_fq=2 table")
    if len(cfg.grid) != cfg.dimension:
        errors.append(f"grid needs {cfg.dimension} entries")
    elif min(cfg.grid) < 1:
        errors.append("grid entries must be positive")
    elif cfg.grid[1] % 2:
        errors.append("the staggered layout needs an even number of columns")
    if cfg.boundary != "periodic":
        errors.append("only periodic boundaries are supported")
    if cfg.noise not in NOISE_KINDS:
        errors.append(f"noise must be one of {', '.join(NOISE_KINDS)}")
    if not cfg.p or any(not 0.0 <= p <= 1.0 for p in cfg.p):
        errors.append("p values must lie in [0, 1]")
    if cfg.trials < 1:
        errors.append("trials must be >= 1")
    if cfg.seed < 0 or cfg.seed >= 2**64:
        errors.append("seed must be an unsigned 64-bit integer")
    if cfg.threads < 1:
        errors.append("threads must be >= 1")
    if cfg.first_column not in ("odd", "even"):
        errors.append("first_column must be 'odd' or 'even'")
    if errors:
        raise ConfigError(errors)
    return cfg


def read_config_dict(text: str) -> dict:
    """Raw key/value pairs of a JSON object or ``key=value`` lines (``#`` comments)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"malformed JSON: {exc}"]) from None
        if not isinstance(data, dict):
            raise ConfigError(["config must be a JSON object"])
        return data
    data, errors = {}, []
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {num}: expected key=value")
            continue
        k, v = (t.strip() for t in line.split("=", 1))
        if k in data:
            errors.append(f"line {num}: duplicate key {k!r}")
        data[k] = v
    if errors:
        raise ConfigError(errors)
    return data


def config_from_dict(data: dict) -> RunConfig:
    return _build(dict(data))


def parse_config(text: str) -> RunConfig:
    """Validated config from a JSON object or ``key=value`` lines."""
    return _build(read_config_dict(text))


def format_config(cfg: RunConfig) -> str:
    return json.dumps(asdict(cfg), indent=1, sort_keys=True)
