"""Flat ``key = value`` experiment configuration files.

The format is plain text, easy to diff and to embed in test fixtures:
``#`` starts a comment, blank lines are ignored, and the two grid keys
accept either a comma list (``0,0.5,1``) or an inclusive ``start:step:stop``
range (``0:0.5:2.5``).  :func:`serialize_config` emits a normalized form
(every key explicit, grids as comma lists) whose parse is a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

__all__ = ["ConfigError", "SweepConfig", "parse_config", "serialize_config"]

MODELS = ("network", "ode", "both")


class ConfigError(ValueError):
    """Invalid configuration text; carries a line number when one applies."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SweepConfig:
    """One experiment: a beta x p grid plus the fixed model constants."""

    beta_grid: tuple[float, ...]
    p_grid: tuple[float, ...]
    gamma: float = 0.2
    r: float = 0.9
    dt: float = 0.01
    n: int = 100
    k: int = 12
    alpha: float = 0.2
    m: int = 20
    i0: float = 10.0
    t_max: float = 500.0
    model: str = "both"
    seed: int = 0
    output_dir: str = "."
    n2: int | None = None

    def __post_init__(self):
        for name in ("beta_grid", "p_grid"):
            grid = getattr(self, name)
            if not grid:
                raise ConfigError(f"{name} must not be empty")
            if any(a >= b for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} must be strictly increasing")
            if grid[0] < 0:
                raise ConfigError(f"{name} values must be nonnegative")
        if self.gamma < 0 or self.r < 0:
            raise ConfigError("rates must be nonnegative")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        for name, rate in (("gamma", self.gamma), ("r", self.r),
                           ("p_grid max", self.p_grid[-1])):
            if rate * self.dt > 1.0:
                raise ConfigError(f"{name} * dt exceeds 1; decrease dt")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.m < 1:
            raise ConfigError("m must be at least 1")
        if self.i0 < 0:
            raise ConfigError("i0 must be nonnegative")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {', '.join(MODELS)}")
        if self.n2 is not None and self.n2 < 2:
            raise ConfigError("n2 must be at least 2")


_FLOAT_KEYS = {"gamma", "r", "dt", "alpha", "i0", "t_max"}
_INT_KEYS = {"n", "k", "m", "seed", "n2"}
_GRID_KEYS = {"beta_grid", "p_grid"}
_STR_KEYS = {"model", "output_dir"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _GRID_KEYS | _STR_KEYS


def _parse_grid(value: str, line: int) -> tuple[float, ...]:
    if ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid range must be start:step:stop, got {value!r}", line)
        try:
            start, step, stop = (float(x) for x in parts)
        except ValueError:
            raise ConfigError(f"non-numeric grid range {value!r}", line) from None
        if step <= 0:
            raise ConfigError("grid step must be positive", line)
        if stop < start:
            raise ConfigError("grid stop must not precede start", line)
        count = int((stop - start) / step + 1e-9) + 1
        return tuple(start + i * step for i in range(count))
    try:
        return tuple(float(x) for x in value.split(","))
    except ValueError:
        raise ConfigError(f"non-numeric grid value in {value!r}", line) from None


def parse_config(text: str) -> SweepConfig:
    """Parse configuration text; raises :class:`ConfigError` with the line
    number on malformed input."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            if key in _GRID_KEYS:
                values[key] = _parse_grid(value, lineno)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _INT_KEYS:
                values[key] = int(value)
            else:
                values[key] = value
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"invalid value {value!r} for {key}", lineno) from None
    for required in ("beta_grid", "p_grid"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    return SweepConfig(**values)


def serialize_config(cfg: SweepConfig) -> str:
    """Normalized text form: every key explicit, grids as comma lists."""
    lines = []
    for f in fields(SweepConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if f.name in _GRID_KEYS:
            value = ",".join(str(x) for x in value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
