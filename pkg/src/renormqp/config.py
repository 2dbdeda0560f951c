"""Numerical policy shared by every module."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import ConfigError

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DiscDomain:
    """Closed disc in the complex plane centred on the real axis."""

    center: float = 0.2
    radius: float = 1.5

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigError(f"disc radius must be positive, got {self.radius}")

    def contains(self, z, slack=1e-12):
        return abs(z - self.center) <= self.radius * (1 + slack)

    def contains_interval(self, lo, hi):
        return self.center - self.radius <= lo and hi <= self.center + self.radius


@dataclass(frozen=True)
class RenormConfig:
    delta: float = 0.1
    disc: DiscDomain = field(default_factory=DiscDomain)
    # radius of the disc about 0 used for even maps in the 1-D solver
    even_radius: float = 1.6
    n_x: int = 40
    k_theta: int = 8
    m_nodes: int = 0  # 0 -> 4 * n_x + 16
    tol_newton: float = 1e-12
    tol_residual: float = 1e-10
    tol_degenerate: float = 1e-8
    k0: float = 1e-3
    omega: float = GOLDEN_MEAN
    max_newton: int = 50
    curve_nodes: int = 64
    lyapunov_nodes: int = 4096
    seed: int = 20111

    def __post_init__(self):
        if isinstance(self.disc, dict):
            object.__setattr__(self, "disc", DiscDomain(**self.disc))
        if self.m_nodes == 0:
            object.__setattr__(self, "m_nodes", 4 * self.n_x + 16)
        self.validate()

    def validate(self):
        if self.n_x < 4:
            raise ConfigError(f"n_x must be >= 4, got {self.n_x}")
        if self.m_nodes < 2 * self.n_x + 1:
            raise ConfigError(f"m_nodes must be >= 2*n_x+1 = {2 * self.n_x + 1}, got {self.m_nodes}")
        if self.k_theta < 1:
            raise ConfigError("k_theta must be >= 1")
        for name in ("delta", "tol_newton", "tol_residual", "tol_degenerate", "k0", "even_radius"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 <= self.omega < 1.0:
            raise ConfigError(f"omega must lie in [0, 1), got {self.omega}")
        if not self.disc.contains_interval(-1 - self.delta, 1 + self.delta):
            raise ConfigError("disc W must contain the interval [-1-delta, 1+delta]")
        if self.even_radius < 1 + self.delta:
            raise ConfigError("even_radius must be at least 1 + delta")
        if self.curve_nodes < 8 or self.curve_nodes % 2:
            raise ConfigError("curve_nodes must be an even integer >= 8")

    @property
    def interval(self):
        return (-1.0 - self.delta, 1.0 + self.delta)

    def with_(self, **kw) -> "RenormConfig":
        if "n_x" in kw and "m_nodes" not in kw:
            kw["m_nodes"] = 0
        return replace(self, **kw)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path) -> RenormConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return RenormConfig.from_dict(data)
