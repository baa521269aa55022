"""Pipeline configuration, loaded from TOML or JSON."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any

import tomli

from zonet.network.enumeration import Filters

WORKERS_ENV = "ZONET_WORKERS"

DEFAULT_FILTERS = ("rank=3", "positive-flux", "nontrivial", "canonical")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    """Settings for one pipeline run.

    Networks come from ``networks`` when it is non-empty (bundled fixture
    names, inline network text or file paths); otherwise every network on
    ``species`` species with ``reactions`` reactions passing ``filters`` is
    enumerated, or ``subsample`` of them are drawn at random.
    """

    species: int = 3
    reactions: int = 5
    filters: tuple[str, ...] = DEFAULT_FILTERS
    networks: tuple[str, ...] = ()
    subsample: int | None = None
    limit: int | None = None
    sample_count: int = 50
    kappa_bounds: tuple[Fraction, Fraction] = (Fraction(1, 100), Fraction(100))
    kappa_denominator: int = 1000
    seed: int = 0
    workers: int = 1
    timeout: float = 10.0
    line_searches: int = 2
    line_points: int = 6
    bisection_steps: int = 8
    sample_screened: bool = False
    use_fixture_witnesses: bool = True
    witnesses: tuple[dict, ...] = ()
    output_json: str | None = None
    output_csv: str | None = None
    base_dir: str = field(default=".", repr=False)

    def __post_init__(self):
        self.filters = tuple(self.filters)
        self.networks = tuple(self.networks)
        self.witnesses = tuple(self.witnesses)
        lo, hi = (Fraction(v) for v in self.kappa_bounds)
        self.kappa_bounds = (lo, hi)
        if self.sample_count < 1:
            raise ConfigError("sample_count must be at least 1")
        if not 0 < lo <= hi:
            raise ConfigError("kappa_bounds must be positive with low <= high")
        if self.kappa_denominator < 1:
            raise ConfigError("kappa_denominator must be positive")
        if self.timeout <= 0:
            raise ConfigError("timeout must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for name in ("line_searches", "line_points", "bisection_steps"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        try:
            Filters.parse(self.filters)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def filter_set(self) -> Filters:
        return Filters.parse(self.filters)

    def effective_workers(self) -> int:
        raw = os.environ.get(WORKERS_ENV)
        if raw is None or raw.strip() == "":
            return self.workers
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV} must be at least 1")
        return n

    def resolve(self, path: str | None) -> Path | None:
        if path is None:
            return None
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def to_json(self) -> dict:
        """The settings that determine the results (paths and workers excluded)."""
        skip = {"output_json", "output_csv", "base_dir", "workers"}
        out: dict[str, Any] = {}
        for f in fields(self):
            if f.name in skip:
                continue
            v = getattr(self, f.name)
            if f.name == "kappa_bounds":
                v = [str(x) for x in v]
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    @classmethod
    def from_mapping(cls, data: dict, base_dir: str = ".") -> "PipelineConfig":
        data = dict(data)
        output = data.pop("output", None)
        if isinstance(output, dict):
            data.setdefault("output_json", output.get("json"))
            data.setdefault("output_csv", output.get("csv"))
        known = {f.name for f in fields(cls)} - {"base_dir"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "kappa_bounds" in data:
            bounds = data["kappa_bounds"]
            if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
                raise ConfigError("kappa_bounds must be a pair")
            try:
                data["kappa_bounds"] = tuple(Fraction(str(v)) for v in bounds)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"bad kappa_bounds {bounds!r}") from None
        try:
            return cls(base_dir=base_dir, **data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode())
        else:
            data = tomli.loads(raw.decode())
    except (json.JSONDecodeError, tomli.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a table/object")
    return PipelineConfig.from_mapping(data, base_dir=str(path.parent))
