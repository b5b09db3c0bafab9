"""Experiment configuration: strict JSON parsing and initial-data families."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..grid import (
    Field,
    GridSpec,
    band_indicator_field,
    gaussian_field,
    random_band_field,
    sech_field,
)


class ConfigError(ValueError):
    pass


DEFAULT_FAMILY = {"kind": "gaussian", "width": 1.0, "amplitude": 0.3, "center_freq": 0.0}


@dataclass
class ExperimentConfig:
    """Inputs shared by the experiment drivers; unknown keys are rejected."""

    version: int = 1
    grid_n: int = 1024
    grid_length: float = 32.0 * math.pi
    equation: str = "mkdv"
    sign: str = "defocusing"
    dt: float = 1e-3
    t_final: float = 1.0
    snapshots: int = 5
    family: dict = field(default_factory=lambda: dict(DEFAULT_FAMILY))
    kappas: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    boosts: list = field(default_factory=lambda: list(range(-8, 9)))
    ps: list = field(default_factory=lambda: [[2.0, 0.0]])
    amplitudes: list = field(default_factory=lambda: [0.1, 0.2, 0.4])
    lambdas: list = field(default_factory=lambda: [0.125, 0.5, 1.0, 2.0, 8.0])
    suite_size: int = 50
    seed: int = 0
    n_op: int = 512
    tolerances: dict = field(default_factory=dict)

    def grid(self) -> GridSpec:
        from ..grid import make_grid

        return make_grid(self.grid_n, self.grid_length)

    def snapshot_times(self) -> list:
        return [self.t_final * i / (self.snapshots - 1) for i in range(self.snapshots)] \
            if self.snapshots > 1 else [0.0]

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_NAMES = {f.name for f in dataclasses.fields(ExperimentConfig)}

_TYPES = {
    "version": int, "grid_n": int, "snapshots": int, "suite_size": int,
    "seed": int, "n_op": int,
    "grid_length": (int, float), "dt": (int, float), "t_final": (int, float),
    "equation": str, "sign": str,
    "family": dict, "tolerances": dict,
    "kappas": list, "boosts": list, "ps": list, "amplitudes": list, "lambdas": list,
}


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    if "version" not in doc:
        raise ConfigError("config is missing the required 'version' field")
    unknown = sorted(set(doc) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key, val in doc.items():
        if not isinstance(val, _TYPES[key]) or isinstance(val, bool):
            raise ConfigError(
                f"field '{key}' must be {_TYPES[key]}, got {type(val).__name__}"
            )
    cfg = ExperimentConfig(**doc)
    if cfg.version != 1:
        raise ConfigError(f"unsupported config version {cfg.version}")
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}") from None
    try:
        return config_from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# initial-data families

def build_family(descriptor: dict, grid: GridSpec, rng: np.random.Generator) -> list:
    """Realize a family descriptor as a list of Fields."""
    kind = descriptor.get("kind")
    d = {k: v for k, v in descriptor.items() if k != "kind"}
    if kind == "gaussian":
        return [gaussian_field(grid, d.get("width", 1.0), d.get("amplitude", 0.3),
                               d.get("center_freq", 0.0))]
    if kind == "gaussian_mix":
        amp = d.get("amplitude", 0.3)
        cf = d.get("center_freq", 0.0)
        return [gaussian_field(grid, w, amp, cf) for w in d.get("widths", [1.0, 2.0, 4.0])]
    if kind == "soliton":
        return [sech_field(grid, d.get("amplitude", 1.0), d.get("shift", 0.0))]
    if kind == "band_indicator":
        return [band_indicator_field(grid, d.get("lo", 0.0), d.get("hi", 1.0),
                                     d.get("amplitude", 1.0))]
    if kind == "random_band":
        return [
            random_band_field(grid, d.get("kmin", -4), d.get("kmax", 4),
                              d.get("amplitude", 0.3), rng)
            for _ in range(d.get("count", 1))
        ]
    raise ConfigError(f"unknown family kind {kind!r}")


def random_suite(grid: GridSpec, size: int, rng: np.random.Generator,
                 amplitude: float = 0.3, band_span: int = 6) -> list:
    """Mixed deterministic suite: gaussians of assorted widths/carriers plus random bands."""
    out = []
    for i in range(size):
        if i % 2 == 0:
            width = 0.5 + 3.0 * rng.random()
            cf = float(rng.integers(-band_span, band_span + 1))
            out.append(gaussian_field(grid, width, amplitude, cf))
        else:
            lo = int(rng.integers(-band_span, 1))
            hi = int(rng.integers(0, band_span + 1))
            out.append(random_band_field(grid, lo, max(hi, lo + 1), amplitude, rng))
    return out
