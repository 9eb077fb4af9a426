"""
Run configuration and the central tolerance table.

A configuration is one JSON document; every key is optional:

.. code-block:: json

    {"group": "heisenberg", "subgroup": "line", "flavor": "schrodinger",
     "hbar": 1.0, "k": 1, "n": 4,
     "line": {"n": 128, "a": -8, "b": 8},
     "plane": {"n": 128, "a": -4, "b": 4},
     "disk": {"n_r": 200, "n_theta": 256, "r_max": 0.95},
     "seed": 20240611,
     "tolerances": {"twist-zn": 1e-10}}

The only environment variable read is ``OPERCALC_THREADS``.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .reps import FLAVORS

TOLERANCES = {
    "group-axioms": 1e-9,
    "section-cocycle": 1e-12,
    "twist-zn": 1e-10,
    "twist-closed": 1e-12,
    "twist-assoc": 1e-10,
    "weyl-identity": 1e-8,
    "weyl-position": 1e-6,
    "weyl-derivative": 1e-6,
    "weyl-compose": 1e-3,
    "weyl-relconv": 1e-6,
    "weyl-selfadjoint": 1e-8,
    "kn-dual": 1e-10,
    "fourier-wigner": 1e-6,
    "fsb-idempotent": 1e-6,
    "fsb-pde": 1e-4,
    "fsb-separation": 10.0,
    "fsb-reproducing": 1e-6,
    "berezin-compose": 1e-10,
    "kn-symbol": 1e-12,
    "tight-frame": 1e-10,
    "theta": 1e-10,
    "eq51": 1e-10,
    "reproducing-zn": 1e-10,
    "contravariant": 1e-12,
    "covariant-intertwine": 1e-12,
    "su11-rep": 1e-10,
    "bergman-idempotent": 1e-3,
    "bergman-monomial": 1e-3,
    "toeplitz-radial": 1e-3,
    "bergman-symmetry": 1e-10,
    "su11-twist": 1e-2,
    "dynin-mult": 1e-12,
    "dynin-hom": 1e-10,
    "dynin-kernels": 1e-8,
    "cli-roundtrip": 1e-8,
}

DEFAULT_SEED = 20240611


class ConfigError(ValueError):
    """Invalid configuration document."""


@dataclass
class RunConfig:
    group: str = "heisenberg"
    subgroup: str | None = None
    flavor: str | None = None
    hbar: float = 1.0
    k: int = 1
    n: int = 4
    line: dict = field(default_factory=lambda: {"n": 128, "a": -8.0, "b": 8.0})
    plane: dict = field(default_factory=lambda: {"n": 128, "a": -4.0, "b": 4.0})
    disk: dict = field(default_factory=lambda: {"n_r": 200, "n_theta": 256, "r_max": 0.95})
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    def tolerance(self, name):
        return float(self.tolerances.get(name, TOLERANCES[name]))

    def validate(self):
        for key, v in self.tolerances.items():
            if key not in TOLERANCES:
                raise ConfigError(f"unknown tolerance {key!r}")
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"tolerance {key!r} must be positive")
        if self.flavor is not None and self.flavor not in FLAVORS:
            raise ConfigError(f"unknown flavor {self.flavor!r}")
        if int(self.k) != self.k or self.k == 0:
            raise ConfigError("k must be a nonzero integer")
        if int(self.n) < 2:
            raise ConfigError("n must be at least 2")
        for p in self.inputs:
            if not Path(p).exists():
                raise ConfigError(f"input file {p} does not exist")
        return self


def load_config(path=None, overrides=None) -> RunConfig:
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = RunConfig.__dataclass_fields__
    extra = set(data) - set(known)
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    try:
        cfg = RunConfig(**data)
    except TypeError as e:
        raise ConfigError(str(e)) from e
    return cfg.validate()


def threads() -> int:
    """Parallelism cap from OPERCALC_THREADS (default 1)."""
    raw = os.environ.get("OPERCALC_THREADS")
    if raw is None:
        return 1
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError("OPERCALC_THREADS must be a positive integer") from None
    if v < 1:
        raise ConfigError("OPERCALC_THREADS must be a positive integer")
    return v
