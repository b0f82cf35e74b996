"""Run configuration: defaults < JSON config file < SIGMA_HECKE_SEED < flags."""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from typing import Any, Mapping

SEED_ENV = "SIGMA_HECKE_SEED"


@dataclass
class RunConfig:
    group: str = "BS(2,3)"
    char: str | None = None  # comma-separated coefficients; None = family default
    W: int = 3  # element ball radius for translates
    radius: int = 4  # ball radius for verify suites
    coset_radius: int = 2
    radii: list = field(default_factory=lambda: [0, 1, 2])  # part radii for filtrations
    scales: list = field(default_factory=lambda: [1, 2, 3])
    degree: int = 1  # homology degree cap for probes
    ring: str = "Z"
    seed: int = 0
    samples: int = 100
    orbit_cap: int = 1000
    lambda_radius: int | None = None
    max_vertices: int = 5
    inner: int = 4
    outer: int = 6

    def validate(self) -> None:
        for name in ("W", "radius", "coset_radius", "degree", "samples", "max_vertices", "inner", "outer"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if any(r < 0 for r in self.radii) or any(s < 0 for s in self.scales):
            raise ValueError("radii and scales must be >= 0")
        if self.orbit_cap < 1:
            raise ValueError("orbit_cap must be >= 1")

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def parse_range(text: str | list) -> list[int]:
    """``"1..4"`` -> [1, 2, 3, 4]; ``"0,2,5"`` -> [0, 2, 5]."""
    if isinstance(text, list):
        return [int(x) for x in text]
    text = text.strip()
    if ".." in text:
        lo, hi = (int(x) for x in text.split("..", 1))
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve_config(file_values: Mapping[str, Any] | None, flag_values: Mapping[str, Any],
                   env: Mapping[str, str] | None = None) -> RunConfig:
    env = os.environ if env is None else env
    cfg = RunConfig()
    merged: dict = dict(file_values or {})
    if env.get(SEED_ENV):
        merged["seed"] = int(env[SEED_ENV])
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    for key in ("radii", "scales"):
        if key in merged:
            merged[key] = parse_range(merged[key])
    for key, value in merged.items():
        setattr(cfg, key, value)
    cfg.validate()
    return cfg
