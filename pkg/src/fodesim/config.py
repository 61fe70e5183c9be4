"""Run configuration: flat ``section.key = value`` text files.

Grammar: one assignment per line; ``#`` starts a comment (whole line or
trailing); blank lines ignored.  Keys are dotted section.name pairs from the
table below; unknown keys are rejected.  Values are decimal numbers except
sim.variant (verbatim | derived) and input.kind (unit_step | scaled_step).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import ClosedLoopModel, ControllerParams, InputSignalSpec, PlantParams

__all__ = ["RunConfig", "ConfigError", "parse_config", "dump_config"]


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs to build and run a model."""

    a0: float = 1.0
    a1: float = 0.5
    a2: float = 0.8
    alpha: float = 2.2
    beta: float = 0.9
    K: float = 20.5
    Td: float = 3.7343
    delta: float = 1.15
    h: float = 1e-3
    t_end: float = 15.0
    variant: str = "derived"
    memory: int | None = None
    divergence_bound: float = 1e6
    input_kind: str = "unit_step"
    amplitude: float = 1.0
    omega_min: float = 1e-2
    omega_max: float = 1e2
    points: int = 200

    def model(self) -> ClosedLoopModel:
        if self.input_kind == "unit_step":
            spec = InputSignalSpec.unit_step()
        else:
            spec = InputSignalSpec.scaled_step(self.amplitude)
        return ClosedLoopModel(
            plant=PlantParams(
                a0=self.a0, a1=self.a1, a2=self.a2, alpha=self.alpha, beta=self.beta
            ),
            controller=ControllerParams(K=self.K, Td=self.Td, delta=self.delta),
            input=spec,
        )

    def realization_variant(self) -> str:
        return "derived_consistent" if self.variant == "derived" else "verbatim"


_FLOAT_KEYS = {
    "plant.a0": "a0",
    "plant.a1": "a1",
    "plant.a2": "a2",
    "plant.alpha": "alpha",
    "plant.beta": "beta",
    "controller.K": "K",
    "controller.Td": "Td",
    "controller.delta": "delta",
    "sim.h": "h",
    "sim.t_end": "t_end",
    "sim.divergence_bound": "divergence_bound",
    "input.amplitude": "amplitude",
    "analysis.omega_min": "omega_min",
    "analysis.omega_max": "omega_max",
}
_INT_KEYS = {"sim.memory": "memory", "analysis.points": "points"}
_ENUM_KEYS = {
    "sim.variant": ("variant", ("verbatim", "derived")),
    "input.kind": ("input_kind", ("unit_step", "scaled_step")),
}


def parse_config(text: str) -> RunConfig:
    """Parse config text into a RunConfig; unknown keys are errors."""
    cfg = RunConfig()
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        if key in _FLOAT_KEYS:
            try:
                num = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs a number, got {value!r}")
            if not math.isfinite(num):
                raise ConfigError(f"line {lineno}: {key} must be finite")
            cfg = replace(cfg, **{_FLOAT_KEYS[key]: num})
        elif key in _INT_KEYS:
            try:
                num = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs an integer, got {value!r}")
            cfg = replace(cfg, **{_INT_KEYS[key]: num})
        elif key in _ENUM_KEYS:
            attr, allowed = _ENUM_KEYS[key]
            if value not in allowed:
                raise ConfigError(
                    f"line {lineno}: {key} must be one of {allowed}, got {value!r}"
                )
            cfg = replace(cfg, **{attr: value})
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.h <= 0:
        raise ConfigError(f"sim.h must be positive, got {cfg.h}")
    if cfg.t_end < cfg.h:
        raise ConfigError(f"sim.t_end ({cfg.t_end}) must be at least sim.h ({cfg.h})")
    if cfg.memory is not None and cfg.memory < 1:
        raise ConfigError(f"sim.memory must be >= 1, got {cfg.memory}")
    if cfg.input_kind == "unit_step" and cfg.amplitude != 1.0:
        raise ConfigError("input.amplitude requires input.kind = scaled_step")
    if cfg.divergence_bound <= 0:
        raise ConfigError("sim.divergence_bound must be positive")
    if not (0 < cfg.omega_min < cfg.omega_max):
        raise ConfigError("need 0 < analysis.omega_min < analysis.omega_max")
    if cfg.points < 2:
        raise ConfigError(f"analysis.points must be >= 2, got {cfg.points}")
    try:
        cfg.model()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def dump_config(cfg: RunConfig) -> str:
    """Canonical text form; parsing it reproduces cfg exactly."""
    lines = []
    for key, attr in _FLOAT_KEYS.items():
        lines.append(f"{key} = {getattr(cfg, attr)!r}")
    for key, attr in _INT_KEYS.items():
        val = getattr(cfg, attr)
        if val is not None:
            lines.append(f"{key} = {val}")
    for key, (attr, _) in _ENUM_KEYS.items():
        lines.append(f"{key} = {getattr(cfg, attr)}")
    lines.sort()
    return "\n".join(lines) + "\n"
