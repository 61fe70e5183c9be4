"""Plant, controller and closed-loop types plus transfer-function evaluation.

The loop is the unity-feedback arrangement: setpoint w feeds the error
e = w - y into the controller, the controller output u drives the plant,
and the plant output y closes the loop.  The plant is

    G_s(s) = 1 / (a2 * s^alpha + a1 * s^beta + a0)

and the controller is proportional plus fractional-derivative,

    G_r(s) = K + Td * s^delta.

Complex powers use the principal branch, Arg in (-pi, pi].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .fracops import SampledSignal

__all__ = [
    "PlantParams",
    "ControllerParams",
    "InputSignalSpec",
    "ClosedLoopModel",
    "FractionalTermList",
    "TransferPoleError",
    "principal_power",
    "plant_transfer",
    "controller_transfer",
    "open_loop_transfer",
    "closed_loop_transfer",
    "characteristic_terms",
]


class TransferPoleError(ArithmeticError):
    """Transfer function evaluated exactly at a pole."""

    def __init__(self, s: complex):
        super().__init__(f"transfer function has a pole at s = {s}")
        self.s = s


def principal_power(s: complex, q: float) -> complex:
    """s**q on the principal branch, with 0**q = 0 for q > 0 and 1 for q = 0."""
    if s == 0:
        if q > 0:
            return 0j
        if q == 0:
            return 1 + 0j
        raise ZeroDivisionError(f"0 raised to negative order {q}")
    return cmath.exp(q * cmath.log(s))


@dataclass(frozen=True)
class PlantParams:
    """Coefficients and orders of G_s(s) = 1/(a2 s^alpha + a1 s^beta + a0)."""

    a0: float
    a1: float
    a2: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.a2 == 0:
            raise ValueError("leading plant coefficient a2 must be nonzero")
        if not (self.alpha > self.beta >= 0):
            raise ValueError(
                f"plant orders must satisfy alpha > beta >= 0, "
                f"got alpha={self.alpha}, beta={self.beta}"
            )


@dataclass(frozen=True)
class ControllerParams:
    """Gains and derivative order of G_r(s) = K + Td s^delta."""

    K: float
    Td: float
    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"derivative order delta must be >= 0, got {self.delta}")


@dataclass(frozen=True)
class InputSignalSpec:
    """Setpoint signal w(t): a step of some amplitude, or explicit samples.

    kind is one of "unit_step", "scaled_step", "samples".  Steps switch on
    at t = 0 (w = 0 for t < 0), which the simulators encode as zero GL
    pre-history.
    """

    kind: str
    amplitude: float = 1.0
    signal: SampledSignal | None = None

    def __post_init__(self):
        if self.kind not in ("unit_step", "scaled_step", "samples"):
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.kind == "unit_step" and self.amplitude != 1.0:
            raise ValueError("unit_step has amplitude 1; use scaled_step instead")
        if self.kind == "samples" and self.signal is None:
            raise ValueError("samples input requires a SampledSignal")
        if self.kind != "samples" and self.signal is not None:
            raise ValueError(f"{self.kind} input does not take a SampledSignal")

    @classmethod
    def unit_step(cls) -> "InputSignalSpec":
        return cls(kind="unit_step")

    @classmethod
    def scaled_step(cls, amplitude: float) -> "InputSignalSpec":
        return cls(kind="scaled_step", amplitude=amplitude)

    @classmethod
    def samples(cls, signal: SampledSignal) -> "InputSignalSpec":
        return cls(kind="samples", signal=signal)

    def sample(self, step: float, count: int) -> np.ndarray:
        """Samples w(t_k), k = 0..count-1, on a grid of the given step."""
        if self.kind in ("unit_step", "scaled_step"):
            return np.full(count, self.amplitude)
        sig = self.signal
        if not math.isclose(sig.step, step, rel_tol=1e-12):
            raise ValueError(
                f"input sampled at step {sig.step}, simulation uses {step}"
            )
        if len(sig.values) < count:
            raise ValueError(
                f"input provides {len(sig.values)} samples, {count} needed"
            )
        return sig.values[:count].copy()


@dataclass(frozen=True)
class ClosedLoopModel:
    """Unity-feedback loop of a plant and a PD^delta controller."""

    plant: PlantParams
    controller: ControllerParams
    input: InputSignalSpec = field(default_factory=InputSignalSpec.unit_step)

    def __post_init__(self):
        # alpha must lead the characteristic terms; the state realization
        # solves for the alpha-order derivative
        if self.plant.alpha < self.controller.delta:
            raise ValueError(
                f"plant order alpha={self.plant.alpha} must be the highest "
                f"order, but controller delta={self.controller.delta} exceeds it"
            )


@dataclass(frozen=True)
class FractionalTermList:
    """Sum of coefficient * s^order terms, orders strictly decreasing."""

    terms: tuple[tuple[float, float], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "FractionalTermList":
        """Merge duplicate orders by summing coefficients, drop zero terms."""
        merged: dict[float, float] = {}
        for coef, order in pairs:
            for existing in merged:
                if abs(existing - order) < 1e-12:
                    merged[existing] += coef
                    break
            else:
                merged[order] = coef
        kept = [(c, o) for o, c in merged.items() if c != 0.0]
        kept.sort(key=lambda t: -t[1])
        return cls(terms=tuple(kept))

    def orders(self) -> tuple[float, ...]:
        return tuple(o for _, o in self.terms)

    def __call__(self, s: complex) -> complex:
        return sum(c * principal_power(s, o) for c, o in self.terms)


def plant_transfer(plant: PlantParams, s: complex) -> complex:
    """G_s(s); raises TransferPoleError if the denominator is exactly 0."""
    den = (
        plant.a2 * principal_power(s, plant.alpha)
        + plant.a1 * principal_power(s, plant.beta)
        + plant.a0
    )
    if den == 0:
        raise TransferPoleError(s)
    return 1.0 / den


def controller_transfer(ctrl: ControllerParams, s: complex) -> complex:
    """G_r(s) = K + Td s^delta."""
    return ctrl.K + ctrl.Td * principal_power(s, ctrl.delta)


def open_loop_transfer(model: ClosedLoopModel, s: complex) -> complex:
    """Series connection G_r(s) * G_s(s)."""
    return controller_transfer(model.controller, s) * plant_transfer(model.plant, s)


def closed_loop_transfer(model: ClosedLoopModel, s: complex) -> complex:
    """Unity-feedback transfer G_r G_s / (1 + G_r G_s)."""
    ol = open_loop_transfer(model, s)
    den = 1.0 + ol
    if den == 0:
        raise TransferPoleError(s)
    return ol / den


def characteristic_terms(model: ClosedLoopModel) -> FractionalTermList:
    """Characteristic expression a2 s^alpha + Td s^delta + a1 s^beta + (a0+K).

    Equals 1/G_s(s) + G_r(s); its roots are the closed-loop poles.
    """
    p, c = model.plant, model.controller
    return FractionalTermList.from_pairs(
        [
            (p.a2, p.alpha),
            (c.Td, c.delta),
            (p.a1, p.beta),
            (p.a0 + c.K, 0.0),
        ]
    )
