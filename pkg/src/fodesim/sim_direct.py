"""Direct time-domain solver of the closed-loop fractional equation.

The loop equation

    a2 y^(alpha) + a1 y^(beta) + Td y^(delta) + (a0+K) y = K w + Td w^(delta)

is discretized by replacing every differintegral with its GL sum.  Isolating
the current sample y_k from the j = 0 term of each sum gives a noniterative
update: the left side contributes the constant

    denom = a2 h^-alpha + a1 h^-beta + Td h^-delta + a0 + K

and the remaining weights only multiply already-computed samples.  Iterative
fixed-point variants of this discretization are known not to converge; the
isolated form needs no iteration at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fracops import gl_coefficients, gl_series
from .model import ClosedLoopModel

__all__ = [
    "TimeSeries",
    "IllPosedDiscretizationError",
    "NoEquilibriumError",
    "DEFAULT_DIVERGENCE_BOUND",
    "simulate_direct",
    "steady_state_prediction",
]

DEFAULT_DIVERGENCE_BOUND = 1e6


class IllPosedDiscretizationError(RuntimeError):
    """Update denominator not positive/finite: step too large or bad signs."""


class NoEquilibriumError(ValueError):
    """Statics have no solution because a0 + K = 0."""


@dataclass(frozen=True)
class TimeSeries:
    """Closed-loop response samples; diverged marks a truncated unstable run."""

    step: float
    t: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    diverged: bool = False

    def __len__(self) -> int:
        return len(self.t)


def sample_count(h: float, t_end: float) -> int:
    """Number of grid points 0..N with N = floor(t_end / h)."""
    return int(math.floor(t_end / h + 1e-9)) + 1


def simulate_direct(
    model: ClosedLoopModel,
    h: float,
    t_end: float,
    memory: int | None = None,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> TimeSeries:
    """Unit-step (or configured-input) response of the closed loop.

    Zero initial conditions: the system is at rest for t < 0.  The run is
    truncated with ``diverged=True`` as soon as |y| exceeds
    ``divergence_bound`` or stops being finite.
    """
    if not (h > 0):
        raise ValueError(f"step h must be positive, got {h}")
    if t_end < h:
        raise ValueError(f"t_end ({t_end}) must be at least one step ({h})")
    p, c = model.plant, model.controller
    n = sample_count(h, t_end) - 1
    w = model.input.sample(h, n + 1)

    ca = gl_coefficients(p.alpha, n).weights
    cb = gl_coefficients(p.beta, n).weights
    cd = gl_coefficients(c.delta, n).weights
    weff = (
        p.a2 * h ** (-p.alpha) * ca
        + p.a1 * h ** (-p.beta) * cb
        + c.Td * h ** (-c.delta) * cd
    )
    if memory is not None and memory < 1:
        raise ValueError(f"memory must be a positive integer, got {memory}")

    denom = weff[0] + p.a0 + c.K
    if not (math.isfinite(denom) and denom > 0):
        raise IllPosedDiscretizationError(
            f"update denominator {denom} is not positive and finite; "
            f"reduce h or check coefficient signs"
        )

    # right side: K w + Td D^delta w, input history included from t = 0
    rhs = c.K * w + c.Td * gl_series(w, c.delta, h, memory=memory)

    y = np.zeros(n + 1)
    wr = weff[::-1]  # wr[i] = weff[n - i]
    diverged = False
    end = n
    for k in range(n + 1):
        # history sum_{j=1..min(k, memory)} weff_j y_{k-j} over contiguous views
        m = k if memory is None else min(k, memory)
        hist = np.sum(wr[n - m : n] * y[k - m : k]) if m > 0 else 0.0
        yk = (rhs[k] - hist) / denom
        y[k] = yk
        if not math.isfinite(yk) or abs(yk) > divergence_bound:
            diverged = True
            end = k
            break

    y = y[: end + 1]
    w = w[: end + 1]
    t = np.arange(end + 1) * h
    return TimeSeries(step=h, t=t, y=y, w=w, diverged=diverged)


def steady_state_prediction(model: ClosedLoopModel, w_const: float) -> float:
    """Rest value of y for a constant input: all derivative terms vanish,
    leaving (a0 + K) y = K w."""
    a0 = model.plant.a0
    K = model.controller.K
    if a0 + K == 0:
        raise NoEquilibriumError("a0 + K = 0: statics have no solution")
    return K * w_const / (a0 + K)
