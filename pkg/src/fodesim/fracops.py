"""Grunwald-Letnikov differintegral engine.

The discrete operator of order q acting on a uniformly sampled signal is

    D^q y(t_k)  ~=  h^(-q) * sum_{j=0..k} c_j * y(t_{k-j}),
    c_j = (-1)^j * binomial(q, j),

with the lower terminal at t = 0 and zero history before it.  Positive q
differentiates, negative q integrates, q = 0 is the identity.  The weights
are generated by the multiplicative recurrence c_j = c_{j-1} * (1 - (1+q)/j),
which is overflow-free and accurate for large j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

__all__ = [
    "GLCoefficients",
    "SampledSignal",
    "gl_coefficients",
    "gl_differintegral",
    "gl_series",
    "power_law_differintegral",
]


@dataclass(frozen=True)
class GLCoefficients:
    """Binomial weight sequence c_0..c_n of a differintegral of given order."""

    order: float
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled signal: values[k] taken at t_k = k * step."""

    step: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not (self.step > 0):
            raise ValueError(f"step must be positive, got {self.step}")
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("values must be a nonempty 1-D sequence")

    def __len__(self) -> int:
        return len(self.values)


def gl_coefficients(q: float, n: int) -> GLCoefficients:
    """Weights c_0..c_n for the order-q differintegral.

    c_0 = 1 and c_j = c_{j-1} * (1 - (1+q)/j), equal to (-1)^j * binomial(q, j).
    For integer q >= 0 the sequence terminates: c_j = 0 for j > q.
    """
    if not math.isfinite(q):
        raise ValueError(f"differintegral order must be finite, got {q}")
    if n < 0:
        raise ValueError(f"weight count must be nonnegative, got {n}")
    c = np.empty(n + 1)
    c[0] = 1.0
    if n > 0:
        # cumprod applies the factors left to right, same bits as a loop
        j = np.arange(1, n + 1)
        c[1:] = np.cumprod(1.0 - (1.0 + q) / j)
    return GLCoefficients(order=q, weights=c)


def gl_differintegral(
    signal: SampledSignal,
    q: float,
    k: int,
    memory: int | None = None,
) -> float:
    """Order-q differintegral of the signal at sample index k.

    Uses the full history back to t = 0 unless ``memory`` truncates the sum
    to the most recent ``memory + 1`` samples (short-memory principle,
    opt-in).
    """
    values = signal.values
    if not 0 <= k < len(values):
        raise IndexError(f"sample index {k} out of range 0..{len(values) - 1}")
    if memory is not None and memory < 1:
        raise ValueError(f"memory must be a positive integer, got {memory}")
    m = k if memory is None else min(k, memory)
    c = gl_coefficients(q, m).weights
    # sum_{j=0..m} c_j * values[k-j], summed in a fixed order
    acc = float(np.sum(c * values[k - m : k + 1][::-1]))
    return signal.step ** (-q) * acc


def gl_series(
    values: np.ndarray,
    q: float,
    step: float,
    memory: int | None = None,
) -> np.ndarray:
    """Order-q differintegral evaluated at every sample index at once.

    Equivalent to calling :func:`gl_differintegral` for k = 0..n-1, computed
    as one convolution of the weight sequence with the samples.
    """
    values = np.asarray(values, dtype=float)
    n = len(values) - 1
    c = gl_coefficients(q, n).weights
    if memory is not None:
        if memory < 1:
            raise ValueError(f"memory must be a positive integer, got {memory}")
        c = c.copy()
        c[memory + 1 :] = 0.0
    if n == 0:
        out = c[:1] * values
    else:
        out = fftconvolve(c, values)[: n + 1]
    return step ** (-q) * out


def power_law_differintegral(p: float, q: float, t: float) -> float:
    """Closed-form order-q differintegral of t**p (test oracle).

    D^q t^p = Gamma(p+1) / Gamma(p+1-q) * t^(p-q), valid for p > -1.  When
    p+1-q is a nonpositive integer the reciprocal gamma factor vanishes and
    the value is 0 (e.g. integer-order derivatives of lower-degree powers).
    """
    if not (p > -1.0):
        raise ValueError(f"power-law exponent must exceed -1, got p={p}")
    if not (t > 0.0):
        raise ValueError(f"evaluation time must be positive, got t={t}")
    denom_arg = p + 1.0 - q
    if denom_arg <= 0.0 and abs(denom_arg - round(denom_arg)) < 1e-12:
        return 0.0
    if denom_arg <= 0.0:
        raise ValueError(
            f"result order out of domain: p - q = {p - q} must exceed -1"
        )
    return math.gamma(p + 1.0) / math.gamma(denom_arg) * t ** (p - q)
