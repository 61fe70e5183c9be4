"""State-space solvers, equilibrium computation and trajectory classification.

Two-state realization of the closed loop: x1 is the internal state z of

    a2 z^(alpha) + a1 z^(beta) + Td z^(delta) + (a0+K) z = w,

x2 = z', and the output recombines them as y = K x1 + Td D^(delta-1) x2.
The first state equation x1' = x2 is structural; the second carries the
fractional history terms.  Time stepping is explicit Euler on the integer
derivatives with GL evaluation of every fractional term at the current step.

A commensurate vector form x^(q) = A x + B u with y = C x is also provided
for systems whose orders share a single base q.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .fracops import gl_coefficients, gl_series
from .model import ClosedLoopModel
from .sim_direct import (
    DEFAULT_DIVERGENCE_BOUND,
    NoEquilibriumError,
    sample_count,
    steady_state_prediction,
)

__all__ = [
    "Term",
    "StateSpaceRealization",
    "StateTrajectory",
    "CommensurateStateSpace",
    "EquilibriumPoint",
    "VARIANTS",
    "build_realization",
    "simulate_state_space",
    "simulate_commensurate",
    "equilibrium",
    "classify_trajectory",
]

VARIANTS = ("verbatim", "derived_consistent")

CONVERGING = "converging"
DIVERGING = "diverging"
UNDETERMINED = "undetermined"


class Term(NamedTuple):
    """One right-hand-side or output contribution: coef * D^order(source)."""

    coefficient: float
    order: float
    source: str  # "x1" | "x2" | "w"


@dataclass(frozen=True)
class StateSpaceRealization:
    """Two-state realization; rhs_terms[i] feeds the derivative of state i+1."""

    variant: str
    rhs_terms: tuple[tuple[Term, ...], ...]
    output_terms: tuple[Term, ...]
    state_count: int = 2


@dataclass(frozen=True)
class StateTrajectory:
    """State, output and input sample paths of one simulation run."""

    step: float
    t: np.ndarray = field(repr=False)
    x1: np.ndarray = field(repr=False)
    x2: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    diverged: bool = False
    states: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class CommensurateStateSpace:
    """Vector model x^(order) = A x + B u, y = C x with one common order."""

    order: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float).reshape(-1)
        C = np.asarray(self.C, dtype=float).reshape(-1)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if B.shape != (n,) or C.shape != (n,):
            raise ValueError(
                f"B and C must have {n} entries, got {B.shape} and {C.shape}"
            )
        if not (0 < self.order <= 1):
            warnings.warn(
                f"commensurate order {self.order} outside (0, 1]; "
                f"the GL stepping is formally valid but untypical",
                stacklevel=3,
            )


@dataclass(frozen=True)
class EquilibriumPoint:
    """Rest point of the two-state realization for a constant input."""

    x1_star: float
    x2_star: float
    y_star: float


def build_realization(
    model: ClosedLoopModel, variant: str = "derived_consistent"
) -> StateSpaceRealization:
    """Construct the two-state realization of the closed loop.

    ``derived_consistent`` (default) is the form obtained by differentiating
    the internal-state equation twice and lowering the extra orders onto
    x2 = z'; simulating it reproduces the direct solver as h -> 0.
    ``verbatim`` keeps all lowered orders on x1 and flips the input sign;
    it is retained for comparison only and does not settle to the statics
    equilibrium.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    p, c = model.plant, model.controller
    a2 = p.a2
    o_lead = 2.0 - p.alpha
    o_td = 1.0 + c.delta - p.alpha
    o_a1 = 1.0 + p.beta - p.alpha
    if variant == "verbatim":
        second = (
            Term(-(p.a0 + c.K) / a2, o_lead, "x1"),
            Term(-c.Td / a2, o_td, "x1"),
            Term(-p.a1 / a2, o_a1, "x1"),
            Term(-1.0 / a2, o_lead, "w"),
        )
    else:
        second = (
            Term(-(p.a0 + c.K) / a2, o_lead, "x1"),
            Term(-c.Td / a2, o_td, "x2"),
            Term(-p.a1 / a2, o_a1, "x2"),
            Term(1.0 / a2, o_lead, "w"),
        )
    output = (
        Term(c.K, 0.0, "x1"),
        Term(c.Td, c.delta - 1.0, "x2"),
    )
    return StateSpaceRealization(
        variant=variant,
        rhs_terms=((Term(1.0, 0.0, "x2"),), second),
        output_terms=output,
    )


def simulate_state_space(
    realization: StateSpaceRealization,
    model: ClosedLoopModel,
    h: float,
    t_end: float,
    memory: int | None = None,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> StateTrajectory:
    """Explicit-Euler run of the two-state realization from rest.

    x1_{k+1} = x1_k + h x2_k and x2_{k+1} = x2_k + h f_k, where f_k sums the
    second state equation's terms with each fractional derivative evaluated
    by the GL operator over the history accumulated through step k.
    """
    if not (h > 0):
        raise ValueError(f"step h must be positive, got {h}")
    if t_end < h:
        raise ValueError(f"t_end ({t_end}) must be at least one step ({h})")
    if memory is not None and memory < 1:
        raise ValueError(f"memory must be a positive integer, got {memory}")

    n = sample_count(h, t_end) - 1
    w = model.input.sample(h, n + 1)

    # Collapse the second equation into one effective weight array per state
    # source (coef * h^-order * c_j summed over terms) so each step costs two
    # contiguous dot products; input terms are precomputed for the whole run.
    wx1 = np.zeros(n + 1)
    wx2 = np.zeros(n + 1)
    forcing = np.zeros(n + 1)
    have_x1 = have_x2 = False
    for coef, order, source in realization.rhs_terms[1]:
        if source == "w":
            forcing += coef * gl_series(w, order, h, memory=memory)
            continue
        scaled = coef * h ** (-order) * gl_coefficients(order, n).weights
        if memory is not None:
            scaled[memory + 1 :] = 0.0
        if source == "x1":
            wx1 += scaled
            have_x1 = True
        elif source == "x2":
            wx2 += scaled
            have_x2 = True
        else:
            raise ValueError(f"unknown term source {source!r}")

    x1 = np.zeros(n + 1)
    x2 = np.zeros(n + 1)
    rx1 = wx1[::-1]  # rx1[i] = wx1[n - i]
    rx2 = wx2[::-1]
    diverged = False
    end = n
    for k in range(n + 1):
        if (
            not (math.isfinite(x1[k]) and math.isfinite(x2[k]))
            or abs(x1[k]) > divergence_bound
            or abs(x2[k]) > divergence_bound
        ):
            diverged = True
            end = k
            break
        if k == n:
            break
        f = forcing[k]
        if have_x1:
            f += np.sum(rx1[n - k : n + 1] * x1[: k + 1])
        if have_x2:
            f += np.sum(rx2[n - k : n + 1] * x2[: k + 1])
        x1[k + 1] = x1[k] + h * x2[k]
        x2[k + 1] = x2[k] + h * f

    x1 = x1[: end + 1]
    x2 = x2[: end + 1]
    w_run = w[: end + 1]

    # Output does not feed back, so it is evaluated in one vectorized pass.
    sources = {"x1": x1, "x2": x2, "w": w_run}
    y = np.zeros(end + 1)
    for coef, order, source in realization.output_terms:
        y += coef * gl_series(sources[source], order, h, memory=memory)

    bad = ~np.isfinite(y) | (np.abs(y) > divergence_bound)
    if bad.any() and not diverged:
        cut = int(np.argmax(bad))
        diverged = True
        end = cut
        x1, x2, w_run, y = x1[: cut + 1], x2[: cut + 1], w_run[: cut + 1], y[: cut + 1]

    t = np.arange(end + 1) * h
    return StateTrajectory(
        step=h, t=t, x1=x1, x2=x2, y=y, w=w_run, diverged=diverged
    )


def simulate_commensurate(
    ss: CommensurateStateSpace,
    input_signal,
    h: float,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> StateTrajectory:
    """GL stepping of the commensurate vector model from zero initial state.

    x_{k+1} = h^q (A x_k + B u_k) - sum_{j=1..k+1} c_j x_{k+1-j}.  With q = 1
    the weights beyond j = 1 vanish and the scheme is exactly explicit Euler.
    """
    if not (h > 0):
        raise ValueError(f"step h must be positive, got {h}")
    u = np.asarray(input_signal.values, dtype=float)
    if not math.isclose(input_signal.step, h, rel_tol=1e-12):
        raise ValueError(
            f"input sampled at step {input_signal.step}, stepping uses {h}"
        )
    A, B, C, q = ss.A, ss.B, ss.C, ss.order
    n = len(u) - 1
    m = A.shape[0]
    c = gl_coefficients(q, n + 1).weights
    cr = c[::-1]  # cr[i] = c[n + 1 - i]
    hq = h**q
    x = np.zeros((n + 1, m))
    diverged = False
    end = n
    for k in range(n):
        # sum_{j=1..k+1} c_j x_{k+1-j} = sum_{i=0..k} c_{k+1-i} x_i
        hist = cr[n - k : n + 1] @ x[: k + 1]
        x[k + 1] = hq * (A @ x[k]) + hq * (B * u[k]) - hist
        if not np.all(np.isfinite(x[k + 1])) or np.max(np.abs(x[k + 1])) > divergence_bound:
            diverged = True
            end = k + 1
            break

    x = x[: end + 1]
    y = x @ C
    u_run = u[: end + 1]
    t = np.arange(end + 1) * h
    x2 = x[:, 1] if m > 1 else np.zeros(end + 1)
    return StateTrajectory(
        step=h,
        t=t,
        x1=x[:, 0],
        x2=x2,
        y=y,
        w=u_run,
        diverged=diverged,
        states=x,
    )


def equilibrium(model: ClosedLoopModel, w_const: float) -> EquilibriumPoint:
    """Rest point the state trajectories tend to for a constant input.

    Setting both state derivatives to zero leaves x2 = 0 and
    (a0 + K) x1 = w; the output statics y = K x1 match
    :func:`steady_state_prediction`.
    """
    a0 = model.plant.a0
    K = model.controller.K
    if a0 + K == 0:
        raise NoEquilibriumError("a0 + K = 0: statics have no solution")
    x1_star = w_const / (a0 + K)
    return EquilibriumPoint(
        x1_star=x1_star,
        x2_star=0.0,
        y_star=steady_state_prediction(model, w_const),
    )


def classify_trajectory(
    traj: StateTrajectory,
    eq: EquilibriumPoint,
    settle_window: float = 0.25,
) -> str:
    """Focal-point character of a run: converging, diverging or undetermined.

    Compares the peak distance from the equilibrium over the final
    ``settle_window`` fraction of the run against the peak over an
    equal-length window ending at the halfway point.  A truncated-diverged
    run is diverging regardless.
    """
    if not (0 < settle_window <= 0.5):
        raise ValueError(f"settle_window must be in (0, 0.5], got {settle_window}")
    n = len(traj)
    if n < 10:
        raise ValueError(f"trajectory too short to classify ({n} samples)")
    if traj.diverged:
        return DIVERGING
    r = np.hypot(traj.x1 - eq.x1_star, traj.x2 - eq.x2_star)
    wlen = max(1, int(math.floor(n * settle_window)))
    tail_max = float(np.max(r[n - wlen :]))
    mid = n // 2
    ref_max = float(np.max(r[mid - wlen : mid]))
    if tail_max < 1e-12 and ref_max < 1e-12:
        return CONVERGING
    if ref_max == 0.0:
        return DIVERGING
    ratio = tail_max / ref_max
    if ratio < 0.5:
        return CONVERGING
    if ratio > 2.0:
        return DIVERGING
    return UNDETERMINED
