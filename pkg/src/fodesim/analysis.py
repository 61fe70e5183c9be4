"""Pole-based stability analysis and frequency response.

When every characteristic order is an integer multiple of a base order q0,
the substitution v = s^q0 turns the characteristic expression into an
ordinary polynomial in v.  Its roots decide stability by the sector
condition: the system is stable iff every root satisfies
|arg v| > q0 * pi / 2.  Roots with |arg v| < pi * q0 lie on the principal
Riemann sheet of s = v^(1/q0) and map to the s-plane poles that govern the
time-domain character.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import (
    ClosedLoopModel,
    characteristic_terms,
    closed_loop_transfer,
    controller_transfer,
    open_loop_transfer,
    plant_transfer,
)

__all__ = [
    "CommensuratePolynomial",
    "StabilityReport",
    "FrequencyResponse",
    "IncommensurateOrdersError",
    "RootFindingError",
    "SECTOR_TOLERANCE",
    "commensurate_base",
    "characteristic_polynomial",
    "polynomial_roots",
    "principal_poles",
    "stability_report",
    "frequency_response",
]

SECTOR_TOLERANCE = 1e-9
RESIDUAL_LIMIT = 1e-8
MAX_BASE_DENOMINATOR = 1000

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"


class IncommensurateOrdersError(ValueError):
    """Orders share no rational base with a small enough denominator."""


class RootFindingError(RuntimeError):
    """Root residuals failed the acceptance threshold."""


@dataclass(frozen=True)
class CommensuratePolynomial:
    """Polynomial in v = s^base_order; coefficients[j] multiplies v^j."""

    base_order: float
    coefficients: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


@dataclass(frozen=True)
class StabilityReport:
    """Pole set and scalar stability/damping summaries of the closed loop.

    stability_measure is the negated real part of the dominant principal
    pole (positive means stable); the raw dominant real part and both
    damping ratio conventions are spelled out in convention_notes because
    the source literature does not pin a single convention.  The verdict
    comes from the sector test on all v-roots and is convention-free.
    """

    base_order: float
    v_roots: np.ndarray = field(repr=False)
    principal_poles: np.ndarray = field(repr=False)
    dominant_pole: complex | None
    stability_measure: float | None
    damping_measure: float | None
    verdict: str
    convention_notes: str


@dataclass(frozen=True)
class FrequencyResponse:
    """Log-grid frequency response; pole_flags marks non-finite samples."""

    which: str
    omega: np.ndarray = field(repr=False)
    magnitude_db: np.ndarray = field(repr=False)
    phase_deg: np.ndarray = field(repr=False)
    pole_flags: np.ndarray = field(repr=False)

    def rows(self):
        return zip(self.omega, self.magnitude_db, self.phase_deg)


def commensurate_base(orders, tol: float = SECTOR_TOLERANCE) -> float:
    """Largest q0 with every order an integer multiple of q0 within tol.

    Each order is rationalized with denominator <= 1000; q0 is the gcd of
    those rationals.  Orders that cannot be rationalized that tightly raise
    IncommensurateOrdersError (callers may round first).
    """
    orders = [float(o) for o in orders]
    if any(o < 0 for o in orders):
        raise ValueError(f"orders must be nonnegative, got {orders}")
    if not any(o > 0 for o in orders):
        raise ValueError("at least one order must be positive")
    base: Fraction | None = None
    for o in orders:
        if o == 0:
            continue
        f = Fraction(o).limit_denominator(MAX_BASE_DENOMINATOR)
        if f == 0:
            raise IncommensurateOrdersError(
                f"order {o} rationalizes to 0 with denominator <= "
                f"{MAX_BASE_DENOMINATOR}"
            )
        if base is None:
            base = f
        else:
            base = Fraction(
                math.gcd(f.numerator * base.denominator, base.numerator * f.denominator),
                f.denominator * base.denominator,
            )
    if base.denominator > MAX_BASE_DENOMINATOR:
        raise IncommensurateOrdersError(
            f"common base {base} needs denominator {base.denominator} > "
            f"{MAX_BASE_DENOMINATOR}"
        )
    q0 = float(base)
    for o in orders:
        ratio = o / q0
        if abs(ratio - round(ratio)) > tol:
            raise IncommensurateOrdersError(
                f"order {o} is not an integer multiple of base {q0} "
                f"within {tol}"
            )
    return q0


def characteristic_polynomial(model: ClosedLoopModel) -> CommensuratePolynomial:
    """Characteristic expression rewritten as a polynomial in v = s^q0.

    The base is taken over the structural orders {alpha, delta, beta, 0}
    even when a coefficient vanishes, so e.g. the undamped integer loop
    (Td = a1 = 0) keeps base 1 and its conjugate root pair instead of
    collapsing onto a coarser base.
    """
    structural = [
        model.plant.alpha,
        model.controller.delta,
        model.plant.beta,
        0.0,
    ]
    q0 = commensurate_base(structural)
    terms = characteristic_terms(model)
    degree = round(model.plant.alpha / q0)
    coeffs = np.zeros(degree + 1)
    for coef, order in terms.terms:
        coeffs[round(order / q0)] += coef
    return CommensuratePolynomial(base_order=q0, coefficients=coeffs)


def _relative_residuals(coeffs_desc: np.ndarray, roots: np.ndarray) -> np.ndarray:
    scale = np.polyval(np.abs(coeffs_desc), np.abs(roots))
    scale = np.where(scale > 0, scale, 1.0)
    return np.abs(np.polyval(coeffs_desc, roots)) / scale


def polynomial_roots(poly: CommensuratePolynomial) -> np.ndarray:
    """All degree-many roots of the polynomial, residual-checked.

    Companion-matrix eigenvalues, polished by a few Newton steps when a
    residual is above threshold.  Result sorted by descending real part,
    then descending imaginary part.
    """
    if poly.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    if poly.coefficients[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    desc = poly.coefficients[::-1].astype(float)
    roots = np.roots(desc)
    res = _relative_residuals(desc, roots)
    if np.any(res > 1e-10):
        deriv = np.polyder(desc)
        for i in np.nonzero(res > 1e-10)[0]:
            r = roots[i]
            for _ in range(8):
                dp = np.polyval(deriv, r)
                if dp == 0:
                    break
                r = r - np.polyval(desc, r) / dp
            roots[i] = r
        res = _relative_residuals(desc, roots)
    if np.any(res > RESIDUAL_LIMIT):
        worst = float(res.max())
        raise RootFindingError(
            f"root residual {worst:.2e} exceeds {RESIDUAL_LIMIT:.0e} "
            f"for degree-{poly.degree} polynomial"
        )
    order = np.lexsort((-roots.imag, -roots.real))
    return roots[order]


def principal_poles(v_roots, base_order: float) -> np.ndarray:
    """s-plane poles for v-roots on the principal sheet (|arg v| < pi*q0)."""
    if not (base_order > 0):
        raise ValueError(f"base_order must be positive, got {base_order}")
    v_roots = np.asarray(v_roots, dtype=complex)
    sel = np.abs(np.angle(v_roots)) < math.pi * base_order
    poles = np.array(
        [cmath.exp(cmath.log(v) / base_order) for v in v_roots[sel] if v != 0],
        dtype=complex,
    )
    order = np.lexsort((-poles.imag, -poles.real))
    return poles[order]


def stability_report(model: ClosedLoopModel) -> StabilityReport:
    """Poles, sector verdict and the scalar stability/damping measures."""
    poly = characteristic_polynomial(model)
    q0 = poly.base_order
    v_roots = polynomial_roots(poly)

    nonzero = v_roots[np.abs(v_roots) > 1e-12]
    boundary = q0 * math.pi / 2
    margins = np.abs(np.angle(nonzero)) - boundary
    if np.any(margins < -SECTOR_TOLERANCE):
        verdict = UNSTABLE
    elif len(nonzero) < len(v_roots) or np.any(margins <= SECTOR_TOLERANCE):
        verdict = MARGINAL
    else:
        verdict = STABLE

    poles = principal_poles(v_roots, q0)
    notes = [f"sector boundary |arg v| = q0*pi/2 with q0 = {q0:.12g}"]
    if len(poles):
        dominant = complex(poles[0])  # max real part, ties to larger imag
        stability_measure = -dominant.real
        notes.append(
            f"dominant principal pole {dominant.real:.6g} "
            f"{dominant.imag:+.6g}j; raw real part {dominant.real:.6g} "
            f"(negated as the stability measure: positive = stable)"
        )
        if dominant.imag != 0:
            damping = abs(dominant.real) / abs(dominant.imag)
            notes.append(
                f"damping measured as |Re/Im| = {damping:.6g}; "
                f"reciprocal |Im/Re| = {1.0 / damping:.6g}"
            )
        else:
            damping = math.inf
            notes.append("dominant pole is real: damping ratio infinite")
    else:
        dominant = None
        stability_measure = None
        damping = None
        notes.append(
            "no principal-sheet roots: response not dominated by an "
            "oscillatory pole pair"
        )
    return StabilityReport(
        base_order=q0,
        v_roots=v_roots,
        principal_poles=poles,
        dominant_pole=dominant,
        stability_measure=stability_measure,
        damping_measure=damping,
        verdict=verdict,
        convention_notes="; ".join(notes),
    )


_TRANSFERS = {
    "plant": lambda model, s: plant_transfer(model.plant, s),
    "controller": lambda model, s: controller_transfer(model.controller, s),
    "open_loop": open_loop_transfer,
    "closed_loop": closed_loop_transfer,
}


def frequency_response(
    model: ClosedLoopModel,
    omega_min: float,
    omega_max: float,
    points: int,
    which: str = "closed_loop",
) -> FrequencyResponse:
    """Magnitude (dB) and unwrapped phase (deg) on a log frequency grid."""
    if not (0 < omega_min < omega_max):
        raise ValueError(
            f"need 0 < omega_min < omega_max, got {omega_min}, {omega_max}"
        )
    if points < 2:
        raise ValueError(f"need at least 2 grid points, got {points}")
    if which not in _TRANSFERS:
        raise ValueError(f"which must be one of {sorted(_TRANSFERS)}, got {which!r}")
    evaluate = _TRANSFERS[which]
    omega = np.logspace(math.log10(omega_min), math.log10(omega_max), points)
    values = np.empty(points, dtype=complex)
    flags = np.zeros(points, dtype=bool)
    for i, om in enumerate(omega):
        try:
            g = evaluate(model, 1j * om)
        except ArithmeticError:
            g = complex(math.nan, math.nan)
        values[i] = g
        if not (math.isfinite(g.real) and math.isfinite(g.imag)) or g == 0:
            flags[i] = True
    mag = np.full(points, math.nan)
    ok = ~flags
    mag[ok] = 20.0 * np.log10(np.abs(values[ok]))
    phase = np.full(points, math.nan)
    phase[ok] = np.degrees(np.unwrap(np.angle(values[ok])))
    return FrequencyResponse(
        which=which,
        omega=omega,
        magnitude_db=mag,
        phase_deg=phase,
        pole_flags=flags,
    )
