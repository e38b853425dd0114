"""Internal core: complex log-gamma and the shared vertical-line quadrature.

Everything contour-shaped in this library (Whittaker functions, the
hypergeometric fallback, kernel integral representations, residue
cross-checks, the finite-shift identity) integrates some product of gamma
factors along a vertical line.  This module owns the two primitives those
evaluations share: a self-contained principal-branch ``log_gamma`` (scalar
and array form) and a trapezoid line integrator with automatic refinement
and height extension.

Not part of the public API; the public wrappers in ``specfun`` add input
validation.
"""

from __future__ import annotations

import cmath
import math
from math import fsum
from typing import Callable

import numpy as np

from .config import PrecisionConfig
from .errors import AccuracyError, DomainError

# Stirling tail coefficients B_{2n} / (2n (2n-1)), exact rationals.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
)

# Stirling series is applied once the shifted argument reaches this modulus;
# with ten tail terms the truncation sits below double-precision roundoff.
_STIRLING_RADIUS = 10.0

_LOG_2PI = math.log(2.0 * math.pi)
_POLE_EPS = 1e-13


def _stirling(w: complex) -> complex:
    """Asymptotic log Gamma, caller guarantees |w| >= _STIRLING_RADIUS, Re w > 0."""
    iw2 = 1.0 / (w * w)
    tail = 0.0 + 0.0j
    power = 1.0 / w
    for c in _STIRLING:
        tail += c * power
        power *= iw2
    return (w - 0.5) * cmath.log(w) - w + 0.5 * _LOG_2PI + tail


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma for scalar complex argument.

    Raises DomainError on (or within ~1e-13 of) the poles at nonpositive
    integers.  For negative real arguments between poles the imaginary part
    is 0 or pi according to the sign of Gamma, so exp(log_gamma(x)) is the
    correctly signed real value.
    """
    z = complex(z)
    if abs(z.imag) < _POLE_EPS:
        x = z.real
        if x < 0.5 and round(x) <= 0 and abs(x - round(x)) < _POLE_EPS:
            raise DomainError(f"log_gamma pole at z = {z}")
    if z.imag < 0.0:
        return log_gamma(z.conjugate()).conjugate()

    if z.real >= 0.5:
        w = z
        shift = 0.0 + 0.0j
        while abs(w) < _STIRLING_RADIUS:
            shift += cmath.log(w)
            w += 1.0
        return _stirling(w) - shift

    # Reflection for Re z < 0.5.  Branch-safe log of sin(pi z): for
    # Im z > 0 factor out exp(-i pi z) so the remaining log1p stays on the
    # principal sheet; for real z the sign of sin fixes the imaginary part.
    if z.imag == 0.0:
        x = z.real
        s = math.sin(math.pi * x)
        log_sin = complex(math.log(abs(s)), 0.0 if s > 0.0 else math.pi)
    else:
        w = cmath.exp(2j * math.pi * z)  # |w| < 1 since Im z > 0
        log_sin = (math.pi / 2.0) * 1j - math.log(2.0) \
            - 1j * math.pi * z + cmath.log(1.0 - w)
    return math.log(math.pi) - log_sin - log_gamma(1.0 - z)


def log_gamma_array(z: np.ndarray) -> np.ndarray:
    """Vectorized principal-branch log Gamma.

    Matches ``log_gamma`` wherever exp() of the result is consumed (the
    imaginary part of individual entries can differ by multiples of 2 pi
    when the recurrence walks across the negative real axis, which is
    invisible after exponentiation).  Intended for contour nodes, where
    arguments stay well away from the poles.
    """
    z = np.asarray(z, dtype=np.complex128)
    flip = z.imag < 0.0
    zz = np.where(flip, np.conj(z), z)

    re_min = float(np.min(zz.real))
    m = max(0, int(math.ceil(_STIRLING_RADIUS + 1.0 - re_min)))
    shift = np.zeros_like(zz)
    for j in range(m):
        shift += np.log(zz + j)
    w = zz + m

    iw2 = 1.0 / (w * w)
    tail = np.zeros_like(w)
    power = 1.0 / w
    for c in _STIRLING:
        tail += c * power
        power = power * iw2
    out = (w - 0.5) * np.log(w) - w + 0.5 * _LOG_2PI + tail - shift
    return np.where(flip, np.conj(out), out)


def _trapezoid_complex(values: np.ndarray, spacing: float) -> complex:
    """Trapezoid rule with exactly rounded (fsum) accumulation."""
    re = fsum(values.real) - 0.5 * (values.real[0] + values.real[-1])
    im = fsum(values.imag) - 0.5 * (values.imag[0] + values.imag[-1])
    return complex(re, im) * spacing


def line_integral(integrand: Callable[[np.ndarray], np.ndarray],
                  c: float,
                  height: float,
                  quad: PrecisionConfig,
                  min_spacing_hint: float | None = None,
                  max_refine: int = 9) -> complex:
    """(1 / 2 pi i) Integral of ``integrand`` along the line Re u = c.

    ``integrand`` receives an array of contour points u = c + i v and must
    return the integrand values (any constant prefactors included by the
    caller).  The quadrature is symmetric trapezoid in v over [-H, H] with
    H = ``height``, refined by node doubling until two successive passes
    agree to ``quad.rel_tol`` (two-pass criterion).  If the integrand has
    not decayed at the endpoints the height is extended before refinement
    begins.  ``min_spacing_hint`` caps the initial spacing, used by callers
    whose integrand oscillates like exp(i v * freq) with known freq.

    Raises AccuracyError if refinement stalls above the tolerance.
    """
    if height <= 0.0:
        raise DomainError("line_integral height must be positive")
    spacing = 1.0 / float(quad.quad_points)
    if min_spacing_hint is not None:
        spacing = min(spacing, float(min_spacing_hint))

    h = height
    for _ in range(5):
        n = int(math.ceil(h / spacing))
        v = np.linspace(-n * spacing, n * spacing, 2 * n + 1)
        vals = integrand(c + 1j * v)
        peak = float(np.max(np.abs(vals)))
        if peak == 0.0:
            return 0.0 + 0.0j
        edge = max(abs(vals[0]), abs(vals[-1]))
        if edge <= peak * quad.rel_tol * 1e-2:
            break
        h *= 1.6
    else:
        raise AccuracyError(
            "contour integrand not decayed at truncation height",
            achieved=float(edge / peak), requested=quad.rel_tol,
            suggestion=f"height {h:.1f} still insufficient; widen contour_height")

    total = _trapezoid_complex(vals, spacing)
    for _ in range(max_refine):
        mid_v = v[:-1] + 0.5 * spacing
        mid_vals = integrand(c + 1j * mid_v)
        spacing *= 0.5
        # interleave old nodes and midpoints
        merged = np.empty(v.size + mid_v.size, dtype=np.complex128)
        merged[0::2] = vals
        merged[1::2] = mid_vals
        mv = np.empty(merged.size)
        mv[0::2] = v
        mv[1::2] = mid_v
        v, vals = mv, merged
        new_total = _trapezoid_complex(vals, spacing)
        scale = max(abs(new_total), abs(total), peak * spacing)
        if abs(new_total - total) <= quad.rel_tol * scale:
            return new_total / (2.0 * math.pi)
        total = new_total
    raise AccuracyError(
        "contour quadrature did not converge",
        achieved=float(abs(new_total - total) / max(abs(new_total), 1e-300)),
        requested=quad.rel_tol,
        suggestion="raise quad_points or loosen rel_tol")


def refine_trapezoid(f: Callable[[np.ndarray], np.ndarray],
                     a: float, b: float, h0: float, rel_tol: float,
                     max_refine: int = 12,
                     abs_floor: float = 0.0) -> complex:
    """Trapezoid rule on [a, b] with node doubling until stable.

    ``f`` maps a node array to values (real or complex).  Intended for
    smooth decaying or band-limited integrands whose initial spacing h0
    already resolves the fastest oscillation; doubling then converges
    geometrically.  ``abs_floor`` is an absolute scale below which
    agreement counts as converged even when the value itself is tiny
    (near-cancelling integrals).  Raises AccuracyError when refinement
    stalls, carrying the achieved relative change.
    """
    if not b > a:
        raise DomainError("refine_trapezoid needs b > a")
    n = max(8, int(math.ceil((b - a) / h0)))
    x = np.linspace(a, b, n + 1)
    vals = np.asarray(f(x))
    spacing = (b - a) / n
    total = _trapezoid_complex(vals.astype(np.complex128), spacing)
    for _ in range(max_refine):
        mid = x[:-1] + 0.5 * spacing
        mid_vals = np.asarray(f(mid))
        spacing *= 0.5
        merged = np.empty(x.size + mid.size, dtype=np.complex128)
        merged[0::2] = vals
        merged[1::2] = mid_vals
        mx = np.empty(merged.size)
        mx[0::2] = x
        mx[1::2] = mid
        x, vals = mx, merged
        new_total = _trapezoid_complex(vals, spacing)
        scale = max(abs(new_total), abs(total), abs_floor)
        if abs(new_total - total) <= rel_tol * scale:
            return new_total
        total = new_total
    raise AccuracyError(
        "trapezoid refinement did not converge",
        achieved=float(abs(new_total - total) / max(abs(new_total), 1e-300)),
        requested=rel_tol,
        suggestion="decrease initial spacing or loosen rel_tol")


def refine_romberg(f: Callable[[np.ndarray], np.ndarray],
                   a: float, b: float, h0: float, rel_tol: float,
                   max_refine: int = 10,
                   abs_floor: float = 0.0) -> complex:
    """Romberg integration on [a, b] starting from spacing h0.

    Same contract as refine_trapezoid but with Richardson extrapolation,
    needed for smooth integrands whose endpoint derivatives do not vanish
    (plain trapezoid is only O(h^2) there).
    """
    if not b > a:
        raise DomainError("refine_romberg needs b > a")
    n = max(4, int(math.ceil((b - a) / h0)))
    x = np.linspace(a, b, n + 1)
    vals = np.asarray(f(x), dtype=np.complex128)
    spacing = (b - a) / n
    row = [_trapezoid_complex(vals, spacing)]
    for _ in range(max_refine):
        mid = x[:-1] + 0.5 * spacing
        mid_vals = np.asarray(f(mid), dtype=np.complex128)
        spacing *= 0.5
        merged = np.empty(vals.size + mid_vals.size, dtype=np.complex128)
        merged[0::2] = vals
        merged[1::2] = mid_vals
        mx = np.empty(merged.size)
        mx[0::2] = x
        mx[1::2] = mid
        x, vals = mx, merged
        new_row = [_trapezoid_complex(vals, spacing)]
        weight = 4.0
        for prev in row:
            new_row.append((weight * new_row[-1] - prev) / (weight - 1.0))
            weight *= 4.0
        best, prev_best = new_row[-1], row[-1]
        row = new_row
        scale = max(abs(best), abs(prev_best), abs_floor)
        if abs(best - prev_best) <= rel_tol * scale:
            return best
    raise AccuracyError(
        "Romberg refinement did not converge",
        achieved=float(abs(best - prev_best) / max(abs(best), 1e-300)),
        requested=rel_tol,
        suggestion="decrease initial spacing or loosen rel_tol")


def separation_gap(left_max: float, right_min: float) -> float:
    """Gap between the rightmost left-family pole and leftmost right-family pole."""
    return right_min - left_max


def place_line(left_max: float, right_min: float, eps_pole: float = 1e-3,
               perturb: float = 1e-6) -> tuple[float, bool]:
    """Midpoint contour abscissa between two pole families.

    Returns (c, perturbed).  When the families nearly touch (gap below
    eps_pole) the line is nudged off the midpoint by ``perturb`` and the
    flag is set; callers decide whether that is acceptable.  A negative gap
    means no straight separating line exists and is the caller's problem.
    """
    gap = separation_gap(left_max, right_min)
    c = 0.5 * (left_max + right_min)
    if gap < eps_pole:
        return c + perturb, True
    return c, False


def clear_of_integers(c: float, anchors: tuple[float, ...], step: float = 0.11,
                      min_dist: float = 0.05, tries: int = 40) -> float:
    """Shift c until it is at least min_dist from every lattice anchor + Z_{>=0}.

    Each anchor a generates forbidden points {a, a+1, a+2, ...}; used to
    keep a contour abscissa away from pole columns whose real parts are
    anchor-aligned.
    """
    def dist(x: float) -> float:
        d = math.inf
        for a in anchors:
            k = max(0, round(x - a))
            d = min(d, abs(x - (a + k)))
        return d

    cand = c
    for i in range(tries):
        if dist(cand) >= min_dist:
            return cand
        cand = c + step * ((i // 2) + 1) * (1 if i % 2 == 0 else -1)
    raise DomainError("could not place contour line clear of pole columns")
