"""Weighted Whittaker transform kernel in mutually checking representations.

Operations
----------
m_truncated_quadrature   windowed defining integral, adaptive Romberg in log y
m_closed                 hypergeometric closed form on its convergence region
m_contour                residue ladder + shifted Mellin-Barnes line; the continuation
m_limit                  delta -> 0 closed form
m_residue_s              residue at s = 1/2 - ell +- z
m_residue_z              residue at z = +-(s + m - 1/2)
m_residue_s_limit        delta -> 0 main term of m_residue_s
m_residue_z_limit        delta -> 0 main term of m_residue_z
lemma225_gap             exponent-gap inequality behind the contour decay bounds

The kernel M(s, z, delta) is the integral over (0, inf) of
y^(s-1) e^(y(1-delta)) W_(k/2, z)(2y) dy/y, windowed to
[2 pi h / Y, 2 pi h Y] in the truncated form.  The three full-range
representations are checked against each other by the test suite, and the
residue formulas against small-circle contour integrals of m_contour.

Conditioning note: the ladder form's partial sum grows like
(2/delta - 1)^A before cancelling against the line integral.  m_contour
measures the binary64 cancellation and falls back to arbitrary precision
(mpmath) when the surviving digits cannot meet the requested tolerance;
everything else in the module is plain binary64.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import fsum

import mpmath
import numpy as np

from ._mellin import (
    line_integral,
    log_gamma,
    log_gamma_array,
    refine_romberg,
)
from .config import DEFAULT_PRECISION, PrecisionConfig
from .errors import AccuracyError, DomainError
from .specfun import _f21_mb_regularized, _rgamma, _whittaker_w_grid, gauss_2f1

__all__ = [
    "MFunctionParams",
    "Truncation",
    "m_truncated_quadrature",
    "m_closed",
    "m_contour",
    "m_limit",
    "m_residue_s",
    "m_residue_z",
    "m_residue_s_limit",
    "m_residue_z_limit",
    "lemma225_gap",
]

_LN2 = math.log(2.0)

# Refusal distance from the polar lines s - 1/2 +- z in Z_{<=0}; inside it
# the continuation formulas amplify rather than extrapolate.
_EPS_POLE = 1e-3

# Distance of s - k/2 from the nonpositive integers below which m_closed
# evaluates F / Gamma(c) as one regularized expression instead of the
# 0 * inf product of the two factors.
_DEGENERATE_C = 1e-3

# A user-supplied ladder shift must clear the integers by this much, or
# the Gamma(-u) factor blows up on the v = 0 quadrature node.
_A_CLEARANCE = 0.05

# Extra truncation height beyond contour_height + |Im| sums; the line
# integrands here all decay at least like e^(-pi |v|) once past the
# parameter offsets, so a fixed margin dominates the tail.
_HEIGHT_MARGIN = 10.0

# Fraction of rel_tol the binary64 ladder noise may consume before
# m_contour switches to the arbitrary-precision bracket.
_MP_TRIGGER = 0.05


def _cfg(precision: PrecisionConfig | None) -> PrecisionConfig:
    return DEFAULT_PRECISION if precision is None else precision


def _nearest_nonpos_int(w: complex) -> tuple[int, float]:
    n = min(0, round(w.real))
    return n, abs(w - n)


def _check_index(n: object, name: str) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"{name} must be a nonnegative integer, got {n!r}")
    return int(n)


def _check_sign(sign: object) -> int:
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    return int(sign)


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 < delta < 1.0 or not math.isfinite(delta):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return delta


def _rgamma_array(w: np.ndarray) -> np.ndarray:
    """1 / Gamma over an array, finite (zero) at the poles.

    Arguments left of Re w = 1/2 go through the reflection formula, whose
    Gamma(1 - w) factor is then always pole-free; the rest through
    exp(-log Gamma).
    """
    w = np.asarray(w, dtype=np.complex128)
    out = np.empty(w.shape, dtype=np.complex128)
    left = w.real < 0.5
    if np.any(left):
        wl = w[left]
        out[left] = (np.sin(np.pi * wl) / np.pi
                     * np.exp(log_gamma_array(1.0 - wl)))
    if np.any(~left):
        out[~left] = np.exp(-log_gamma_array(w[~left]))
    return out


def _lattice_dist(x: float) -> float:
    f = x % 1.0
    return min(f, 1.0 - f)


def _pick_mb_line(left_edge: float, anchors: tuple[float, ...]) -> float:
    """A negative abscissa right of ``left_edge`` and clear of the
    unit-spaced pole lattices anchored at ``anchors``.

    The residue formulas keep one Gamma family entirely left of their
    line while the crossed poles of the other are collected into the
    finite sum, so any clear abscissa in the window gives the same value;
    the candidates just avoid quadrature near a pole.
    """
    if left_edge >= -0.08:
        raise DomainError(
            "no admissible Mellin-Barnes line: pole family edge at "
            f"{left_edge:.4g} leaves no room left of 0")
    for cand in (-0.25, -0.4, -0.12, -0.33, -0.18, -0.45, -0.07):
        if cand <= left_edge + 0.04 or cand >= -0.02:
            continue
        if all(_lattice_dist(cand - a) >= 0.05 for a in anchors):
            return cand
    raise DomainError(
        "no admissible Mellin-Barnes line clear of the pole lattices "
        f"anchored at {anchors}")


# ---------------------------------------------------------------------------
# parameter bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Truncation:
    """Window [2 pi h / Y, 2 pi h Y] of the defining integral; Y = 1
    degenerates to the empty window."""
    Y: float
    h: int = 1


@dataclass(frozen=True)
class MFunctionParams:
    """Arguments of the kernel: weight k, spectral pair (s, z), damping
    delta in (0, 1), and an optional truncation window."""
    k: float
    s: complex
    z: complex
    delta: float
    truncation: Truncation | None = None

    def __post_init__(self) -> None:
        k = float(self.k)
        s, z = complex(self.s), complex(self.z)
        for val, name in ((k, "k"), (s.real, "Re s"), (s.imag, "Im s"),
                          (z.real, "Re z"), (z.imag, "Im z")):
            if not math.isfinite(val):
                raise DomainError(f"{name} must be finite")
        _check_delta(self.delta)
        t = self.truncation
        if t is not None:
            if not (math.isfinite(float(t.Y)) and float(t.Y) >= 1.0):
                raise DomainError(f"truncation Y must be >= 1, got {t.Y}")
            if isinstance(t.h, bool) or not isinstance(t.h, (int, np.integer)) \
                    or t.h < 1:
                raise DomainError(f"truncation h must be an integer >= 1, got {t.h!r}")


# ---------------------------------------------------------------------------
# the four representations
# ---------------------------------------------------------------------------

def m_truncated_quadrature(p: MFunctionParams,
                           precision: PrecisionConfig | None = None) -> complex:
    """Windowed kernel integral, Romberg in v = log y.

    The Whittaker factor is taken in exponentially scaled form so that
    its e^(-y) decay and the e^(y(1-delta)) growth of the weight never
    meet binary64 range limits separately; the combined integrand decays
    like e^(-delta y).  Y = 1 returns 0 (empty window).
    """
    quad = _cfg(precision)
    if p.truncation is None:
        raise DomainError("m_truncated_quadrature needs MFunctionParams.truncation")
    s, z = complex(p.s), complex(p.z)
    kappa = 0.5 * float(p.k)
    delta = float(p.delta)
    big_y = float(p.truncation.Y)
    h = int(p.truncation.h)
    if big_y == 1.0:
        return 0j
    center = math.log(2.0 * math.pi * h)
    half = math.log(big_y)

    def f(v: np.ndarray) -> np.ndarray:
        ys = np.exp(v)
        w_scaled = _whittaker_w_grid(kappa, z, 2.0 * ys, quad, scaled=True)
        return np.exp((s - 1.0) * v - delta * ys) * w_scaled

    h0 = 0.25 / (1.0 + 0.2 * (abs(s.imag) + abs(z.imag)))
    return complex(refine_romberg(f, center - half, center + half, h0,
                                  quad.rel_tol))


def m_closed(p: MFunctionParams,
             precision: PrecisionConfig | None = None) -> complex:
    """Closed hypergeometric form; needs Re(s - 1/2 +- z) > 0.

    When Gamma(s - k/2) sits within 1e-3 of a pole the hypergeometric
    factor degenerates with it and the ratio F / Gamma is evaluated as a
    single regularized expression: a finite pole-free sum if the series
    terminates, else one Mellin-Barnes integral.
    """
    quad = _cfg(precision)
    s, z = complex(p.s), complex(p.z)
    k = float(p.k)
    delta = float(p.delta)
    ap = s - 0.5 + z
    am = s - 0.5 - z
    if ap.real <= 0.0 or am.real <= 0.0:
        raise DomainError(
            "m_closed needs Re(s - 1/2 +- z) > 0; got "
            f"{ap.real:.6g} and {am.real:.6g}")
    b = z - 0.5 * k + 0.5
    c = s - 0.5 * k
    x = 1.0 - 2.0 / delta
    pref = cmath.exp((z + 0.5) * _LN2 + log_gamma(ap) + log_gamma(am)
                     - ap * math.log(delta))
    _, dist = _nearest_nonpos_int(c)
    if dist < _DEGENERATE_C:
        for param in (ap, b):
            n, d = _nearest_nonpos_int(param)
            if d < 1e-12:
                return pref * _f21_poly_regularized(ap, b, c, x, -n)
        return pref * _f21_mb_regularized(ap, b, c, x, quad)
    return pref * _rgamma(c) * gauss_2f1(ap, b, c, x, quad)


def _f21_poly_regularized(a: complex, b: complex, c: complex, x: float,
                          n_end: int) -> complex:
    """Terminating F(a, b; c; x) / Gamma(c): each 1/Gamma(c + n) factor is
    entire, so the sum survives c at a nonpositive integer."""
    total = 0j
    num = 1.0 + 0j
    for n in range(n_end + 1):
        total += num * _rgamma(c + n)
        num *= (a + n) * (b + n) * x / (n + 1.0)
    return total


def m_contour(p: MFunctionParams, A: float | None = None,
              precision: PrecisionConfig | None = None) -> complex:
    """Residue ladder plus Mellin-Barnes line at Re u = A; the continuation.

    Valid for (s, z) at least _EPS_POLE away from the polar families
    s - 1/2 +- z in Z_{<=0}; agrees with m_closed on the closed form's
    region and continues the kernel beyond it.  A defaults to the
    smallest half-odd integer above 1 + |Re s| + |Re z| + |k|/2; under
    that bound every pole of the left Gamma families stays strictly below
    A - 1/2, so the straight vertical line is always admissible and
    results are A-independent (tested at A vs A + 2).

    The ladder terms reach (2/delta - 1)^A before cancelling.  The
    binary64 noise floor is estimated from the gross term sizes, and if
    it would eat the requested tolerance the bracket is recomputed with
    mpmath at self-validated precision.
    """
    quad = _cfg(precision)
    s, z = complex(p.s), complex(p.z)
    k = float(p.k)
    delta = float(p.delta)
    ap = s - 0.5 + z
    am = s - 0.5 - z
    b = z - 0.5 * k + 0.5
    c = s - 0.5 * k
    for w, label in ((ap, "s - 1/2 + z"), (am, "s - 1/2 - z")):
        n, dist = _nearest_nonpos_int(w)
        if dist < _EPS_POLE:
            raise DomainError(
                f"(s, z) lies within {_EPS_POLE} of the polar line "
                f"{label} = {n}")
    n, dist = _nearest_nonpos_int(b)
    if dist < _EPS_POLE:
        raise DomainError(
            f"z - k/2 + 1/2 within {_EPS_POLE} of the nonpositive integer "
            f"{n}: the ladder prefactor degenerates there; m_closed's "
            "terminating branch covers this set")
    a_min = 1.0 + abs(s.real) + abs(z.real) + 0.5 * abs(k)
    if A is None:
        frac = a_min - math.floor(a_min)
        A = math.floor(a_min) + (0.5 if frac < 0.5 else 1.5)
    else:
        A = float(A)
        if not A > a_min:
            raise DomainError(
                f"A must exceed 1 + |Re s| + |Re z| + |k|/2 = {a_min:.6g}")
        if abs(A - round(A)) < _A_CLEARANCE:
            raise DomainError(
                f"A must sit at least {_A_CLEARANCE} from the integers")
    x_big = 2.0 / delta - 1.0
    lnx = math.log(x_big)
    height = quad.contour_height + abs(s.imag) + abs(z.imag) + _HEIGHT_MARGIN
    hint = 0.7 / max(1.0, lnx)
    n_terms = int(math.floor(A)) + 1

    terms = []
    for ell in range(n_terms):
        lg = (log_gamma(ap + ell) + log_gamma(b + ell)
              - math.lgamma(ell + 1) + ell * lnx)
        terms.append((-1) ** ell * cmath.exp(lg) * _rgamma(c + ell))

    def integrand(u: np.ndarray) -> np.ndarray:
        lg = (log_gamma_array(ap + u) + log_gamma_array(b + u)
              + log_gamma_array(-u) - log_gamma_array(c + u))
        return np.exp(lg + u * lnx)

    try:
        line = line_integral(integrand, A, height, quad,
                             min_spacing_hint=hint)
        bracket = sum(terms, 0j) + line
        gross = fsum(abs(t) for t in terms) + abs(line)
        noisy = abs(bracket) * quad.rel_tol * _MP_TRIGGER <= gross * 1e-15
    except AccuracyError:
        bracket = None
        gross = fsum(abs(t) for t in terms)
        noisy = True
    if noisy:
        im_off = abs(s.imag) + abs(z.imag)
        bracket = _bracket_mp(ap, b, c, float(A), x_big, height, im_off,
                              quad, gross)
    pref = cmath.exp(log_gamma(am) + (z + 0.5) * _LN2
                     - ap * math.log(delta)) * _rgamma(b)
    return pref * bracket


_LN10 = math.log(10.0)


def _bracket_mp(ap: complex, b: complex, c: complex, A: float, x_big: float,
                height: float, im_off: float, quad: PrecisionConfig,
                gross: float) -> complex:
    """Ladder-plus-line bracket in arbitrary precision.

    Working precision starts from the gross cancellation magnitude plus
    the tolerance budget; a pass is accepted only if its own error
    accounting (trapezoid convergence and the measured gross * ulp noise
    bound) covers the target, else precision is stepped up.
    """
    tol_digits = max(1, int(math.ceil(-math.log10(quad.rel_tol))))
    digits = max(0, int(math.ceil(math.log10(max(gross, 1.0)))))
    dps = 16 + tol_digits + digits
    gap = math.inf
    for _ in range(4):
        val, ok, gap = _bracket_mp_once(ap, b, c, A, x_big, height, im_off,
                                        dps, quad)
        if ok:
            return val
        dps += max(14, dps // 2)
    raise AccuracyError(
        "m_contour arbitrary-precision bracket did not stabilize",
        achieved=gap, requested=quad.rel_tol,
        suggestion="loosen rel_tol or move (s, z) away from the polar set")


def _bracket_mp_once(ap: complex, b: complex, c: complex, A: float,
                     x_big: float, height: float, im_off: float,
                     dps: int, quad: PrecisionConfig
                     ) -> tuple[complex, bool, float]:
    # Node coordinates are exact dyadic mpf multiples: binary64 node
    # jitter against integrand slopes of order gross would otherwise
    # floor the achievable absolute error.
    with mpmath.workdps(dps):
        apm, bm, cm = mpmath.mpc(ap), mpmath.mpc(b), mpmath.mpc(c)
        x_mp = mpmath.mpf(x_big)
        lnx = mpmath.log(x_mp)
        lnx_f = float(lnx)
        rsum = mpmath.mpc(0)
        gross_mp = mpmath.mpf(0)
        term = mpmath.gamma(apm) * mpmath.gamma(bm) * mpmath.rgamma(cm)
        for ell in range(int(math.floor(A)) + 1):
            rsum += -term if ell % 2 else term
            gross_mp += abs(term)
            term = term * (apm + ell) * (bm + ell) * x_mp \
                / ((cm + ell) * (ell + 1))

        def f(v):
            u = mpmath.mpc(A, v)
            return (mpmath.gamma(apm + u) * mpmath.gamma(bm + u)
                    * mpmath.gamma(-u) * mpmath.rgamma(cm + u)
                    * mpmath.exp(u * lnx))

        # Height: past the parameter offsets the integrand decays like
        # e^(-pi |v|), so v beyond (dps + 4) ln 10 / pi contributes below
        # the arithmetic noise.  Spacing: the integrand is analytic in
        # the strip |Im v| < 1/2 (Gamma(-u) pole ring at A +- 1/2), so
        # trapezoid aliasing decays like e^(-(2 pi / sp - ln X) * 0.45).
        T = min(height, (dps + 4) * _LN10 / math.pi + im_off + 2.0)
        sp_fine = 2.0 * math.pi / ((dps + 4) * _LN10 / 0.45 + lnx_f)
        sp = mpmath.mpf(min(0.25, 2.0 * sp_fine))
        for _ in range(3):
            if abs(f(T)) + abs(f(-T)) <= mpmath.mpf(10) ** (-4) * abs(f(0.0)) \
                    * mpmath.mpf(10) ** (-dps):
                break
            T *= 1.4
        n = int(math.ceil(T / float(sp)))
        vs = [j * sp for j in range(-n, n + 1)]
        fx = [f(v) for v in vs]
        total = (mpmath.fsum(fx) - 0.5 * (fx[0] + fx[-1])) * sp
        two_pi = 2 * mpmath.pi
        line = total / two_pi
        floor_mp = mpmath.mpf(10) ** (4 - dps)
        converged = False
        gap = math.inf
        for _ in range(6):
            mids = [v + sp / 2 for v in vs[:-1]]
            fmid = [f(v) for v in mids]
            sp = sp / 2
            total = total / 2 + mpmath.fsum(fmid) * sp
            new_line = total / two_pi
            merged = [None] * (len(vs) + len(mids))
            merged[0::2] = vs
            merged[1::2] = mids
            vs = merged
            fx_new = [None] * len(vs)
            fx_new[0::2] = fx
            fx_new[1::2] = fmid
            fx = fx_new
            d_line = abs(new_line - line)
            line = new_line
            bracket = rsum + line
            gap = float(d_line / max(abs(bracket), mpmath.mpf(10) ** -300))
            target = 0.05 * quad.rel_tol * abs(bracket)
            if d_line <= target or d_line <= floor_mp * (gross_mp + abs(line)):
                converged = True
                break
            # The trapezoid error on this analytic strip is C e^(-K/sp),
            # so it squares per halving: when the squared-decay forecast
            # for the value just computed clears the target, the
            # confirmation halving can be skipped.
            scale = max(gross_mp, abs(line))
            if d_line * d_line * 1000 <= 0.1 * target * scale:
                converged = True
                break
        bracket = rsum + line
        gross_all = gross_mp + mpmath.fsum([abs(y) for y in fx]) * sp / two_pi
        noise = 50 * gross_all * mpmath.mpf(10) ** (-dps)
        prec_ok = noise <= 0.1 * quad.rel_tol * abs(bracket)
        if not prec_ok:
            gap = max(gap, float(noise / max(abs(bracket),
                                             mpmath.mpf(10) ** -300)))
        return complex(bracket), converged and prec_ok, gap


def m_limit(s: complex, z: complex, k: float) -> complex:
    """delta -> 0 closed form of the weight -k kernel; Re s < 1/2 + k/2.

    Even in z.  Polar input (either gamma numerator at a nonpositive
    integer) raises; zeros from the denominator gammas are returned
    exactly as 0.
    """
    s, z = complex(s), complex(z)
    k = float(k)
    if not s.real < 0.5 + 0.5 * k:
        raise DomainError(
            f"m_limit needs Re s < 1/2 + k/2 = {0.5 + 0.5 * k:.6g}")
    for w, label in ((s - 0.5 - z, "s - 1/2 - z"), (s - 0.5 + z, "s - 1/2 + z")):
        _, dist = _nearest_nonpos_int(w)
        if dist < 1e-9:
            raise DomainError(f"m_limit polar input: {label} at a "
                              "nonpositive integer")
    val = cmath.exp((1.0 - s) * _LN2 + log_gamma(s - 0.5 - z)
                    + log_gamma(s - 0.5 + z) + log_gamma(1.0 - s + 0.5 * k))
    return val * _rgamma(0.5 + 0.5 * k + z) * _rgamma(0.5 + 0.5 * k - z)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------

def m_residue_s(ell: int, sign: int, z: complex, k: float, delta: float,
                precision: PrecisionConfig | None = None) -> complex:
    """Residue of the kernel in s at s = 1/2 - ell + sign * z.

    Exact formulas: a finite sum plus a short Mellin-Barnes line for the
    +z family, a pure finite sum for the -z family.  Simple-pole regime
    only: z in (1/2)Z, or ell - sign*2z at a nonnegative integer (the two
    families colliding), raises, since the Laurent data of a double pole
    is out of scope.
    """
    quad = _cfg(precision)
    ell = _check_index(ell, "ell")
    sign = _check_sign(sign)
    z = complex(z)
    k = float(k)
    delta = _check_delta(delta)
    two_z = 2.0 * z
    if abs(two_z.imag) < 1e-9 and abs(two_z.real - round(two_z.real)) < 1e-9:
        raise DomainError("z lies in (1/2)Z: simple-pole regime required")
    w = ell - sign * two_z
    if abs(w.imag) < 1e-9 and abs(w.real - round(w.real)) < 1e-9 \
            and round(w.real) >= 0:
        raise DomainError(
            "double pole: ell - sign*2z at a nonnegative integer; "
            "Laurent coefficients are out of scope")
    x_big = 2.0 / delta - 1.0
    lnx = math.log(x_big)

    if sign == -1:
        pref = ((-1) ** ell
                * cmath.exp((z + 0.5) * _LN2 + log_gamma(-ell - two_z)
                            + ell * math.log(2.0 - delta))
                * _rgamma(0.5 - 0.5 * k + z))
        tsum = 0j
        for j in range(ell + 1):
            lg = (log_gamma(0.5 + ell + z - 0.5 * k - j)
                  - math.lgamma(j + 1) - math.lgamma(ell - j + 1)
                  - j * lnx)
            tsum += cmath.exp(lg) * _rgamma(0.5 - 0.5 * k - z - j)
        return pref * tsum

    # +z family: collect the crossed poles of Gamma(-ell + 2z + u), keep
    # the Gamma(1/2 + z - k/2 + u) family entirely left of the line.
    left_edge = 0.5 * k - 0.5 - z.real
    b_line = _pick_mb_line(left_edge, (ell - two_z.real, left_edge))
    big_l = math.floor(ell - two_z.real - b_line)
    pref = ((-1) ** ell
            * cmath.exp((z + 0.5) * _LN2 - math.lgamma(ell + 1))
            * _rgamma(0.5 - 0.5 * k + z))
    sum_pw = cmath.exp((ell - two_z) * math.log(2.0 - delta))
    tsum = 0j
    for j in range(big_l + 1):
        lg = (log_gamma(0.5 + ell - z - 0.5 * k - j)
              + log_gamma(-ell + two_z + j)
              - math.lgamma(j + 1) - j * lnx)
        tsum += (-1) ** j * cmath.exp(lg) * sum_pw * _rgamma(0.5 - 0.5 * k - z - j)
    line_pw = cmath.exp((ell - two_z) * math.log(delta))

    def integrand(u: np.ndarray) -> np.ndarray:
        lg = (log_gamma_array(-ell + two_z + u)
              + log_gamma_array(0.5 + z - 0.5 * k + u)
              + log_gamma_array(-u) + u * lnx)
        return np.exp(lg) * _rgamma_array(0.5 - ell + z - 0.5 * k + u) * line_pw

    height = quad.contour_height + 2.0 * abs(z.imag) + _HEIGHT_MARGIN
    line = line_integral(integrand, b_line, height, quad,
                         min_spacing_hint=0.7 / max(1.0, lnx))
    return pref * (tsum + line)


def m_residue_s_limit(ell: int, sign: int, z: complex, k: float) -> complex:
    """delta -> 0 main term of m_residue_s; the discrepancy at finite
    delta is O(delta)."""
    ell = _check_index(ell, "ell")
    sign = _check_sign(sign)
    z = complex(z)
    k = float(k)
    val = ((-1) ** ell
           * cmath.exp((0.5 + ell - sign * z) * _LN2
                       + log_gamma(0.5 - sign * z - 0.5 * k + ell)
                       + log_gamma(sign * 2.0 * z - ell)
                       - math.lgamma(ell + 1)))
    return val * _rgamma(0.5 - 0.5 * k + z) * _rgamma(0.5 - 0.5 * k - z)


def m_residue_z(m: int, sign: int, s: complex, k: float, delta: float,
                precision: PrecisionConfig | None = None) -> complex:
    """Residue of the kernel in z at z = sign * (s + m - 1/2).

    The -(s + m - 1/2) family is a pure finite sum; the mirror family
    adds a Mellin-Barnes line (possibly with an empty finite sum, when
    no pole is crossed).  Evenness of the kernel in z forces the two to
    negate each other, which the test suite uses as a cross-check.
    """
    quad = _cfg(precision)
    m = _check_index(m, "m")
    sign = _check_sign(sign)
    s = complex(s)
    k = float(k)
    delta = _check_delta(delta)
    w = 2.0 * s + m - 1.0
    if abs(w.imag) < 1e-9 and abs(w.real - round(w.real)) < 1e-9 \
            and round(w.real) <= 0:
        raise DomainError(
            "double pole: 2s + m - 1 at a nonpositive integer makes the "
            "two z-residue families collide; Laurent data out of scope")
    x_big = 2.0 / delta - 1.0
    lnx = math.log(x_big)

    if sign == -1:
        pref = ((-1) ** m
                * cmath.exp((1.0 - s - m) * _LN2 + m * math.log(2.0 - delta)
                            + log_gamma(2.0 * s + m - 1.0))
                * _rgamma(1.0 - s - m - 0.5 * k))
        tsum = 0j
        for j in range(m + 1):
            lg = (log_gamma(1.0 - s - 0.5 * k - j)
                  - math.lgamma(j + 1) - math.lgamma(m - j + 1) - j * lnx)
            tsum += cmath.exp(lg) * _rgamma(s + m - 0.5 * k - j)
        return pref * tsum

    # mirror family: collect crossed poles of Gamma(2s + m - 1 + u), keep
    # the Gamma(s + m - k/2 + u) family left of the line.
    left_edge = 0.5 * k - s.real - m
    b_line = _pick_mb_line(left_edge,
                           (1.0 - 2.0 * s.real - m, left_edge))
    big_l = math.floor(1.0 - 2.0 * s.real - m - b_line)
    pref = -((-1) ** m) * cmath.exp((s + m) * _LN2 - math.lgamma(m + 1)) \
        * _rgamma(s + m - 0.5 * k)
    sum_pw = cmath.exp((1.0 - m - 2.0 * s) * math.log(2.0 - delta))
    tsum = 0j
    for j in range(big_l + 1):
        lg = (log_gamma(1.0 - s - 0.5 * k - j)
              + log_gamma(2.0 * s + m - 1.0 + j)
              - math.lgamma(j + 1) - j * lnx)
        tsum += (-1) ** j * cmath.exp(lg) * sum_pw \
            * _rgamma(1.0 - s - m - 0.5 * k - j)
    line_pw = cmath.exp((1.0 - 2.0 * s - m) * math.log(delta))

    def integrand(u: np.ndarray) -> np.ndarray:
        lg = (log_gamma_array(2.0 * s + m - 1.0 + u)
              + log_gamma_array(s + m - 0.5 * k + u)
              + log_gamma_array(-u) + u * lnx)
        return np.exp(lg) * _rgamma_array(s - 0.5 * k + u) * line_pw

    height = quad.contour_height + 2.0 * abs(s.imag) + _HEIGHT_MARGIN
    line = line_integral(integrand, b_line, height, quad,
                         min_spacing_hint=0.7 / max(1.0, lnx))
    return pref * (tsum + line)


def m_residue_z_limit(m: int, sign: int, s: complex, k: float) -> complex:
    """delta -> 0 main term of m_residue_z; O(delta) discrepancy at
    finite delta.  The sign = +1 value is the negative of the sign = -1
    one (evenness of the kernel in z)."""
    m = _check_index(m, "m")
    sign = _check_sign(sign)
    s = complex(s)
    k = float(k)
    val = ((-1) ** m
           * cmath.exp((1.0 - s) * _LN2 + log_gamma(2.0 * s + m - 1.0)
                       + log_gamma(1.0 - s - 0.5 * k)
                       - math.lgamma(m + 1)))
    val *= _rgamma(1.0 - s - m - 0.5 * k) * _rgamma(s + m - 0.5 * k)
    return -val if sign == 1 else val


# ---------------------------------------------------------------------------
# decay inequality
# ---------------------------------------------------------------------------

def lemma225_gap(v, r, t):
    """Gap of the piecewise-linear exponent inequality used in the
    contour decay bounds.

    Returns (|v| + |r-v| + |r+t-v| - |t-v| + |r-t| - |t|)
    - max(|r|, |v| - |r|); nonnegative for all real inputs.  Accepts
    scalars or broadcastable arrays.
    """
    v_a = np.asarray(v, dtype=np.float64)
    r_a = np.asarray(r, dtype=np.float64)
    t_a = np.asarray(t, dtype=np.float64)
    lhs = (np.abs(v_a) + np.abs(r_a - v_a) + np.abs(r_a + t_a - v_a)
           - np.abs(t_a - v_a) + np.abs(r_a - t_a) - np.abs(t_a))
    rhs = np.maximum(np.abs(r_a), np.abs(v_a) - np.abs(r_a))
    gap = lhs - rhs
    if gap.ndim == 0:
        return float(gap)
    return gap
