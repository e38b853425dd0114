"""Complex special-function kernels with independently cross-checkable routes.

Operations
----------
log_gamma                 principal-branch log Gamma
zeta, completed_zeta      Riemann zeta on Re s > 0 and its completion
bessel_k                  modified Bessel K of complex order
whittaker_w               Whittaker W via Mellin-Barnes contour quadrature
gauss_2f1                 Gauss hypergeometric for real argument x <= 1/2
upper_incomplete_gamma    Gamma(r, x) by continued fraction / series

Every kernel offers at least two genuinely independent evaluation paths
(series vs. continued fraction, power series vs. contour integral, plain
vs. rotated integral representation); the test suite exercises the pairs
against each other.  All routines are pure functions of their arguments
plus an immutable PrecisionConfig and are safe to call concurrently.

Accuracy model: plain binary64 with compensated accumulation.  Target
tolerances are what binary64 quadrature can deliver, roughly 1e-10 or
better on these kernels away from degenerate parameter sets.
"""

from __future__ import annotations

import cmath
import math
import warnings
from fractions import Fraction
from math import fsum

import numpy as np

from ._mellin import (
    clear_of_integers,
    line_integral,
    log_gamma,
    log_gamma_array,
    refine_romberg,
    refine_trapezoid,
)
from .config import DEFAULT_PRECISION, PrecisionConfig
from .errors import AccuracyError, DomainError, MethodError

__all__ = [
    "log_gamma",
    "zeta",
    "completed_zeta",
    "bessel_k",
    "whittaker_w",
    "gauss_2f1",
    "upper_incomplete_gamma",
]

# Bernoulli numbers B_2 .. B_22 as floats; exact rationals, converted once.
_BERNOULLI_EVEN = tuple(
    num / den for num, den in [
        (1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730),
        (7, 6), (-3617, 510), (43867, 798), (-174611, 330), (854513, 138),
    ]
)

# Orders |Im mu| at and beyond which the plain K integrand cancels too
# heavily for binary64 when y < |Im mu|; switch to the rotated contour.
_OSCILLATORY_ORDER = 6.0

# Contour pinch thresholds for whittaker_w, per the degeneracy policy:
# below _PINCH_FLAG the parameters are nudged by _PINCH_PERTURB and the
# result is flagged with a warning; an exact pole collision raises.
_PINCH_FLAG = 1e-3
_PINCH_PERTURB = 1e-6

# a-b distance to the nearest integer below which the 1/x connection
# formula for 2F1 is abandoned in favour of the Mellin-Barnes route.
_CONNECTION_DEGENERACY = 0.05


def _cfg(precision: PrecisionConfig | None) -> PrecisionConfig:
    return DEFAULT_PRECISION if precision is None else precision


def _near_nonpos_int(z: complex, tol: float = 1e-12) -> bool:
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol


def _rgamma(z: complex) -> complex:
    """1 / Gamma(z); zero at the poles instead of raising."""
    if _near_nonpos_int(z):
        return 0.0 + 0.0j
    return cmath.exp(-log_gamma(z))


# ---------------------------------------------------------------------------
# zeta
# ---------------------------------------------------------------------------

def zeta(s: complex, precision: PrecisionConfig | None = None,
         method: str = "euler_maclaurin") -> complex:
    """Riemann zeta on the half plane Re s > 0, s != 1.

    The primary route is Euler-Maclaurin with eleven Bernoulli correction
    terms and a cutoff that grows with |Im s|.  ``method="alternating"``
    selects the independent eta-function acceleration (binomial-weighted
    alternating series), used by the tests as a cross-check; it degrades
    near the zeros of 1 - 2^(1-s) off the real axis and raises MethodError
    there.
    """
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise DomainError("zeta pole at s = 1")
    if s.real <= 0.0:
        raise DomainError("zeta supported on Re s > 0 only")
    if method == "euler_maclaurin":
        return _zeta_euler_maclaurin(s)
    if method == "alternating":
        return _zeta_alternating(s, _cfg(precision))
    raise DomainError(f"unknown zeta method {method!r}")


def _zeta_euler_maclaurin(s: complex) -> complex:
    n_cut = max(16, int(0.9 * abs(s.imag)) + 16)
    ns = np.arange(1, n_cut, dtype=np.float64)
    head_terms = np.exp(-s * np.log(ns))
    head = complex(fsum(head_terms.real), fsum(head_terms.imag))

    log_n = math.log(n_cut)
    total = head + cmath.exp((1.0 - s) * log_n) / (s - 1.0) \
        + 0.5 * cmath.exp(-s * log_n)

    # correction sum: B_{2j}/(2j)! * (s)(s+1)...(s+2j-2) * n^{1-s-2j}
    rising = s
    fact = 2.0
    power = cmath.exp((-s - 1.0) * log_n)
    inv_n2 = math.exp(-2.0 * log_n)
    for j, b2j in enumerate(_BERNOULLI_EVEN, start=1):
        if j > 1:
            rising *= (s + 2 * j - 3) * (s + 2 * j - 2)
            fact *= (2 * j - 1) * (2 * j)
            power *= inv_n2
        total += (b2j / fact) * rising * power
    return total


def _zeta_alternating(s: complex, quad: PrecisionConfig) -> complex:
    denom = 1.0 - cmath.exp((1.0 - s) * math.log(2.0))
    if abs(denom) < 1e-8:
        raise MethodError(
            "alternating route degenerate near a zero of 1 - 2^(1-s)")
    n = 24 + int(math.ceil(0.95 * abs(s.imag)))
    # Chebyshev-weighted coefficients d_k, kept exact; only the final
    # ratio weights (d_n - d_k)/d_n are rounded to binary64
    d = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(n * math.factorial(n + i - 1) * 4 ** i,
                        math.factorial(n - i) * math.factorial(2 * i))
        d.append(acc)
    eta_terms = [
        (-1) ** k * float((d[n] - d[k]) / d[n]) * cmath.exp(-s * math.log(k + 1))
        for k in range(n)
    ]
    eta = complex(fsum(t.real for t in eta_terms),
                  fsum(t.imag for t in eta_terms))
    return eta / denom


def completed_zeta(s: complex, precision: PrecisionConfig | None = None) -> complex:
    """pi^(-s/2) Gamma(s/2) zeta(s); symmetric under s -> 1-s.

    Defined on the whole plane except the poles at s = 0 and s = 1.
    Arguments left of Re s = 0 are continued through the symmetry; on the
    strip both sides are computed directly, which keeps the reflection
    identity a genuine cross-check there.
    """
    s = complex(s)
    if abs(s) < 1e-12:
        raise DomainError("completed zeta pole at s = 0")
    if abs(s - 1.0) < 1e-12:
        raise DomainError("completed zeta pole at s = 1")
    # clear zeta's Re s > 0 cut with a little margin off the axis
    if s.real < 0.05:
        s = 1.0 - s
    pref = cmath.exp(-0.5 * s * math.log(math.pi) + log_gamma(0.5 * s))
    return pref * zeta(s, precision)


# ---------------------------------------------------------------------------
# upper incomplete gamma
# ---------------------------------------------------------------------------

def upper_incomplete_gamma(r: complex, x: float,
                           precision: PrecisionConfig | None = None) -> complex:
    """Gamma(r, x) = integral_x^inf e^(-y) y^(r-1) dy.

    Continued fraction (modified Lentz) for x >= |r| + 2, complement of
    the lower series otherwise.  For x = 0 this is Gamma(r) and requires
    Re r > 0.  When r sits within 1e-3 of a nonpositive integer in the
    series regime, the value is reached by the recurrence
    Gamma(r, x) = (Gamma(r+1, x) - x^r e^(-x)) / r lifted into safe
    territory; accuracy there degrades like eps/dist and the routine
    raises AccuracyError once dist < 1e-8.
    """
    quad = _cfg(precision)
    x = float(x)
    r = complex(r)
    if x < 0.0:
        raise DomainError("upper_incomplete_gamma requires x >= 0")
    if x == 0.0:
        if r.real <= 0.0:
            raise DomainError("Gamma(r, 0) diverges for Re r <= 0")
        return cmath.exp(log_gamma(r))
    if x >= abs(r) + 2.0 and x >= 1.0:
        cf = _gamma_continued_fraction(r, x, quad)
        return cmath.exp(-x + r * math.log(x)) * cf

    dist = abs(r - round(r.real)) if abs(r.imag) < 1e-3 else math.inf
    if r.real < 0.5 and round(r.real) <= 0 and dist < 1e-3:
        if dist < 1e-8:
            raise AccuracyError(
                "Gamma(r, x) too close to a nonpositive integer r for the "
                "series route", achieved=dist, requested=1e-8,
                suggestion="move r off the integer or increase x")
        m = int(math.ceil(1.0 - r.real))
        val = upper_incomplete_gamma(r + m, x, precision)
        for j in range(m, 0, -1):
            rj = r + (j - 1)
            val = (val - cmath.exp(rj * math.log(x) - x)) / rj
        return val
    return cmath.exp(log_gamma(r)) - _lower_gamma_series(r, x, quad)


def _gamma_continued_fraction(r: complex, x: float,
                              quad: PrecisionConfig) -> complex:
    tiny = 1e-300
    b = x + 1.0 - r
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    f = d
    for i in range(1, quad.series_max_terms + 1):
        an = -i * (i - r)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = complex(tiny)
        c = b + an / c
        if abs(c) < tiny:
            c = complex(tiny)
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) < quad.rel_tol:
            return f
    raise AccuracyError("incomplete-gamma continued fraction stalled",
                        achieved=abs(delta - 1.0), requested=quad.rel_tol,
                        suggestion="raise series_max_terms")


def _lower_gamma_series(r: complex, x: float, quad: PrecisionConfig) -> complex:
    ap = r
    term = 1.0 / r
    total = term
    for _ in range(quad.series_max_terms):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * quad.rel_tol:
            return total * cmath.exp(-x + r * math.log(x))
    raise AccuracyError("lower incomplete-gamma series stalled",
                        achieved=abs(term / total), requested=quad.rel_tol,
                        suggestion="raise series_max_terms")


# ---------------------------------------------------------------------------
# Gauss 2F1, real argument
# ---------------------------------------------------------------------------

def gauss_2f1(a: complex, b: complex, c: complex, x: float,
              precision: PrecisionConfig | None = None,
              method: str = "auto") -> complex:
    """Gauss hypergeometric F(a, b; c; x) for real x <= 1/2.

    Route selection (``method="auto"``): power series for |x| <= 1/2, the
    Pfaff transform x -> x/(x-1) for -2 < x < -1/2, and for x <= -2 the
    1/x connection formula, replaced by direct Mellin-Barnes quadrature
    whenever a - b sits within 0.05 of an integer (the connection
    prefactors blow up there).  ``method`` may force "series",
    "connection", or "mb" for cross-validation.

    x in (1/2, 1) is deliberately unsupported, as is complex x.
    """
    quad = _cfg(precision)
    x = float(x)
    a, b, c = complex(a), complex(b), complex(c)
    if _near_nonpos_int(c, 1e-10):
        raise DomainError("gauss_2f1 pole: c is a nonpositive integer")
    if x > 0.5:
        raise DomainError("gauss_2f1 implemented for real x <= 1/2 only")
    if x == 0.0:
        return 1.0 + 0.0j

    # Terminating cases work for any x and short-circuit route selection.
    for p in (a, b):
        if _near_nonpos_int(p, 1e-12):
            return _f21_polynomial(a, b, c, x, int(-round(p.real)))

    if method == "auto":
        if abs(x) <= 0.5:
            method = "series"
        elif x > -2.0:
            method = "pfaff"
        else:
            ab = a - b
            degenerate = (abs(ab.imag) < _CONNECTION_DEGENERACY
                          and abs(ab.real - round(ab.real)) < _CONNECTION_DEGENERACY)
            method = "mb" if degenerate else "connection"

    if method == "series":
        if abs(x) >= 1.0:
            raise MethodError("2F1 series diverges for |x| >= 1")
        return _f21_series(a, b, c, x, quad)
    if method == "pfaff":
        w = x / (x - 1.0)
        return cmath.exp(-a * math.log1p(-x)) * _f21_series(a, c - b, c, w, quad)
    if method == "connection":
        return _f21_connection(a, b, c, x, quad)
    if method == "mb":
        return cmath.exp(log_gamma(c)) * _f21_mb_regularized(a, b, c, x, quad)
    raise DomainError(f"unknown gauss_2f1 method {method!r}")


def _f21_polynomial(a: complex, b: complex, c: complex, x: float,
                    n_end: int) -> complex:
    term = 1.0 + 0.0j
    total = term
    for n in range(n_end):
        term *= (a + n) * (b + n) * x / ((c + n) * (n + 1))
        total += term
    return total


def _f21_series(a: complex, b: complex, c: complex, x: float,
                quad: PrecisionConfig) -> complex:
    term = 1.0 + 0.0j
    total = term
    prev_small = False
    for n in range(quad.series_max_terms):
        term *= (a + n) * (b + n) * x / ((c + n) * (n + 1))
        total += term
        small = abs(term) <= quad.rel_tol * abs(total)
        if small and prev_small:
            return total
        prev_small = small
    raise AccuracyError("2F1 series did not converge",
                        achieved=abs(term) / max(abs(total), 1e-300),
                        requested=quad.rel_tol,
                        suggestion="raise series_max_terms")


def _f21_connection(a: complex, b: complex, c: complex, x: float,
                    quad: PrecisionConfig) -> complex:
    ab = a - b
    if (abs(ab.imag) < 1e-12
            and abs(ab.real - round(ab.real)) < 1e-12):
        raise MethodError("connection formula degenerate: a - b is an integer")
    if x > -2.0:
        raise MethodError("connection formula needs x <= -2")
    lg_c = log_gamma(c)
    log_mx = math.log(-x)
    inv = 1.0 / x
    t1 = cmath.exp(lg_c + log_gamma(b - a) - a * log_mx) \
        * _rgamma(b) * _rgamma(c - a) \
        * _f21_series(a, a - c + 1.0, a - b + 1.0, inv, quad)
    t2 = cmath.exp(lg_c + log_gamma(a - b) - b * log_mx) \
        * _rgamma(a) * _rgamma(c - b) \
        * _f21_series(b, b - c + 1.0, b - a + 1.0, inv, quad)
    return t1 + t2


def _f21_mb_regularized(a: complex, b: complex, c: complex, x: float,
                        quad: PrecisionConfig) -> complex:
    """F(a, b; c; x) / Gamma(c) by Mellin-Barnes quadrature, x < 0.

    The regularized form stays finite as c approaches a nonpositive
    integer (the 1/Gamma(c+t) factor is entire), which is what the closed
    kernel form downstream needs.  Requires Re a > 0 and Re b > 0 so a
    separating vertical line exists.
    """
    if x >= 0.0:
        raise MethodError("Mellin-Barnes 2F1 route needs x < 0")
    if a.real <= 0.0 or b.real <= 0.0:
        raise MethodError(
            "Mellin-Barnes 2F1 route needs Re a > 0 and Re b > 0")
    c0 = -0.5 * min(1.0, a.real, b.real)
    if abs((c.real + c0) - round(c.real + c0)) < 0.05 and abs(c.imag) < 0.05:
        c0 += 0.07  # keep the v = 0 node off zeros of 1/Gamma(c+t)
    log_mx = math.log(-x)
    height = quad.contour_height + abs(a.imag) + abs(b.imag) + abs(c.imag)

    def integrand(t: np.ndarray) -> np.ndarray:
        lg = (log_gamma_array(a + t) + log_gamma_array(b + t)
              + log_gamma_array(-t) - log_gamma_array(c + t))
        return np.exp(lg + t * log_mx)

    spacing_hint = 0.6 / max(1.0, abs(log_mx))
    val = line_integral(integrand, c0, height, quad,
                        min_spacing_hint=spacing_hint)
    return cmath.exp(-log_gamma(a) - log_gamma(b)) * val


# ---------------------------------------------------------------------------
# modified Bessel K
# ---------------------------------------------------------------------------

def bessel_k(mu: complex, y: float,
             precision: PrecisionConfig | None = None) -> complex:
    """K_mu(y) for complex order, y > 0.

    Plain route: the integral of e^(-y cosh t) cosh(mu t), truncated
    adaptively.  For purely imaginary orders mu = i tau with |tau| >= 6
    and y < |tau| the plain integrand cancels to e^(-pi tau / 2) of its
    size, so the evaluation switches to the rotated representation
    e^(pi tau / 2) K_(i tau)(y) = integral of cos(y sinh u - tau u),
    finished along a vertical segment where the phase decays.
    """
    quad = _cfg(precision)
    y = float(y)
    if y <= 0.0:
        raise DomainError("bessel_k requires y > 0")
    mu = complex(mu)
    tau = abs(mu.imag)
    if tau >= _OSCILLATORY_ORDER and abs(mu.real) <= 1e-12 and y < tau:
        return complex(_bessel_k_oscillatory(tau, y, quad))
    return _bessel_k_plain(mu, y, quad)


def _bessel_k_plain(mu: complex, y: float, quad: PrecisionConfig) -> complex:
    # truncate where y (cosh T - 1) - |Re mu| T clears ~43 decades
    t1 = math.acosh(1.0 + 43.0 / y)
    t_max = math.acosh(1.0 + (43.0 + abs(mu.real) * t1) / y)
    h0 = min(0.1, 0.5 / (1.0 + abs(mu.imag)), 0.7 / math.sqrt(1.0 + y))

    def f(t: np.ndarray) -> np.ndarray:
        return np.exp(-y * np.cosh(t)) * np.cosh(mu * t)

    return refine_trapezoid(f, 0.0, t_max, h0, quad.rel_tol)


def _bessel_k_oscillatory(tau: float, y: float, quad: PrecisionConfig) -> float:
    """Rotated-contour evaluation of K_(i tau)(y), tau >= 6 > ... > y."""
    reach = 2.5 * tau + 25.0  # y cosh U at the turn point
    u_turn = math.acosh(reach / y)
    sh, ch = math.sinh(u_turn), math.cosh(u_turn)

    h0 = min(0.05, 0.785 / (reach - tau))

    def phase_part(u: np.ndarray) -> np.ndarray:
        return np.cos(y * np.sinh(u) - tau * u)

    direct = refine_romberg(phase_part, 0.0, u_turn, h0, quad.rel_tol,
                            abs_floor=1.0)

    # vertical continuation u = u_turn + i v; the horizontal remainder at
    # v_max is below e^-30 by the choice of `reach`
    v_max = math.acos(min(1.0 - 1e-12, 2.0 * tau / reach))

    def vertical(v: np.ndarray) -> np.ndarray:
        amp = np.exp(-y * ch * np.sin(v) + tau * v)
        return -amp * np.sin(y * sh * np.cos(v) - tau * u_turn)

    segment = refine_romberg(vertical, 0.0, v_max, v_max / 200.0,
                             quad.rel_tol, abs_floor=1.0)
    return (direct.real + segment.real) * math.exp(-0.5 * math.pi * tau)


def _bessel_k_grid(mu: complex, ys: np.ndarray,
                   quad: PrecisionConfig) -> np.ndarray:
    """Vectorized plain-route K_mu over a grid of arguments.

    Entries that fall in the heavy-cancellation regime (imaginary order
    |tau| >= 6 with y < tau) are recomputed individually through the
    rotated representation.
    """
    ys = np.asarray(ys, dtype=np.float64)
    if np.any(ys <= 0.0):
        raise DomainError("bessel_k requires y > 0")

    # the heavy-cancellation entries never converge on the real axis, so
    # they must be kept out of the shared refinement, not just patched
    # afterwards
    tau = abs(mu.imag)
    osc = np.zeros(ys.shape, dtype=bool)
    if tau >= _OSCILLATORY_ORDER and abs(mu.real) <= 1e-12:
        osc = ys < tau
    total = np.zeros(ys.shape, dtype=np.complex128)

    plain = ys[~osc]
    if plain.size:
        y_min = float(np.min(plain))
        t1 = math.acosh(1.0 + 43.0 / y_min)
        t_max = math.acosh(1.0 + (43.0 + abs(mu.real) * t1) / y_min)
        h0 = min(0.1, 0.5 / (1.0 + abs(mu.imag)),
                 0.7 / math.sqrt(1.0 + float(np.max(plain))))

        n = max(8, int(math.ceil(t_max / h0)))
        t = np.linspace(0.0, t_max, n + 1)
        spacing = t_max / n
        ch = np.cosh(t)
        hyp = np.cosh(mu * t)
        mat = np.exp(-np.outer(plain, ch)) * hyp[None, :]
        part = mat.sum(axis=1) - 0.5 * (mat[:, 0] + mat[:, -1])
        part = part * spacing
        for _ in range(10):
            mid = t[:-1] + 0.5 * spacing
            ch_m = np.cosh(mid)
            hyp_m = np.cosh(mu * mid)
            mat_m = np.exp(-np.outer(plain, ch_m)) * hyp_m[None, :]
            spacing *= 0.5
            new_part = 0.5 * part + mat_m.sum(axis=1) * spacing
            t = np.sort(np.concatenate([t, mid]))
            err = np.max(np.abs(new_part - part)
                         / np.maximum(np.abs(new_part), 1e-300))
            part = new_part
            if err <= quad.rel_tol:
                break
        else:
            raise AccuracyError("bessel_k grid quadrature stalled",
                                achieved=float(err), requested=quad.rel_tol,
                                suggestion="loosen rel_tol")
        total[~osc] = part

    for i in np.nonzero(osc)[0]:
        total[i] = _bessel_k_oscillatory(tau, float(ys[i]), quad)
    return total


# ---------------------------------------------------------------------------
# Whittaker W
# ---------------------------------------------------------------------------

def whittaker_w(kappa: float, mu: complex, y: float,
                precision: PrecisionConfig | None = None) -> complex:
    """W_(kappa, mu)(y) by Mellin-Barnes contour quadrature, y > 0.

    The contour sits midway between the pole family of Gamma(u - kappa)
    and the two families of Gamma(1/2 +- mu - u) whenever a separating
    vertical line exists; otherwise the line is placed right of the
    kappa family and the right-family poles it crosses are added back as
    residue terms.  When 1/2 +- mu - kappa is a nonpositive integer the
    function terminates and is evaluated exactly as e^(-y/2) y^(1/2+mu)
    times a generalized Laguerre polynomial.

    Near-degenerate contours (gap below 1e-3) are evaluated at
    parameters nudged by 1e-6 and flagged with a RuntimeWarning; exact
    pole collisions raise MethodError so the caller can retry with its
    own perturbation.
    """
    quad = _cfg(precision)
    y = float(y)
    if y <= 0.0:
        raise DomainError("whittaker_w requires y > 0")
    out = _whittaker_core(float(kappa), complex(mu),
                          np.array([y]), quad, allow_rotated=True)
    return complex(out[0])


def _whittaker_w_grid(kappa: float, mu: complex, ys: np.ndarray,
                      quad: PrecisionConfig,
                      scaled: bool = False) -> np.ndarray:
    """Vectorized W_(kappa, mu) over an argument grid, one shared contour.

    Grid evaluation skips the large-order contour shift (its trigger is
    argument-dependent); grid consumers keep |Im mu| small.

    ``scaled=True`` returns e^(y/2) W_(kappa, mu)(y), which stays
    representable for arguments far beyond the underflow point of W
    itself; callers that damp by their own e^(-y/2)-type factor need the
    scaled form to avoid 0 * inf at large y.
    """
    ys = np.asarray(ys, dtype=np.float64)
    if np.any(ys <= 0.0):
        raise DomainError("whittaker_w requires y > 0")
    return _whittaker_core(float(kappa), complex(mu), ys, quad,
                           allow_rotated=False, scaled=scaled)


def _whittaker_core(kappa: float, mu: complex, ys: np.ndarray,
                    quad: PrecisionConfig, allow_rotated: bool,
                    scaled: bool = False) -> np.ndarray:
    # W is even in mu; canonicalize to Re mu >= 0
    if mu.real < 0.0 or (mu.real == 0.0 and mu.imag < 0.0):
        mu = -mu

    for signed in (mu, -mu):
        p = 0.5 + signed - kappa
        if abs(p.imag) < 1e-10 and abs(p.real - round(p.real)) < 1e-10 \
                and round(p.real) <= 0:
            return _whittaker_terminating(kappa, signed,
                                          int(-round(p.real)), ys, scaled)

    if abs(mu.imag) < 1e-12:
        # real mu, non-terminating: an integer 1/2 +- mu - kappa > 0 means
        # a right-family pole lands exactly on a left-family pole
        for signed in (mu.real, -mu.real):
            p = 0.5 + signed - kappa
            if abs(p - round(p)) < 1e-9 and round(p) >= 1:
                raise MethodError(
                    "whittaker_w contour degenerate: pole collision at "
                    f"kappa={kappa}, mu={mu}")

    right_min = 0.5 - mu.real
    gap = right_min - kappa
    if 0.0 < gap < _PINCH_FLAG:
        warnings.warn(
            f"whittaker_w contour gap {gap:.2e} below {_PINCH_FLAG}; "
            f"parameters perturbed by {_PINCH_PERTURB} and result flagged",
            RuntimeWarning, stacklevel=3)
        mu = mu - _PINCH_PERTURB  # widen the gap
        right_min = 0.5 - mu.real
        gap = right_min - kappa

    y_max = float(np.max(ys))
    rotated = (allow_rotated and gap >= _PINCH_FLAG
               and abs(mu.imag) >= _OSCILLATORY_ORDER
               and mu.real <= 0.25 and kappa <= 0.4
               and y_max < 0.5 * math.pi * abs(mu.imag) - 5.0)

    if rotated:
        n_cross = int(math.ceil(y_max)) + 2
        c = _clear_line(right_min + n_cross + 0.4, kappa, mu)
    elif gap >= _PINCH_FLAG:
        c = 0.5 * (kappa + right_min)
    else:
        # no separating line: shift right of the kappa family and add the
        # crossed right-family poles back as residues
        c = _clear_line(kappa + 0.5, kappa, mu)

    crossed: list[tuple[int, int]] = []
    for sign in (1, -1):
        base = 0.5 + sign * mu.real
        r = 0
        while base + r < c:
            crossed.append((sign, r))
            r += 1

    log_norm = log_gamma(0.5 + mu - kappa) + log_gamma(0.5 - mu - kappa)
    for sign, r in crossed:
        smu = mu if sign == 1 else -mu
        if _near_nonpos_int(-2.0 * smu - r, 1e-9):
            raise MethodError(
                "whittaker_w residue factor Gamma(-2 mu - r) degenerate at "
                f"mu={mu}, r={r}")
        u_star = 0.5 + smu + r
        if _near_nonpos_int(u_star - kappa, 1e-9):
            raise MethodError(
                "whittaker_w double pole: crossed pole meets the kappa "
                f"family at u={u_star}")

    log_ys = np.log(ys)
    total = _whittaker_line(kappa, mu, c, log_ys, quad, log_norm)
    for sign, r in crossed:
        smu = mu if sign == 1 else -mu
        coeff = cmath.exp(log_gamma(r + 0.5 + smu - kappa)
                          + log_gamma(-2.0 * smu - r) - log_norm)
        coeff *= (-1) ** r / math.factorial(r)
        total = total + coeff * np.exp((0.5 + smu + r) * log_ys)
    if scaled:
        return total
    return np.exp(-0.5 * ys) * total


def _clear_line(c0: float, kappa: float, mu: complex) -> float:
    anchors = (0.5 + mu.real, 0.5 - mu.real)
    c = clear_of_integers(c0, anchors)
    if c <= kappa + 0.05:
        raise MethodError("whittaker_w could not place a clear contour line")
    return c


def _whittaker_line(kappa: float, mu: complex, c: float, log_ys: np.ndarray,
                    quad: PrecisionConfig, log_norm: complex) -> np.ndarray:
    """(1/2 pi i) integral of the normalized Gamma kernel times y^u."""
    height = quad.contour_height * 0.5 + abs(mu.imag) + 8.0
    spacing = 1.0 / quad.quad_points
    ly_span = float(np.max(np.abs(log_ys)))
    if ly_span > 1.0:
        spacing = min(spacing, 0.6 / ly_span)

    def gamma_part(v: np.ndarray) -> np.ndarray:
        u = c + 1j * v
        return (log_gamma_array(u - kappa) + log_gamma_array(0.5 - mu - u)
                + log_gamma_array(0.5 + mu - u) - log_norm)

    def accumulate(v: np.ndarray, lg: np.ndarray) -> np.ndarray:
        # sum_j exp(lg_j + u_j * ln y), chunked to bound memory
        out = np.zeros(log_ys.size, dtype=np.complex128)
        for start in range(0, v.size, 1024):
            vv = v[start:start + 1024]
            block = np.exp(lg[start:start + 1024, None]
                           + np.outer(c + 1j * vv, log_ys))
            out += block.sum(axis=0)
        return out

    for _ in range(4):
        n = int(math.ceil(height / spacing))
        v = np.linspace(-n * spacing, n * spacing, 2 * n + 1)
        lg = gamma_part(v)
        peak = float(np.max(lg.real))
        edge = max(lg.real[0], lg.real[-1])
        if edge <= peak + math.log(max(quad.rel_tol * 1e-2, 1e-300)):
            break
        height *= 1.6
    else:
        raise AccuracyError("whittaker_w contour not decayed at truncation",
                            achieved=math.exp(edge - peak),
                            requested=quad.rel_tol,
                            suggestion="increase contour_height")

    vals = accumulate(v, lg)
    ends = (np.exp(lg[0] + (c + 1j * v[0]) * log_ys)
            + np.exp(lg[-1] + (c + 1j * v[-1]) * log_ys))
    total = (vals - 0.5 * ends) * spacing
    scale_floor = np.exp(peak + c * log_ys) * spacing
    for _ in range(10):
        mid = v[:-1] + 0.5 * spacing
        lg_mid = gamma_part(mid)
        mid_vals = accumulate(mid, lg_mid)
        spacing *= 0.5
        new_total = 0.5 * total + mid_vals * spacing
        merged_v = np.empty(v.size + mid.size)
        merged_v[0::2] = v
        merged_v[1::2] = mid
        merged_lg = np.empty(lg.size + lg_mid.size, dtype=np.complex128)
        merged_lg[0::2] = lg
        merged_lg[1::2] = lg_mid
        v, lg = merged_v, merged_lg
        scale = np.maximum(np.abs(new_total), scale_floor)
        err = float(np.max(np.abs(new_total - total) / scale))
        total = new_total
        scale_floor = scale_floor * 0.5
        if err <= quad.rel_tol:
            return total / (2.0 * math.pi)
    raise AccuracyError("whittaker_w contour quadrature stalled",
                        achieved=err, requested=quad.rel_tol,
                        suggestion="raise quad_points or loosen rel_tol")


def _whittaker_terminating(kappa: float, mu: complex, n: int,
                           ys: np.ndarray, scaled: bool = False) -> np.ndarray:
    """Exact terminating case: 1/2 + mu - kappa = -n with n >= 0.

    W = e^(-y/2) y^(1/2+mu) (-1)^n n! L_n^(2 mu)(y) via the confluent
    second-kind reduction to generalized Laguerre polynomials.
    """
    alpha = 2.0 * mu
    # binomial C(n + alpha, n - i) through a pole-free finite product
    coeffs = []
    for i in range(n + 1):
        binom = 1.0 + 0.0j
        for j in range(1, (n - i) + 1):
            binom *= (alpha + i + j) / j
        coeffs.append((-1) ** i * binom / math.factorial(i))
    poly = np.zeros(ys.shape, dtype=np.complex128)
    for coeff in reversed(coeffs):
        poly = poly * ys + coeff
    pref = (-1) ** n * math.factorial(n)
    damp = 0.0 if scaled else 0.5
    return pref * np.exp(-damp * ys + (0.5 + mu) * np.log(ys)) * poly
