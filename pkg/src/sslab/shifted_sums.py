"""Shifted convolution Dirichlet series and their cross-checks.

The series here couple holomorphic-form coefficients at shifted indices
against a second coefficient stream (another holomorphic form, a Maass
form, or a generalized divisor weight).  Everything is evaluated by
truncated summation inside the region of absolute convergence, with a
rigorous divisor-bound tail certificate attached to each value.  On top
of the plain evaluators sit four identity checks that recompute the same
quantity through an unrelated pipeline: spectral expansion over a Maass
dataset, Rankin-Selberg unfolding against a Poincare series, a binomial
rearrangement of the double series, and a Mellin-Barnes contour form of
the finite-shift sum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._mellin import line_integral, log_gamma
from .config import DEFAULT_PRECISION, PrecisionConfig
from .errors import AccuracyError, DomainError
from .modforms import (CoefficientTable, MaassFormData, divisor_sigma,
                       eisenstein_grid, holo_pair_density, maass_grid,
                       petersson_inner, poincare_grid)
from .specfun import completed_zeta, gauss_2f1, zeta

__all__ = [
    "SeriesValue",
    "ShiftedSeriesSpec",
    "ZSpec",
    "SpectralParts",
    "RearrangementReport",
    "d_series",
    "d_plus_smoothed",
    "d_minus_spectral",
    "unfolding_check",
    "z_plus_truncated",
    "rearrangement_check",
    "finite_shift_contour_check",
    "beta_contour_identity",
]

# Kim-Sarnak exponent: |lambda(m)| <= d(m) m^(7/64) for SL2(Z) Maass forms.
_MAASS_GAP = 7.0 / 64.0


def _cfg(precision: PrecisionConfig | None) -> PrecisionConfig:
    return DEFAULT_PRECISION if precision is None else precision


class SeriesValue(complex):
    """Complex series value carrying a certified truncation bound.

    ``tail_bound`` is an absolute bound on the dropped tail of the
    infinite series, derived from |A(n)| <= d(n) and divisor-sum
    estimates.  The value behaves as a plain complex number everywhere
    else.
    """

    tail_bound: float

    def __new__(cls, value: complex, tail_bound: float) -> "SeriesValue":
        obj = super().__new__(cls, complex(value).real, complex(value).imag)
        obj.tail_bound = float(tail_bound)
        return obj

    def __repr__(self) -> str:
        return (f"SeriesValue({complex(self)!r}, "
                f"tail_bound={self.tail_bound:.3e})")


# ---------------------------------------------------------------------------
# certified tails
# ---------------------------------------------------------------------------

_SIGMA0_GRID = (1.06, 1.12, 1.2, 1.3, 1.45, 1.6, 1.8)


def _sigma0_candidates(sigma: float) -> list[float]:
    cands = [s0 for s0 in _SIGMA0_GRID if s0 < sigma - 1e-9]
    mid = 0.5 * (1.0 + sigma)
    if 1.0 < mid < sigma - 1e-9:
        cands.append(mid)
    return cands


def _square_divisor_tail(n_from: int, sigma: float) -> float:
    """Bound sum_{m > n_from} d(m)^2 m^(-sigma) by Rankin's trick.

    The full Dirichlet series of d(m)^2 at abscissa sigma0 < sigma equals
    zeta(sigma0)^4 / zeta(2 sigma0); shifting each term from sigma to
    sigma0 multiplies it by m^(sigma0-sigma) <= n_from^(sigma0-sigma),
    and restoring the dropped head only decreases the sum.
    """
    n_from = max(n_from, 1)
    best = math.inf
    for s0 in _sigma0_candidates(sigma):
        c = (zeta(complex(s0)) ** 4 / zeta(complex(2.0 * s0))).real
        best = min(best, c * n_from ** (s0 - sigma))
    return best


def _square_divisor_full(sigma: float) -> float:
    # d(1)^2 = 1 plus the certified remainder from m > 1.
    return 1.0 + _square_divisor_tail(1, sigma)


def _suggest_truncation(sigma: float, target_abs: float) -> float:
    best = math.inf
    for s0 in _sigma0_candidates(sigma):
        c = (zeta(complex(s0)) ** 4 / zeta(complex(2.0 * s0))).real
        if target_abs <= 0.0:
            continue
        best = min(best, (c / target_abs) ** (1.0 / (sigma - s0)))
    return best


def _series_tail(spec: "ShiftedSeriesSpec") -> float:
    """Absolute bound on the dropped m > n_max tail of the series."""
    sigma = _effective_abscissa(spec)
    h, n = spec.h, spec.n_max
    p = (spec.left.weight - 1) / 2.0
    if spec.kind == "minus":
        lo = max(n, h)
        t_shift = _square_divisor_full(sigma) if lo - h < 1 \
            else _square_divisor_tail(lo - h, sigma)
        return math.sqrt(t_shift) * math.sqrt(_square_divisor_tail(lo, sigma))
    grow = (1.0 + h / max(n, 1)) ** (p + sigma)
    return grow * math.sqrt(_square_divisor_tail(n + h, sigma)) \
        * math.sqrt(_square_divisor_tail(n, sigma))


def _effective_abscissa(spec: "ShiftedSeriesSpec") -> float:
    """Re s minus the coefficient-growth loss of the right factor."""
    sigma = spec.s.real
    if isinstance(spec.right, MaassFormData):
        sigma -= _MAASS_GAP
    elif not isinstance(spec.right, CoefficientTable):
        sigma -= abs(complex(spec.right).real)
    return sigma


# ---------------------------------------------------------------------------
# series specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShiftedSeriesSpec:
    """One truncated shifted convolution series.

    kind "minus" couples a(m-h) against the right weight at m and starts
    at m = h+1; kind "plus" couples a(m+h) and starts at m = 1.  The
    right factor is a second coefficient table (minus only), a Maass
    form, or a complex divisor parameter u standing for the weight
    sigma_{2u}(m) m^(-u).
    """

    kind: str
    left: CoefficientTable
    right: CoefficientTable | MaassFormData | complex
    s: complex
    h: int
    n_max: int

    def __post_init__(self) -> None:
        if self.kind not in ("minus", "plus"):
            raise DomainError(f"kind must be 'minus' or 'plus', got {self.kind!r}")
        if not isinstance(self.h, int) or self.h < 1:
            raise DomainError("shift h must be a positive integer")
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise DomainError("truncation n_max must be a positive integer")
        object.__setattr__(self, "s", complex(self.s))
        if isinstance(self.right, CoefficientTable):
            if self.kind == "plus":
                raise DomainError(
                    "plus kind is defined against a Maass or divisor right "
                    "factor, not a second holomorphic table")
            if self.right.weight != self.left.weight:
                raise DomainError("left and right tables must share a weight")
        elif not isinstance(self.right, MaassFormData):
            object.__setattr__(self, "right", complex(self.right))


@dataclass(frozen=True)
class ZSpec:
    """Parameters of the truncated double shifted series.

    Both indices run to n_max; the derived second variable
    ``w2`` = s + w + k/2 - 1 locates the spec in the absolute-convergence
    region of the double sum.
    """

    left: CoefficientTable
    right: MaassFormData | complex
    s: complex
    w: complex
    n_max: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise DomainError("truncation n_max must be a positive integer")
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "w", complex(self.w))
        if isinstance(self.right, CoefficientTable):
            raise DomainError(
                "double series couples a(m+h); right factor must be a Maass "
                "form or divisor parameter")
        if not isinstance(self.right, MaassFormData):
            object.__setattr__(self, "right", complex(self.right))

    @property
    def w2(self) -> complex:
        return self.s + self.w + self.left.weight / 2.0 - 1.0


# ---------------------------------------------------------------------------
# deterministic reduction
# ---------------------------------------------------------------------------

_BLOCK = 4096


def _block_sum(values: np.ndarray) -> complex:
    """Fixed-block reduction: per-block vector sums, exact accumulation of
    the block partials in index order.  Independent of thread count."""
    re = [float(np.sum(values.real[i:i + _BLOCK]))
          for i in range(0, len(values), _BLOCK)]
    if np.iscomplexobj(values):
        im = [float(np.sum(values.imag[i:i + _BLOCK]))
              for i in range(0, len(values), _BLOCK)]
    else:
        im = []
    return complex(math.fsum(re), math.fsum(im))


# ---------------------------------------------------------------------------
# right-factor weights
# ---------------------------------------------------------------------------

def _tau_weights(u: complex, n_top: int) -> np.ndarray:
    # sigma_{2u}(m) m^(-u) for m = 1..n_top by a sieve over divisors.
    acc = np.zeros(n_top, dtype=np.complex128)
    for d in range(1, n_top + 1):
        acc[d - 1::d] += cmath.exp(2.0 * u * math.log(d))
    m = np.arange(1, n_top + 1, dtype=np.float64)
    return acc * np.exp(-u * np.log(m))


def _right_values(spec: ShiftedSeriesSpec | ZSpec, n_top: int) -> np.ndarray:
    """conj(right weight) at m = 1..n_top."""
    right = spec.right
    if isinstance(right, CoefficientTable):
        if n_top > right.length:
            raise DomainError(
                f"right table covers {right.length} coefficients, "
                f"truncation needs {n_top}")
        return right.normalized[:n_top].astype(np.complex128)
    if isinstance(right, MaassFormData):
        if n_top > len(right.lam):
            raise DomainError(
                f"Maass coefficient data stops at m = {len(right.lam)}, "
                f"truncation needs {n_top}; lower n_max or supply a longer "
                f"dataset file")
        return np.asarray(right.lam[:n_top], dtype=np.complex128)
    return np.conj(_tau_weights(right, n_top))


def _maass_right_cap(spec: ZSpec) -> int:
    if isinstance(spec.right, MaassFormData):
        return min(spec.n_max, len(spec.right.lam))
    return spec.n_max


# ---------------------------------------------------------------------------
# truncated evaluators
# ---------------------------------------------------------------------------

def d_series(spec: ShiftedSeriesSpec,
             precision: PrecisionConfig | None = None,
             certify: bool = False) -> SeriesValue:
    """Truncated shifted convolution series with a certified tail bound.

    Evaluates sum over m of a(m -+ h) conj(weight(m)) / m^(s + ...) up to
    m = n_max, in the normalization where the minus kind carries exponent
    s + k - 1 on m and the plus kind s + (k-1)/2.  The result is a
    ``SeriesValue`` whose ``tail_bound`` is rigorous but pessimistic: it
    uses only |A(n)| <= d(n), so near the edge of convergence it exceeds
    the actual tail by orders of magnitude.

    With ``certify=True`` the bound is compared against
    rel_tol * |value| and an AccuracyError carrying a sufficient
    truncation is raised when it fails; the default returns the value
    with the bound attached and leaves the comparison to the caller.
    """
    quad = _cfg(precision)
    sigma = _effective_abscissa(spec)
    if sigma <= 1.0:
        raise DomainError(
            f"series diverges: effective abscissa {sigma:.4f} <= 1 "
            f"(Re s = {spec.s.real}, right-factor loss "
            f"{spec.s.real - sigma:.4f})")
    s, h, n_max = spec.s, spec.h, spec.n_max
    p = (spec.left.weight - 1) / 2.0
    bound = _series_tail(spec)

    if spec.kind == "minus" and n_max <= h:
        value = 0.0j
    elif spec.kind == "minus":
        if n_max - h > spec.left.length:
            raise DomainError(
                f"left table covers {spec.left.length} coefficients, "
                f"minus series needs a(m-h) up to {n_max - h}")
        wt = _right_values(spec, n_max)
        m = np.arange(h + 1, n_max + 1, dtype=np.float64)
        a_left = spec.left.normalized[:n_max - h]
        terms = a_left * wt[h:] * (1.0 - h / m) ** p * np.exp(-s * np.log(m))
        value = _block_sum(terms)
    else:
        if n_max + h > spec.left.length:
            raise DomainError(
                f"left table covers {spec.left.length} coefficients, "
                f"plus series needs a(m+h) up to {n_max + h}")
        wt = _right_values(spec, n_max)
        m = np.arange(1, n_max + 1, dtype=np.float64)
        a_left = spec.left.normalized[h:n_max + h]
        terms = a_left * wt * (1.0 + h / m) ** p * np.exp(-s * np.log(m))
        value = _block_sum(terms)

    if certify and bound > quad.rel_tol * max(abs(value), 1e-300):
        target = quad.rel_tol * max(abs(value), 1e-300)
        need = _suggest_truncation(sigma, target)
        raise AccuracyError(
            f"certified tail {bound:.3e} exceeds rel_tol*|value| = "
            f"{target:.3e} at n_max = {spec.n_max}",
            achieved=bound / max(abs(value), 1e-300),
            requested=quad.rel_tol,
            suggestion=f"n_max >= {need:.3e} would certify at this abscissa")
    return SeriesValue(value, bound)


def _smoothing_factor(s: complex, k: int, t: float, h: int,
                      delta: float, m: int,
                      quad: PrecisionConfig) -> complex:
    # (1 + dh/2m)^(-(s+(k-1)/2+it)) * 2F1(s+(k-1)/2+it, (1-k)/2+it; s; x)
    # with x = hd/(2m+hd); at delta = 0 both factors are exactly 1.
    if delta == 0.0:
        return 1.0 + 0.0j
    p = (k - 1) / 2.0
    a = s + p + 1j * t
    b = (1.0 - k) / 2.0 + 1j * t
    u = delta * h / (2.0 * m)
    x = delta * h / (2.0 * m + delta * h)
    return cmath.exp(-a * math.log1p(u)) * gauss_2f1(a, b, s, x, quad)


def d_plus_smoothed(f: CoefficientTable, maass: MaassFormData,
                    s: complex, h: int, delta: float, n_max: int,
                    precision: PrecisionConfig | None = None) -> SeriesValue:
    """Delta-smoothed plus series against a Maass right factor.

    Each term of the plus series is damped by the product of
    (1 + delta h/2m)^(-(s+(k-1)/2+it)) and a Gauss hypergeometric factor
    evaluated at delta h/(2m + delta h); as delta -> 0 the damping tends
    to 1 linearly in delta and the series tends to ``d_series``.
    """
    quad = _cfg(precision)
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta must lie in [0, 1), got {delta}")
    s = complex(s)
    spec = ShiftedSeriesSpec("plus", f, maass, s, h, n_max)
    sigma = _effective_abscissa(spec)
    if sigma <= 1.0:
        raise DomainError(f"series diverges: effective abscissa {sigma:.4f} <= 1")
    p = (f.weight - 1) / 2.0
    if n_max + h > f.length:
        raise DomainError(
            f"left table covers {f.length} coefficients, series needs "
            f"a(m+h) up to {n_max + h}")
    wt = _right_values(spec, n_max)
    m = np.arange(1, n_max + 1, dtype=np.float64)
    a_left = f.normalized[h:n_max + h]
    damp = np.array([_smoothing_factor(s, f.weight, maass.t, h, delta, mi, quad)
                     for mi in range(1, n_max + 1)])
    terms = a_left * wt * (1.0 + h / m) ** p * np.exp(-s * np.log(m)) * damp
    value = _block_sum(terms)
    # Dropped terms carry a damping factor of modulus 1 + O(delta h / m);
    # 1.5 covers every delta < 1 at m > n_max >= h.
    return SeriesValue(value, 1.5 * _series_tail(spec))


# ---------------------------------------------------------------------------
# spectral expansion of the minus series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralParts:
    """Breakdown of a spectral evaluation.

    ``discrete_terms`` and ``continuous`` are the bracket contributions
    before multiplication by ``prefactor``;
    total = prefactor * (sum(discrete_terms) + continuous).
    ``reach_bound`` estimates the discrete mass above the dataset's top
    eigenvalue.
    """

    total: complex
    prefactor: complex
    discrete_terms: tuple[complex, ...]
    continuous: complex
    reach_bound: float


def _gamma_pair(s: complex, t: float) -> complex:
    return cmath.exp(log_gamma(s - 0.5 + 1j * t) + log_gamma(s - 0.5 - 1j * t))


def d_minus_spectral(f1: CoefficientTable, f2: CoefficientTable,
                     s: complex, h: int,
                     dataset: list[MaassFormData],
                     precision: PrecisionConfig | None = None,
                     spacing: float = 0.25,
                     enforce_reach: bool = True,
                     return_parts: bool = False) -> complex | SpectralParts:
    """Minus series reassembled from the spectral side.

    Expands the Poincare inner product over the Maass dataset plus the
    continuous Eisenstein integral on the critical line and divides out
    the unfolding normalization, so the result is directly comparable to
    ``d_series`` with kind "minus".  The two pipelines share no series
    code; their agreement is the module's main cross-check.

    Parameters
    ----------
    dataset:
        Validated Maass forms.  Spectral completeness up to the top
        eigenvalue is the caller's responsibility; the paired gamma
        factors suppress missing forms above t_max like e^(-pi t), and
        the estimated size of the first missing term is checked against
        rel_tol unless ``enforce_reach`` is False.
    spacing:
        Node spacing of the continuous-spectrum trapezoid; the integral
        truncates at |Im s| + 12.
    return_parts:
        Return a ``SpectralParts`` breakdown instead of the bare value.
    """
    quad = _cfg(precision)
    s = complex(s)
    if s.real <= 0.75:
        raise DomainError(f"spectral expansion needs Re s > 0.75, got {s.real}")
    if f1.weight != f2.weight:
        raise DomainError("forms must share a weight")
    k = f1.weight
    density = holo_pair_density(f2, f1)

    terms = []
    scale = 0.0
    for form in dataset:
        if h > len(form.lam):
            raise DomainError(
                f"dataset form t = {form.t} has coefficients only to "
                f"m = {len(form.lam)}; shift h = {h} is out of reach")
        inner = petersson_inner(density, maass_grid(form, quad), quad)
        phase = 1.0 if form.parity == "even" else 1.0j
        terms.append(phase * 0.5 * form.rho1 * float(form.lam[h - 1])
                     * _gamma_pair(s, form.t) * inner.conjugate())
        scale = max(scale, 0.5 * form.rho1 * abs(inner))
    discrete = complex(math.fsum(t.real for t in terms),
                       math.fsum(t.imag for t in terms))

    t_cut = abs(s.imag) + 12.0
    folded = s.imag == 0.0

    def node(t: float) -> complex:
        tau = divisor_sigma(2j * t, h) * cmath.exp(-1j * t * math.log(h))
        grid = eisenstein_grid(0, 0.5 + 1j * t, "completed", quad)
        inner = petersson_inner(density, grid, quad)
        xi = completed_zeta(1.0 + 2j * t)
        return tau * _gamma_pair(s, t) * inner.conjugate() \
            / (xi * xi.conjugate())

    vals = []
    j = 1
    while j * spacing <= t_cut:
        t = j * spacing
        if folded:
            vals.append(2.0 * node(t))
        else:
            vals.append(node(t) + node(-t))
        j += 1
    continuous = spacing * complex(math.fsum(v.real for v in vals),
                                   math.fsum(v.imag for v in vals)) \
        / (4.0 * math.pi)

    t_top = max((form.t for form in dataset), default=0.0)
    t_next = t_top + 0.35
    # Envelope of the first missing discrete term: paired gammas at the
    # next eigenvalue, the largest observed rho1-weighted inner product
    # as the coefficient scale, and a linear eigenvalue-density factor.
    reach_bound = abs(_gamma_pair(s, t_next)) * max(scale, 1.0) \
        * (t_next / 6.0 + 1.0)
    bracket = discrete + continuous
    if enforce_reach and reach_bound > quad.rel_tol * abs(bracket):
        raise AccuracyError(
            f"dataset reaches t = {t_top:.3f}; first missing term's "
            f"e^(-pi t) envelope is {reach_bound:.3e} against bracket "
            f"{abs(bracket):.3e}",
            achieved=reach_bound / max(abs(bracket), 1e-300),
            requested=quad.rel_tol,
            suggestion="extend the dataset or relax rel_tol "
                       "(enforce_reach=False skips this check)")

    prefactor = cmath.exp(k * math.log(4.0 * math.pi)
                          + (0.5 - s) * math.log(h)
                          - log_gamma(s + k - 1.0) - log_gamma(s))
    total = prefactor * bracket
    if return_parts:
        return SpectralParts(total=total, prefactor=prefactor,
                             discrete_terms=tuple(terms),
                             continuous=continuous,
                             reach_bound=reach_bound)
    return total


def unfolding_check(f1: CoefficientTable, f2: CoefficientTable,
                    s: complex, h: int,
                    precision: PrecisionConfig | None = None,
                    window: float = 40.0,
                    n_series: int = 4000) -> tuple[complex, complex]:
    """Both sides of the Poincare unfolding identity.

    Left: Petersson inner product of the weight-0 Poincare series at
    shift h against the pair density of f1, f2, by direct quadrature over
    the fundamental domain with a windowed coset sum.  Right: the minus
    series times Gamma(s+k-1) (4 pi)^(-(s+k-1)).  Returns the pair
    (left, right); agreement is limited by the quadrature and the coset
    window, not by the series truncation.
    """
    quad = _cfg(precision)
    s = complex(s)
    if s.real < 2.5:
        raise DomainError(f"unfolding check needs Re s >= 2.5, got {s.real}")
    if f1.weight != f2.weight:
        raise DomainError("forms must share a weight")
    k = f1.weight
    density = holo_pair_density(f2, f1)
    left = petersson_inner(poincare_grid(h, s, window), density, quad)
    n_use = min(n_series + h, f1.length + h, f2.length)
    series = d_series(ShiftedSeriesSpec("minus", f1, f2, s, h, n_use), quad)
    right = cmath.exp(log_gamma(s + k - 1.0)
                      - (s + k - 1.0) * math.log(4.0 * math.pi)) \
        * complex(series)
    return left, right


# ---------------------------------------------------------------------------
# double series
# ---------------------------------------------------------------------------

def z_plus_truncated(spec: ZSpec,
                     precision: PrecisionConfig | None = None,
                     certify: bool = False) -> SeriesValue:
    """Truncated double shifted series with certified tail bound.

    Sums a(m+h) conj(weight(m)) / (m^(s+(k-1)/2) h^(w+(k-1)/2)) over
    h <= n_max and m up to n_max or the right factor's data length,
    whichever is smaller.  The tail bound covers both the dropped h rows
    and the dropped m columns of the kept rows.
    """
    quad = _cfg(precision)
    s, w = spec.s, spec.w
    if s.real <= 1.0 or w.real <= 1.0:
        raise DomainError(
            f"absolute convergence needs Re s > 1 and Re w > 1, got "
            f"({s.real}, {w.real})")
    inner = ShiftedSeriesSpec("plus", spec.left, spec.right, s, 1, 1)
    sigma = _effective_abscissa(inner)
    if sigma <= 1.0:
        raise DomainError(f"m-series diverges: effective abscissa {sigma:.4f} <= 1")
    p = (spec.left.weight - 1) / 2.0
    m_cap = _maass_right_cap(spec)
    if m_cap + spec.n_max > spec.left.length:
        raise DomainError(
            f"left table covers {spec.left.length} coefficients, double "
            f"series needs a(m+h) up to {m_cap + spec.n_max}")

    wt = _right_values(spec, m_cap)
    m = np.arange(1, m_cap + 1, dtype=np.float64)
    base = wt * np.exp(-s * np.log(m))
    rows = []
    for h in range(1, spec.n_max + 1):
        a_left = spec.left.normalized[h:m_cap + h]
        row = _block_sum(a_left * base * (1.0 + h / m) ** p)
        rows.append(row * cmath.exp(-(w + p) * math.log(h)))
    value = complex(math.fsum(r.real for r in rows),
                    math.fsum(r.imag for r in rows))

    # h-tail: each row is bounded by (1+h)^(p + sigma/2) times the full
    # m-series bound (the sigma/2 comes from the index shift inside the
    # Cauchy-Schwarz factor), so the dropped rows decay like
    # h^(sigma/2 - Re w) and certify only when Re w > 1 + sigma/2.
    full = _square_divisor_full(sigma)
    decay = w.real - sigma / 2.0
    if decay > 1.0:
        h_tail = full * 2.0 ** (p + sigma / 2.0) \
            * spec.n_max ** (1.0 - decay) / (decay - 1.0)
    else:
        h_tail = math.inf
    # m-tail of each kept row, from the plus-series tail at its shift.
    hs = np.arange(1, spec.n_max + 1, dtype=np.float64)
    grow = (1.0 + hs / m_cap) ** (p + sigma)
    col = math.sqrt(_square_divisor_tail(m_cap, sigma))
    col_h = np.array([math.sqrt(_square_divisor_tail(m_cap + int(h), sigma))
                      for h in hs])
    m_tail = float(np.sum(grow * col * col_h * hs ** (-(w.real + p))))
    bound = h_tail + m_tail
    if certify and bound > quad.rel_tol * max(abs(value), 1e-300):
        raise AccuracyError(
            f"certified tail {bound:.3e} exceeds rel_tol*|value| at "
            f"n_max = {spec.n_max}",
            achieved=bound / max(abs(value), 1e-300),
            requested=quad.rel_tol,
            suggestion="raise n_max (h-rows) or supply longer right data")
    return SeriesValue(value, bound)


# ---------------------------------------------------------------------------
# rearrangement of the double series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RearrangementReport:
    """Every quantity of the double-series rearrangement check.

    ``s1`` is the m >= h part, ``s2_direct`` the m < h part summed as
    written, ``s2_regrouped`` the same part through the binomial
    expansion in powers of m/(m+h) (``j_used`` terms, certified
    remainder ``j_tail``).  The probe fields decompose the single
    expansion order ``probe_j`` into complete-sum pieces: a product of
    one-dimensional partial L-sums (``s5``) minus the three overcounted
    ranges (``s6``, ``s7``, ``s8``).
    """

    s1: complex
    s2_direct: complex
    s2_regrouped: complex
    regroup_rel: float
    j_used: int
    j_tail: float
    probe_j: int
    s3_direct: complex
    s5: complex
    s6: complex
    s7: complex
    s8: complex
    split_rel: float


def _binom_coeffs(beta: complex, j_top: int) -> np.ndarray:
    # C(beta+j-1, j) by the stable forward recurrence.
    out = np.empty(j_top + 1, dtype=np.complex128)
    out[0] = 1.0
    for j in range(j_top):
        out[j + 1] = out[j] * (beta + j) / (j + 1.0)
    return out


def rearrangement_check(table: CoefficientTable, maass: MaassFormData,
                        s: complex, w: complex,
                        K: int = 2, probe_j: int = 1,
                        j_max: int = 140) -> RearrangementReport:
    """Recompute the m < h half of the double series two independent ways.

    The direct sum runs over every (m, h) with m < h that the coefficient
    table reaches.  The regrouped sum expands h^(-(w+(k-1)/2)) around
    (m+h)^(-(w+(k-1)/2)) binomially and exchanges the order of summation,
    which is legitimate exactly when Re s + (k-1)/2 - K > 1 keeps every
    exchanged row absolutely convergent; the report carries both values,
    their relative gap, and a complete-L-sum decomposition of the single
    order ``probe_j``.  All pieces share one index support, so the
    identities hold to rounding, not merely to a truncation tolerance.
    """
    s, w = complex(s), complex(w)
    k = table.weight
    p = (k - 1) / 2.0
    if s.real + p - K <= 1.0 or w.real <= 1.0:
        raise DomainError(
            f"rearrangement needs Re s + (k-1)/2 - K > 1 and Re w > 1, "
            f"got Re s = {s.real}, Re w = {w.real}, K = {K}")
    if not 0 <= probe_j <= j_max:
        raise DomainError("probe_j outside the expansion range")
    lam = np.asarray(maass.lam, dtype=np.float64)
    m_cap = len(lam)
    n_len = table.length
    if n_len < 2 * m_cap + 2:
        raise DomainError("coefficient table too short for the m < h range")
    A = table.normalized
    ln_n = np.log(np.arange(1, n_len + 1, dtype=np.float64))

    # s1: m >= h, both indices inside the Maass data range.
    s1_rows = []
    for m in range(1, m_cap + 1):
        h = np.arange(1, m + 1, dtype=np.float64)
        n_idx = (m + h).astype(int)
        t = A[n_idx - 1] * np.exp(p * np.log(m + h) - (w + p) * np.log(h))
        s1_rows.append(float(lam[m - 1]) * cmath.exp(-(s + p) * math.log(m))
                       * _block_sum(t))
    s1 = complex(math.fsum(r.real for r in s1_rows),
                 math.fsum(r.imag for r in s1_rows))

    # s2 direct: m < h as far as the table reaches (n = m + h <= n_len).
    s2_rows = []
    for m in range(1, m_cap + 1):
        h = np.arange(m + 1, n_len - m + 1, dtype=np.float64)
        n_idx = (m + h).astype(int)
        t = A[n_idx - 1] * np.exp(p * np.log(m + h) - (w + p) * np.log(h))
        s2_rows.append(float(lam[m - 1]) * cmath.exp(-(s + p) * math.log(m))
                       * _block_sum(t))
    s2_direct = complex(math.fsum(r.real for r in s2_rows),
                        math.fsum(r.imag for r in s2_rows))

    # s3(j) for every expansion order at once, via suffix sums of the
    # weighted coefficient stream.
    beta = w + p
    coeff = _binom_coeffs(beta, j_max)

    def s3_of(j: int) -> complex:
        pw = A * np.exp(-(w + j) * ln_n)
        suffix = np.concatenate([np.cumsum(pw[::-1])[::-1], [0.0 + 0.0j]])
        out = 0.0 + 0.0j
        for m in range(1, m_cap + 1):
            out += float(lam[m - 1]) \
                * cmath.exp((j - s - p) * math.log(m)) * suffix[2 * m]
        return out

    s3k = 0.0 + 0.0j
    s4k = 0.0 + 0.0j
    j_used = 0
    j_tail = math.inf
    small = 0
    scale = abs(s2_direct)
    for j in range(j_max + 1):
        term = coeff[j] * s3_of(j)
        if j <= K:
            s3k += term
        else:
            s4k += term
        j_used = j
        if j > K:
            mag = abs(term)
            small = small + 1 if mag < 1e-17 * scale else 0
            if small >= 2:
                # ratio of consecutive binomial terms tends to
                # max m/(m+h) < 1/2; certify the remainder geometrically.
                ratio = abs(coeff[j + 1] / coeff[j]) * 0.5 if j < j_max else 0.6
                j_tail = mag * ratio / max(1.0 - ratio, 0.1)
                break
    s2_regrouped = s3k + s4k
    regroup_rel = abs(s2_direct - s2_regrouped) / max(abs(s2_direct), 1e-300)

    # probe decomposition: complete the h-sum of s3(probe_j) and subtract
    # the n <= 2m ranges it overcounts.
    j = probe_j
    s3_rows = []
    for m in range(1, m_cap + 1):
        n = np.arange(2 * m + 1, n_len + 1, dtype=np.float64)
        t = A[2 * m:n_len] * np.exp(-(w + j) * np.log(n))
        s3_rows.append(float(lam[m - 1])
                       * cmath.exp((j - s - p) * math.log(m)) * _block_sum(t))
    s3_direct = complex(math.fsum(r.real for r in s3_rows),
                        math.fsum(r.imag for r in s3_rows))

    l_f = _block_sum(A * np.exp(-(w + j) * ln_n))
    l_mu = _block_sum(lam * np.exp(-(s + p - j)
                                   * np.log(np.arange(1, m_cap + 1,
                                                      dtype=np.float64))))
    s5 = l_f * l_mu
    s6_rows, s7_rows = [], []
    for m in range(1, m_cap + 1):
        head = cmath.exp((j - s - p) * math.log(m)) * float(lam[m - 1])
        n_mid = np.arange(m + 1, 2 * m + 1, dtype=np.float64)
        s6_rows.append(head * _block_sum(A[m:2 * m]
                                         * np.exp(-(w + j) * np.log(n_mid))))
        if m > 1:
            n_lo = np.arange(1, m, dtype=np.float64)
            s7_rows.append(head * _block_sum(A[:m - 1]
                                             * np.exp(-(w + j) * np.log(n_lo))))
    s6 = complex(math.fsum(r.real for r in s6_rows),
                 math.fsum(r.imag for r in s6_rows))
    s7 = complex(math.fsum(r.real for r in s7_rows),
                 math.fsum(r.imag for r in s7_rows))
    m_arr = np.arange(1, m_cap + 1, dtype=np.float64)
    s8 = _block_sum(A[:m_cap] * lam * np.exp(-(s + w + p) * np.log(m_arr)))
    split = s5 - s6 - s7 - s8
    split_rel = abs(s3_direct - split) / max(abs(s3_direct), 1e-300)

    return RearrangementReport(
        s1=s1, s2_direct=s2_direct, s2_regrouped=s2_regrouped,
        regroup_rel=regroup_rel, j_used=j_used, j_tail=j_tail,
        probe_j=probe_j, s3_direct=s3_direct, s5=complex(s5), s6=s6, s7=s7,
        s8=complex(s8), split_rel=split_rel)


# ---------------------------------------------------------------------------
# contour form of the finite-shift sum
# ---------------------------------------------------------------------------

def finite_shift_contour_check(f: CoefficientTable, maass: MaassFormData,
                               s: complex, w: complex,
                               eps_line: float = 0.25, n_max: int = 4000,
                               precision: PrecisionConfig | None = None
                               ) -> tuple[complex, complex]:
    """Finite-shift double sum vs its Mellin-Barnes contour form.

    Left: sum over h > m >= 1 of a(h-m) conj(lambda(m)) /
    (m^(s+(k-1)/2) h^(w+(k-1)/2)), reindexed through n = h - m and
    truncated at n <= n_max with the full Maass data range in m.  Right:
    the same quantity as a vertical line integral of
    Gamma(-z) Gamma(w+(k-1)/2+z) / Gamma(w+(k-1)/2) against the product
    of the two one-dimensional partial L-sums, on Re z = -eps_line.
    Both sides share their index supports, so the comparison isolates
    quadrature error alone.
    """
    quad = _cfg(precision)
    s, w = complex(s), complex(w)
    p = (f.weight - 1) / 2.0
    if w.real - eps_line <= 1.0 or s.real + eps_line + p <= 1.0:
        raise DomainError(
            "line placement leaves a divergent L-series: need "
            f"Re w - eps > 1 and Re s + eps + (k-1)/2 > 1, got "
            f"Re w = {w.real}, Re s = {s.real}, eps = {eps_line}")
    if not 0.0 < eps_line < 2.0:
        raise DomainError(f"eps_line must lie in (0, 2), got {eps_line}")
    if n_max > f.length:
        raise DomainError(
            f"left table covers {f.length} coefficients, needs {n_max}")
    lam = np.asarray(maass.lam, dtype=np.float64)
    m_cap = len(lam)
    A = f.normalized[:n_max].astype(np.float64)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    ln_n = np.log(n)

    rows = []
    for m in range(1, m_cap + 1):
        t = A * np.exp(p * ln_n - (w + p) * np.log(m + n))
        rows.append(float(lam[m - 1]) * cmath.exp(-(s + p) * math.log(m))
                    * _block_sum(t))
    left = complex(math.fsum(r.real for r in rows),
                   math.fsum(r.imag for r in rows))

    beta = w + p
    ln_m = np.log(np.arange(1, m_cap + 1, dtype=np.float64))

    def integrand(z: np.ndarray) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        out = np.empty(z.shape, dtype=np.complex128)
        flat = out.ravel()
        for i, zi in enumerate(z.ravel()):
            l_f = np.sum(A * np.exp(-(w + zi) * ln_n))
            l_mu = np.sum(lam * np.exp(-(s - zi + p) * ln_m))
            flat[i] = cmath.exp(log_gamma(-zi) + log_gamma(beta + zi)) \
                * l_f * l_mu
        return out

    height = max(32.0, quad.contour_height * 0.8)
    val = line_integral(integrand, -eps_line, height, quad,
                        min_spacing_hint=0.5 / math.log(max(n_max, 8)))
    right = val / cmath.exp(log_gamma(beta))
    return left, right


def beta_contour_identity(beta: complex, x: float, line: float = -0.7,
                          precision: PrecisionConfig | None = None) -> complex:
    """Mellin-Barnes form of (1+x)^(-beta).

    Evaluates (1/(2 pi i Gamma(beta))) times the integral of
    Gamma(-z) Gamma(beta+z) x^z along Re z = ``line``; the line must
    separate the two gamma pole families, -Re beta < line < 0.  The
    closed form (1+x)^(-beta) is the reference the tests compare
    against.
    """
    quad = _cfg(precision)
    beta = complex(beta)
    if x <= 0.0:
        raise DomainError(f"x must be positive, got {x}")
    if not -beta.real < line < 0.0:
        raise DomainError(
            f"line {line} does not separate the pole families of "
            f"Gamma(-z) and Gamma({beta}+z)")
    ln_x = math.log(x)

    def integrand(z: np.ndarray) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        lg = np.array([log_gamma(-zi) + log_gamma(beta + zi)
                       for zi in z.ravel()])
        return np.exp(lg.reshape(z.shape) + z * ln_x)

    val = line_integral(integrand, line, quad.contour_height, quad,
                        min_spacing_hint=0.5 / max(1.0, abs(ln_x)))
    return val / cmath.exp(log_gamma(beta))
