"""Automorphic objects: eigenform coefficients, Maass data, Eisenstein and
Poincare series, and Petersson inner products.

Holomorphic eigenform coefficient tables for the one-dimensional level-1
spaces are generated exactly in integer arithmetic from the weight-4 and
weight-6 Eisenstein q-expansions, with products done by Kronecker
substitution (one big-integer multiply per polynomial product).  Maass-form
data is ingested from text files and validated; computing eigenvalues is
out of scope.  The real-analytic weight-k Eisenstein series is evaluated
both as a completed Fourier expansion (Whittaker coefficients) and as a raw
lattice sum with a certified truncation tail, and the two are cross-checked
in tests.  Petersson inner products integrate over the standard fundamental
domain with a masked tensor grid: a shared log-spaced rectangle above y = 1
plus a per-column sliver down to the unit-circle boundary.
"""

from __future__ import annotations

import cmath
import math
import os
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import gmpy2
import numpy as np

from .config import DEFAULT_PRECISION, PrecisionConfig
from .errors import AccuracyError, DataFormatError, DomainError
from .specfun import (
    _bessel_k_grid,
    _whittaker_w_grid,
    bessel_k,
    completed_zeta,
    whittaker_w,
)

__all__ = [
    "CoefficientTable",
    "MaassFormData",
    "EisensteinParams",
    "eigenform_coefficients",
    "divisor_sigma",
    "holo_eval",
    "maass_load",
    "maass_eval",
    "eisenstein_k_eval",
    "eisenstein_lattice_eval",
    "poincare_lattice_eval",
    "petersson_inner",
    "maass_grid",
    "holo_pair_density",
    "eisenstein_grid",
    "poincare_grid",
]

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)

_CACHE_ENV = "SSLAB_CACHE_DIR"


def _cfg(precision: PrecisionConfig | None) -> PrecisionConfig:
    return DEFAULT_PRECISION if precision is None else precision


# ---------------------------------------------------------------------------
# divisor machinery
# ---------------------------------------------------------------------------

def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def divisor_sigma(s: complex, n: int) -> complex:
    """sum of d^s over the positive divisors d of n."""
    if n < 1:
        raise DomainError("divisor_sigma needs n >= 1")
    sc = complex(s)
    if sc.imag == 0.0 and sc.real == round(sc.real):
        # exact for non-negative integer exponents, float otherwise
        return sum(d ** int(sc.real) for d in _divisors(n))
    return sum(cmath.exp(sc * math.log(d)) for d in _divisors(n))


def _divisor_count_bound(n: int) -> float:
    # d(n) <= n^(1.066/loglog n) for n >= 3
    if n < 3:
        return 2.0
    return math.exp(1.066 * math.log(n) / math.log(math.log(n)))


def _divisor_count_sieve(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for i in range(1, n_max + 1):
        d[i::i] += 1
    return d


# ---------------------------------------------------------------------------
# exact q-expansion arithmetic
# ---------------------------------------------------------------------------

def _sigma3_sieve(n_max: int) -> list[int]:
    out = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        c = d * d * d
        for m in range(d, n_max + 1, d):
            out[m] += c
    return out


def _sigma5_sieve(n_max: int) -> list[int]:
    # d^5 exceeds int64 well before n_max = 1e5, so stay in Python ints
    out = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        c = d ** 5
        for m in range(d, n_max + 1, d):
            out[m] += c
    return out


def _kronecker_multiply(a: Sequence[int], b: Sequence[int],
                        n_out: int) -> list[int]:
    """First n_out+1 coefficients of the product of two integer polynomials.

    Packs both factors into single big integers with a byte-aligned stride
    wide enough that convolution digits never overlap, multiplies once with
    gmpy2, and unpacks signed digits via a half-stride offset.
    """
    max_a = max(1, max(abs(int(v)) for v in a))
    max_b = max(1, max(abs(int(v)) for v in b))
    bits = max_a.bit_length() + max_b.bit_length() \
        + min(len(a), len(b)).bit_length() + 2
    stride_bytes = (bits + 7) // 8
    stride = 8 * stride_bytes

    def pack(coeffs: Sequence[int]) -> int:
        pos = bytearray(len(coeffs) * stride_bytes)
        neg = bytearray(len(coeffs) * stride_bytes)
        for i, v in enumerate(coeffs):
            v = int(v)
            if v >= 0:
                pos[i * stride_bytes:(i + 1) * stride_bytes] = \
                    v.to_bytes(stride_bytes, "little")
            else:
                neg[i * stride_bytes:(i + 1) * stride_bytes] = \
                    (-v).to_bytes(stride_bytes, "little")
        return int.from_bytes(bytes(pos), "little") \
            - int.from_bytes(bytes(neg), "little")

    prod = int(gmpy2.mpz(pack(a)) * gmpy2.mpz(pack(b)))

    n_digits = n_out + 1
    half = 1 << (stride - 1)
    offset = ((1 << (n_digits * stride)) - 1) // ((1 << stride) - 1) * half
    shifted = (prod + offset) & ((1 << (n_digits * stride)) - 1)
    raw = shifted.to_bytes(n_digits * stride_bytes, "little")
    out = []
    for i in range(n_digits):
        d = int.from_bytes(raw[i * stride_bytes:(i + 1) * stride_bytes],
                           "little")
        out.append(d - half)
    return out


def _eigenform_raw(weight: int, n_max: int) -> list[int]:
    """a(0..n_max) of the normalized level-1 eigenform of the given weight."""
    s3 = _sigma3_sieve(n_max)
    e4 = [1] + [240 * s3[n] for n in range(1, n_max + 1)]
    s5 = _sigma5_sieve(n_max)
    e6 = [1] + [-504 * s5[n] for n in range(1, n_max + 1)]

    e4sq = _kronecker_multiply(e4, e4, n_max)
    e4cb = _kronecker_multiply(e4sq, e4, n_max)
    e6sq = _kronecker_multiply(e6, e6, n_max)
    delta = []
    for x, y in zip(e4cb, e6sq):
        num = x - y
        q, r = divmod(num, 1728)
        if r:
            raise RuntimeError("discriminant expansion not divisible by 1728")
        delta.append(q)

    if weight == 12:
        return delta
    if weight == 16:
        return _kronecker_multiply(delta, e4, n_max)
    if weight == 18:
        return _kronecker_multiply(delta, e6, n_max)
    if weight == 20:
        return _kronecker_multiply(_kronecker_multiply(delta, e4, n_max),
                                   e4, n_max)
    if weight == 22:
        return _kronecker_multiply(_kronecker_multiply(delta, e4, n_max),
                                   e6, n_max)
    if weight == 26:
        step = _kronecker_multiply(_kronecker_multiply(delta, e4, n_max),
                                   e4, n_max)
        return _kronecker_multiply(step, e6, n_max)
    raise DomainError(
        f"weight {weight} is not a one-dimensional level-1 space; "
        f"supported: {SUPPORTED_WEIGHTS}")


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientTable:
    """Fourier coefficients a(n), 1 <= n <= length, of a weight-k eigenform.

    ``raw`` holds exact integers; ``normalized`` holds
    A(n) = a(n) / n^((k-1)/2) as binary64.  Instances are immutable and
    safe to share across threads.
    """

    weight: int
    length: int
    raw: tuple[int, ...]
    normalized: np.ndarray

    def a(self, n: int) -> int:
        if not 1 <= n <= self.length:
            raise DomainError(f"coefficient index {n} outside 1..{self.length}")
        return self.raw[n - 1]

    def validate(self, deep: bool = False) -> None:
        """Integrity checks: normalization, Hecke relations, coefficient
        size bound.  ``deep`` checks every n exactly; otherwise a sampled
        subset."""
        if self.raw[0] != 1:
            raise DataFormatError("a(1) != 1")
        k = self.weight
        n_check = self.length if deep else min(self.length, 512)
        dcounts = _divisor_count_sieve(n_check)
        for n in range(1, n_check + 1):
            lhs = self.raw[n - 1] ** 2
            rhs = int(dcounts[n]) ** 2 * n ** (k - 1)
            if lhs > rhs:
                raise DataFormatError(
                    f"coefficient bound violated at n={n} (weight {k})")
        rng = np.random.default_rng(10007)
        pairs = []
        for _ in range(64 if deep else 16):
            m = int(rng.integers(2, max(3, int(math.isqrt(self.length)))))
            n = int(rng.integers(2, max(3, self.length // m + 1)))
            if m * n <= self.length:
                pairs.append((m, n))
        for m, n in pairs:
            rhs = 0
            g = math.gcd(m, n)
            for d in _divisors(g):
                rhs += d ** (k - 1) * self.raw[m * n // (d * d) - 1]
            if self.raw[m - 1] * self.raw[n - 1] != rhs:
                raise DataFormatError(
                    f"Hecke relation fails at (m, n) = ({m}, {n})")


def _cache_dir() -> Path:
    root = os.environ.get(_CACHE_ENV)
    if root:
        return Path(root)
    return Path.home() / ".cache" / "sslab"


def _cache_path(weight: int, n_max: int) -> Path:
    return _cache_dir() / f"eigenform_w{weight}_N{n_max}.csv"


def _write_cache(path: Path, weight: int, raw: Sequence[int]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with tmp.open("w") as fh:
        fh.write(f"# weight={weight} N={len(raw)}\n")
        fh.write("n,a_n\n")
        for i, v in enumerate(raw, start=1):
            fh.write(f"{i},{v}\n")
    tmp.replace(path)


def _read_cache(path: Path, weight: int, n_max: int) -> list[int] | None:
    try:
        with path.open() as fh:
            header = fh.readline().strip()
            if not header.startswith("#"):
                raise DataFormatError("missing cache header")
            fields = dict(part.split("=") for part in header[1:].split())
            if int(fields["weight"]) != weight or int(fields["N"]) < n_max:
                return None
            out: list[int] = []
            for line in fh:
                line = line.strip()
                if not line or line == "n,a_n":
                    continue
                n_str, a_str = line.split(",")
                if int(n_str) != len(out) + 1:
                    raise DataFormatError("cache rows out of order")
                out.append(int(a_str))
                if len(out) == n_max:
                    break
            if len(out) < n_max:
                raise DataFormatError("cache shorter than its header claims")
            return out
    except OSError:
        return None
    except (DataFormatError, ValueError, KeyError) as exc:
        warnings.warn(f"discarding unreadable coefficient cache {path}: {exc}",
                      RuntimeWarning, stacklevel=3)
        return None


def eigenform_coefficients(weight: int, n_max: int,
                           use_cache: bool = True) -> CoefficientTable:
    """Coefficient table of the normalized level-1 eigenform of this weight.

    Results are cached as CSV under $SSLAB_CACHE_DIR (default
    ~/.cache/sslab) keyed by (weight, N); regeneration is deterministic and
    an unreadable cache file is silently rebuilt.
    """
    if weight not in SUPPORTED_WEIGHTS:
        raise DomainError(
            f"weight {weight} is not a one-dimensional level-1 space; "
            f"supported: {SUPPORTED_WEIGHTS}")
    if n_max < 1:
        raise DomainError("need n_max >= 1")
    raw: Sequence[int] | None = None
    if use_cache:
        raw = _read_cache(_cache_path(weight, n_max), weight, n_max)
        if raw is None:
            # a longer table for the same weight also serves
            parent = _cache_dir()
            if parent.is_dir():
                for cand in sorted(parent.glob(f"eigenform_w{weight}_N*.csv")):
                    raw = _read_cache(cand, weight, n_max)
                    if raw is not None:
                        break
    if raw is None:
        raw = _eigenform_raw(weight, n_max)[1:n_max + 1]
        if use_cache:
            _write_cache(_cache_path(weight, n_max), weight, raw)
    ns = np.arange(1, n_max + 1, dtype=np.float64)
    normalized = np.array([float(v) for v in raw]) \
        / ns ** ((weight - 1) / 2.0)
    table = CoefficientTable(weight=weight, length=n_max,
                             raw=tuple(int(v) for v in raw),
                             normalized=normalized)
    table.validate(deep=False)
    return table


def holo_eval(table: CoefficientTable, z: complex,
              precision: PrecisionConfig | None = None) -> complex:
    """f(z) = sum a(n) e^(2 pi i n z) with a certified truncation tail.

    The tail uses |a(n)| <= d(n) n^((k-1)/2) with the explicit divisor
    bound; if the bound cannot be brought below rel_tol relative to the
    computed value, raises AccuracyError advising a longer table.
    """
    quad = _cfg(precision)
    z = complex(z)
    if z.imag <= 0.0:
        raise DomainError("holo_eval needs Im z > 0")
    y = z.imag
    k = table.weight
    n = np.arange(1, table.length + 1)
    decay = -2.0 * math.pi * y * n
    keep = decay > -745.0
    n = n[keep]
    coeffs = table.normalized[keep] * n ** ((k - 1) / 2.0)
    terms = coeffs * np.exp(2j * math.pi * n * z)
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))

    m = table.length + 1
    g1 = _divisor_count_bound(m) * m ** ((k - 1) / 2.0) \
        * math.exp(-2.0 * math.pi * y * m)
    g2 = _divisor_count_bound(m + 1) * (m + 1) ** ((k - 1) / 2.0) \
        * math.exp(-2.0 * math.pi * y * (m + 1))
    ratio = g2 / g1 if g1 > 0.0 else 0.0
    if ratio >= 0.995:
        raise AccuracyError(
            "holomorphic tail not geometric at this height",
            achieved=math.inf, requested=quad.rel_tol,
            suggestion="increase the table length or Im z")
    tail = g1 / (1.0 - ratio)
    if tail > quad.rel_tol * max(abs(value), 1e-300):
        raise AccuracyError(
            "holomorphic truncation tail exceeds tolerance",
            achieved=tail / max(abs(value), 1e-300), requested=quad.rel_tol,
            suggestion=f"increase the table length beyond N={table.length}")
    return value


# ---------------------------------------------------------------------------
# Maass form data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaassFormData:
    """Spectral parameter, parity, and Hecke eigenvalues of a Maass form.

    ``lam`` holds lambda(n) for 1 <= n <= len(lam) with lambda(1) = 1.
    ``rho1`` is the positive L^2-normalization factor; the normalized form
    rho1 * sum lambda(n) 2 sqrt(y) K_it(2 pi n y) trig(2 pi n x) has unit
    Petersson norm when the instance came through maass_load.  Directly
    constructed instances (synthetic eigenvalue sequences in tests) carry
    whatever rho1 the caller supplies.
    """

    t: float
    parity: str
    lam: np.ndarray
    rho1: float = 1.0
    # measured automorphy residual, populated by maass_load
    validation_residual: float | None = None

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise DomainError(f"parity must be even|odd, got {self.parity!r}")
        if len(self.lam) < 1 or abs(self.lam[0] - 1.0) > 1e-12:
            raise DomainError("need lambda(1) = 1")
        if not self.rho1 > 0.0:
            raise DomainError("rho1 must be positive")


_AUTOMORPHY_POINTS = (
    0.07 + 0.62j, 0.13 + 0.85j, 0.21 + 0.55j, 0.31 + 0.71j, 0.41 + 0.62j,
    -0.11 + 0.93j, 0.17 + 1.10j, -0.27 + 0.66j, 0.37 + 0.90j, -0.43 + 0.77j,
)


def _hecke_residual(lam: np.ndarray) -> float:
    n_max = len(lam)
    worst = 0.0
    for m in range(2, n_max + 1):
        for n in range(m, n_max + 1):
            if m * n > n_max:
                break
            rhs = 0.0
            for d in _divisors(math.gcd(m, n)):
                rhs += lam[m * n // (d * d) - 1]
            worst = max(worst, abs(lam[m - 1] * lam[n - 1] - rhs))
    return worst


def maass_load(path: str | Path, val_tol: float = 1e-4,
               precision: PrecisionConfig | None = None) -> MaassFormData:
    """Parse and validate a Maass-form data file.

    Validation: Hecke multiplicativity of the eigenvalues, then the
    automorphy residual max|u(-1/z) - u(z)| / max|u| over ten fixed sample
    points must not exceed ``val_tol``; failing files are rejected.  The
    returned rho1 normalizes the expansion to unit Petersson norm.
    """
    quad = _cfg(precision)
    path = Path(path)
    t: float | None = None
    parity: str | None = None
    coefs: list[float] = []
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DataFormatError(f"cannot read Maass data file: {exc}") from exc
    if not lines or lines[0].strip() != "maass-sl2z v1":
        raise DataFormatError("missing maass-sl2z v1 header")
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "t" and len(parts) == 2:
            t = float(parts[1])
        elif parts[0] == "parity" and len(parts) == 2:
            if parts[1] not in ("even", "odd"):
                raise DataFormatError(f"line {lineno}: bad parity {parts[1]!r}")
            parity = parts[1]
        elif parts[0] == "coef" and len(parts) == 3:
            n = int(parts[1])
            if n != len(coefs) + 1:
                raise DataFormatError(
                    f"line {lineno}: coefficient index {n} out of order")
            coefs.append(float(parts[2]))
        else:
            raise DataFormatError(f"line {lineno}: unrecognized line {line!r}")
    if t is None or parity is None:
        raise DataFormatError("file lacks a t or parity line")
    if not coefs:
        raise DataFormatError("empty coefficient list")
    if coefs[0] != 1.0:
        raise DataFormatError("first coefficient must be 1.0")

    lam = np.array(coefs)
    hecke = _hecke_residual(lam)
    if hecke > 1e-6:
        raise DataFormatError(
            f"Hecke multiplicativity fails (residual {hecke:.2e})")

    form = MaassFormData(t=t, parity=parity, lam=lam, rho1=1.0)
    vals, imgs = [], []
    for z in _AUTOMORPHY_POINTS:
        vals.append(maass_eval(form, z, quad))
        imgs.append(maass_eval(form, -1.0 / z, quad))
    scale = max(abs(v) for v in vals)
    residual = max(abs(a - b) for a, b in zip(vals, imgs)) / scale
    if residual > val_tol:
        raise DataFormatError(
            f"automorphy residual {residual:.2e} exceeds {val_tol:.1e}; "
            "file rejected")

    adapter = maass_grid(form, quad)
    norm = petersson_inner(adapter, adapter, quad).real
    if not norm > 0.0:
        raise DataFormatError("nonpositive self-norm; data unusable")
    return replace(form, rho1=1.0 / math.sqrt(norm),
                   validation_residual=residual)


def _maass_raw_terms(form: MaassFormData, z: complex,
                     quad: PrecisionConfig) -> float:
    y = z.imag
    pieces = []
    for i, ln in enumerate(form.lam):
        n = i + 1
        kv = bessel_k(1j * form.t, 2.0 * math.pi * n * y, quad).real
        ang = 2.0 * math.pi * n * z.real
        trig = math.cos(ang) if form.parity == "even" else math.sin(ang)
        pieces.append(float(ln) * kv * trig)
    return math.fsum(pieces) * 2.0 * math.sqrt(y)


def maass_eval(form: MaassFormData, z: complex,
               precision: PrecisionConfig | None = None) -> float:
    """Value of the (rho1-normalized) Maass form at z, Im z >= 0.5."""
    quad = _cfg(precision)
    z = complex(z)
    y = z.imag
    if y < 0.5:
        raise DomainError("maass_eval needs Im z >= 0.5")
    value = form.rho1 * _maass_raw_terms(form, z, quad)
    # tail certificate: |K_it(w)| <= K_0(w) <= 1.09 sqrt(pi/2w) e^-w, w >= 1
    m = len(form.lam) + 1
    lam_scale = max(1.0, float(np.max(np.abs(form.lam))))
    g1 = lam_scale * _divisor_count_bound(m) * 1.09 / math.sqrt(m) \
        * math.exp(-2.0 * math.pi * y * m)
    scale = max(abs(value), form.rho1 * math.exp(-math.pi * abs(form.t)))
    if 2.0 * form.rho1 * g1 > quad.rel_tol * scale \
            and 2.0 * form.rho1 * g1 > 1e3 * quad.rel_tol * abs(value):
        raise AccuracyError(
            "Maass expansion tail exceeds tolerance",
            achieved=2.0 * form.rho1 * g1 / max(abs(value), 1e-300),
            requested=quad.rel_tol,
            suggestion="supply more coefficients or raise Im z")
    return value


# ---------------------------------------------------------------------------
# Eisenstein series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EisensteinParams:
    weight: int
    s: complex
    completion: str = "completed"

    def __post_init__(self):
        if self.weight % 2 != 0 or self.weight < 0:
            raise DomainError("Eisenstein weight must be even and >= 0")
        if self.completion not in ("raw", "completed"):
            raise DomainError("completion must be raw|completed")


def _eis_completion_factor(k: int, s: complex) -> complex:
    # E*^(k) = pi^-s Gamma(s + k/2) zeta(2s) E^(k).  Splitting the Gamma
    # into Gamma(s) times a polynomial leaves everything on the completed
    # zeta, which has poles only at 2s in {0, 1}.
    fac = completed_zeta(2.0 * s)
    for j in range(k // 2):
        fac = fac * (s + j)
    return fac


def _eis_constant_term(k: int, s: complex, y: float | np.ndarray):
    # Both pieces written over the completed zeta; the polynomial factors
    # swap places under s -> 1-s, so the symmetry is built in and the
    # Gamma-pole / trivial-zero cancellations never need special casing.
    c1 = completed_zeta(2.0 * s)
    c2 = completed_zeta(2.0 * s - 1.0)
    for j in range(k // 2):
        c1 = c1 * (s + j)
        c2 = c2 * ((j + 1.0) - s)
    return c1 * y ** s + c2 * y ** (1.0 - s)


def _eis_negative_ratio(k: int, s: complex) -> complex:
    # Gamma(s + k/2) / Gamma(s - k/2) as a rising product; exactly zero at
    # the degenerations where the negative-frequency family drops out.
    ratio = complex(1.0)
    for m in range(k):
        ratio = ratio * (s - k / 2.0 + m)
    return ratio


def _eis_fourier_coeff(k: int, s: complex, n: int) -> tuple[complex, complex]:
    """Coefficients (c_plus, c_minus) multiplying W_(k/2,s-1/2)(4 pi n y)
    e^(2 pi i n x) and W_(-k/2,s-1/2)(4 pi n y) e^(-2 pi i n x) in the
    completed series."""
    sign = (-1) ** (k // 2)
    base = sign * divisor_sigma(1.0 - 2.0 * s, n) \
        * cmath.exp((s - 1.0) * math.log(n))
    return base, base * _eis_negative_ratio(k, s)


def eisenstein_k_eval(params: EisensteinParams, z: complex,
                      precision: PrecisionConfig | None = None) -> complex:
    """Weight-k real-analytic Eisenstein series by its Fourier expansion.

    Returns the completed series (symmetric under s -> 1-s) or, when
    params.completion is "raw", the plain lattice-sum normalization.
    """
    quad = _cfg(precision)
    z = complex(z)
    k, s = params.weight, complex(params.s)
    y, x = z.imag, z.real
    if y < 0.5:
        raise DomainError("eisenstein_k_eval needs Im z >= 0.5")
    for pole in (0.0, 0.5, 1.0):
        if abs(s - pole) < 1e-8:
            raise DomainError(
                f"constant-term pole at s = {s} (completed zeta factor)")
    try:
        const = _eis_constant_term(k, s, y)
    except DomainError as exc:
        raise DomainError(f"constant-term pole: {exc}") from exc

    mu = s - 0.5
    total = const
    running_peak = abs(const)
    small_streak = 0
    for n in range(1, 64):
        w_arg = 4.0 * math.pi * n * y
        cp, cm = _eis_fourier_coeff(k, s, n)
        wp = whittaker_w(k / 2.0, mu, w_arg, quad)
        if k == 0:
            wm = wp
        elif cm == 0.0:
            # degenerate weight: the negative-frequency family drops out,
            # and its Whittaker factor may not even be evaluable there
            wm = 0.0
        else:
            wm = whittaker_w(-k / 2.0, mu, w_arg, quad)
        term = cp * wp * cmath.exp(2j * math.pi * n * x) \
            + cm * wm * cmath.exp(-2j * math.pi * n * x)
        total += term
        running_peak = max(running_peak, abs(total))
        if abs(term) < 0.1 * quad.rel_tol * running_peak:
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
    if params.completion == "raw":
        return total / _eis_completion_factor(k, s)
    return total


def _coprime_window(c: int, x: float, y: float, radius: float) -> np.ndarray:
    """Integers d coprime to c with |c z + d| <= radius."""
    span_sq = radius * radius - (c * y) ** 2
    if span_sq <= 0.0:
        return np.empty(0, dtype=np.int64)
    span = math.sqrt(span_sq)
    lo = math.ceil(-c * x - span)
    hi = math.floor(-c * x + span)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    d = np.arange(lo, hi + 1, dtype=np.int64)
    return d[np.gcd(d, c) == 1]


_LATTICE_RADIUS_CAP = 2500.0


def _lattice_radius(sigma: float, y: float, target: float) -> float:
    # area-count tail bound: 3 * 2 pi y^(sigma-1) R^(2-2 sigma) / (2 sigma - 2)
    r = (6.0 * math.pi * y ** (sigma - 1.0)
         / ((2.0 * sigma - 2.0) * target)) ** (1.0 / (2.0 * sigma - 2.0))
    return min(max(r, 12.0), _LATTICE_RADIUS_CAP)


def _lattice_tail_bound(sigma: float, y: float, radius: float) -> float:
    return 6.0 * math.pi * y ** (sigma - 1.0) \
        * radius ** (2.0 - 2.0 * sigma) / (2.0 * sigma - 2.0)


def eisenstein_lattice_eval(k: int, s: complex, z: complex,
                            precision: PrecisionConfig | None = None
                            ) -> complex:
    """Direct lattice sum y^s + sum y^s |cz+d|^(k-2s) (cz+d)^-k over
    coprime (c, d), c > 0, with a certified area-count truncation tail."""
    quad = _cfg(precision)
    z = complex(z)
    s = complex(s)
    if k % 2 != 0:
        raise DomainError("weight must be even")
    if s.real < 2.5:
        raise DomainError("lattice sum needs Re s >= 2.5")
    y, x = z.imag, z.real
    if y <= 0.0:
        raise DomainError("need Im z > 0")
    sigma = s.real
    ys = cmath.exp(s * math.log(y))

    def windowed_sum(radius: float) -> complex:
        partial_re = [ys.real]
        partial_im = [ys.imag]
        c = 1
        while c * y <= radius:
            d = _coprime_window(c, x, y, radius)
            if d.size:
                w = c * z + d.astype(np.float64)
                vals = ys * np.exp(-2.0 * s * np.log(np.abs(w))
                                   - 1j * k * np.angle(w))
                partial_re.append(float(np.sum(vals.real)))
                partial_im.append(float(np.sum(vals.imag)))
            c += 1
        return complex(math.fsum(partial_re), math.fsum(partial_im))

    # first pass sized against the cusp scale y^sigma; if the value turns
    # out small the radius is re-derived from it and the sum redone once
    radius = _lattice_radius(sigma, y, 0.1 * quad.rel_tol * y ** sigma)
    value = windowed_sum(radius)
    tail = _lattice_tail_bound(sigma, y, radius)
    budget = quad.rel_tol * max(abs(value), 1e-300)
    if tail > 1.5 * budget and radius < _LATTICE_RADIUS_CAP:
        radius = _lattice_radius(sigma, y, 0.5 * budget)
        value = windowed_sum(radius)
        tail = _lattice_tail_bound(sigma, y, radius)
        budget = quad.rel_tol * max(abs(value), 1e-300)
    if tail > 1.5 * budget:
        raise AccuracyError(
            "lattice tail bound above tolerance",
            achieved=tail / max(abs(value), 1e-300), requested=quad.rel_tol,
            suggestion="relax rel_tol or raise Re s")
    return value


def poincare_lattice_eval(h: int, s: complex, z: complex,
                          precision: PrecisionConfig | None = None) -> complex:
    """Poincare series sum over cosets of (Im gamma z)^s e^(2 pi i h gamma z),
    by the same windowed lattice sum as the Eisenstein evaluator."""
    quad = _cfg(precision)
    if h < 1:
        raise DomainError("poincare_lattice_eval needs h >= 1")
    z = complex(z)
    s = complex(s)
    if s.real < 2.5:
        raise DomainError("lattice sum needs Re s >= 2.5")
    y, x = z.imag, z.real
    if y <= 0.0:
        raise DomainError("need Im z > 0")
    sigma = s.real
    lead = cmath.exp(s * math.log(y)) * cmath.exp(2j * math.pi * h * z)

    def windowed_sum(radius: float) -> complex:
        partial_re = [lead.real]
        partial_im = [lead.imag]
        c = 1
        while c * y <= radius:
            ds = _coprime_window(c, x, y, radius)
            for d in ds.tolist():
                a = pow(d % c, -1, c)
                w = c * z + d
                gz = a / c - 1.0 / (c * w)
                val = cmath.exp(s * (math.log(y) - 2.0 * math.log(abs(w)))) \
                    * cmath.exp(2j * math.pi * h * gz)
                partial_re.append(val.real)
                partial_im.append(val.imag)
            c += 1
        return complex(math.fsum(partial_re), math.fsum(partial_im))

    # the exponential factors are bounded by 1 termwise, so the Eisenstein
    # area tail bound applies verbatim
    scale = max(abs(lead), y ** -sigma)
    radius = _lattice_radius(sigma, y, 0.1 * quad.rel_tol * scale)
    value = windowed_sum(radius)
    tail = _lattice_tail_bound(sigma, y, radius)
    budget = quad.rel_tol * max(abs(value), 1e-300)
    if tail > 1.5 * budget and radius < _LATTICE_RADIUS_CAP:
        radius = _lattice_radius(sigma, y, 0.5 * budget)
        value = windowed_sum(radius)
        tail = _lattice_tail_bound(sigma, y, radius)
        budget = quad.rel_tol * max(abs(value), 1e-300)
    if tail > 1.5 * budget:
        raise AccuracyError(
            "lattice tail bound above tolerance",
            achieved=tail / max(abs(value), 1e-300), requested=quad.rel_tol,
            suggestion="relax rel_tol or raise Re s")
    return value


# ---------------------------------------------------------------------------
# Petersson inner products over the fundamental domain
# ---------------------------------------------------------------------------

def petersson_inner(f: Callable[[np.ndarray, np.ndarray], np.ndarray],
                    g: Callable[[np.ndarray, np.ndarray], np.ndarray],
                    precision: PrecisionConfig | None = None,
                    y_max: float = 6.0) -> complex:
    """integral of f(z) conj(g(z)) dx dy / y^2 over |x| <= 1/2, |z| >= 1.

    ``f`` and ``g`` take matching 2D arrays (x, y) and return values; the
    adapters in this module (maass_grid, holo_pair_density, ...) fit the
    protocol.  The region is a shared log-spaced rectangle above y = 1 plus
    a per-column sliver down to the circle boundary; at least one factor
    must decay at the cusp (adapters advertise decays_at_cusp).
    """
    quad = _cfg(precision)
    if not (getattr(f, "decays_at_cusp", True)
            or getattr(g, "decays_at_cusp", True)):
        raise DomainError(
            "integrand with two non-decaying factors diverges at the cusp")
    n_x = 6 * quad.quad_points
    n_rect = 16 * quad.quad_points
    n_sliver = quad.quad_points // 2 + 8

    h_x = 1.0 / n_x
    xs = -0.5 + (np.arange(n_x) + 0.5) * h_x

    y_rect = np.exp(np.linspace(0.0, math.log(y_max), n_rect))
    w_rect = np.zeros(n_rect)
    w_rect[1:] += 0.5 * np.diff(y_rect)
    w_rect[:-1] += 0.5 * np.diff(y_rect)

    y0 = np.sqrt(1.0 - xs ** 2)
    frac = (np.arange(n_sliver) / (n_sliver - 1.0))[None, :]
    y_sliv = y0[:, None] + (1.0 - y0[:, None]) * frac
    w_sliv = np.zeros_like(y_sliv)
    dy = np.diff(y_sliv, axis=1)
    w_sliv[:, 1:] += 0.5 * dy
    w_sliv[:, :-1] += 0.5 * dy

    x2d = np.concatenate(
        [np.broadcast_to(xs[:, None], (n_x, n_rect)),
         np.broadcast_to(xs[:, None], (n_x, n_sliver))], axis=1)
    y2d = np.concatenate(
        [np.broadcast_to(y_rect[None, :], (n_x, n_rect)), y_sliv], axis=1)
    wgt = np.concatenate(
        [np.broadcast_to(w_rect[None, :], (n_x, n_rect)), w_sliv], axis=1) \
        * h_x / y2d ** 2

    fv = np.asarray(f(x2d, y2d))
    gv = np.asarray(g(x2d, y2d)) if g is not f else fv
    integrand = fv * np.conj(gv) * wgt
    return complex(math.fsum(integrand.real.ravel()),
                   math.fsum(integrand.imag.ravel()))


def _k_bessel_table(t: float, w_min: float, w_max: float,
                    quad: PrecisionConfig,
                    n_nodes: int = 12000) -> tuple[np.ndarray, np.ndarray]:
    grid = np.exp(np.linspace(math.log(w_min), math.log(w_max), n_nodes))
    vals = _bessel_k_grid(complex(0.0, t), grid, quad).real
    return grid, vals


def maass_grid(form: MaassFormData,
               precision: PrecisionConfig | None = None
               ) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Grid evaluator for a Maass form, rho1 included.

    K-Bessel values come from a dense log-spaced table with linear
    interpolation; the table resolves the oscillation scale sqrt(t^2 - w^2)
    well below the quadrature tolerances used on these grids.
    """
    quad = _cfg(precision)
    cache: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}

    def evaluate(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        n_terms = len(form.lam)
        w_min = 2.0 * math.pi * float(np.min(y)) * 0.999
        w_max = 2.0 * math.pi * n_terms * float(np.max(y)) * 1.001
        key = (round(w_min, 9), round(w_max, 9))
        if key not in cache:
            cache.clear()
            cache[key] = _k_bessel_table(form.t, w_min, w_max, quad)
        grid, kv = cache[key]
        total = np.zeros_like(y, dtype=np.float64)
        trig = np.cos if form.parity == "even" else np.sin
        for i, ln in enumerate(form.lam):
            n = i + 1
            kvals = np.interp(2.0 * math.pi * n * y, grid, kv)
            total += float(ln) * kvals * trig(2.0 * math.pi * n * x)
        return form.rho1 * 2.0 * np.sqrt(y) * total

    evaluate.decays_at_cusp = True
    return evaluate


def holo_pair_density(t1: CoefficientTable, t2: CoefficientTable
                      ) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Grid evaluator of y^k conj(f1(z)) f2(z) for equal-weight tables."""
    if t1.weight != t2.weight:
        raise DomainError("tables must share a weight")
    k = t1.weight

    def evaluate(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        f1 = np.zeros(x.shape, dtype=np.complex128)
        f2 = np.zeros(x.shape, dtype=np.complex128)
        y_min = float(np.min(y))
        for i in range(min(t1.length, t2.length, 256)):
            n = i + 1
            if 2.0 * math.pi * n * y_min > 760.0 and n > 4:
                break
            e = np.exp(2j * math.pi * n * x - 2.0 * math.pi * n * y)
            f1 += float(t1.raw[i]) * e
            f2 += float(t2.raw[i]) * e
        return y ** k * np.conj(f1) * f2

    evaluate.decays_at_cusp = True
    return evaluate


def eisenstein_grid(k: int, s: complex, completion: str = "raw",
                    precision: PrecisionConfig | None = None, n_terms: int = 12
                    ) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Grid evaluator of the weight-k Eisenstein series via its Fourier
    expansion (completed or raw)."""
    quad = _cfg(precision)
    params = EisensteinParams(weight=k, s=complex(s), completion=completion)
    s = complex(s)
    factor = 1.0 if completion == "completed" \
        else 1.0 / _eis_completion_factor(k, s)
    mu0 = s - 0.5
    # On the critical line at weight 0 the Whittaker factor collapses to
    # W_{0,it}(v) = sqrt(v/pi) K_it(v/2), so one shared K table replaces
    # n_terms separate Whittaker grids.
    on_line = k == 0 and abs(mu0.real) < 1e-12 and mu0.imag != 0.0
    cache: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}

    def _critical_line(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        w_min = 2.0 * math.pi * float(np.min(y)) * 0.999
        w_max = 2.0 * math.pi * n_terms * float(np.max(y)) * 1.001
        key = (round(w_min, 9), round(w_max, 9))
        if key not in cache:
            cache.clear()
            cache[key] = _k_bessel_table(abs(mu0.imag), w_min, w_max, quad,
                                         n_nodes=6000)
        grid, kv = cache[key]
        total = np.asarray(_eis_constant_term(0, s, y), dtype=np.complex128)
        for n in range(1, n_terms + 1):
            cp, _ = _eis_fourier_coeff(0, s, n)
            kvals = np.interp(2.0 * math.pi * n * y, grid, kv)
            wp = 2.0 * np.sqrt(n * y) * kvals
            total += cp * wp * 2.0 * np.cos(2.0 * math.pi * n * x)
        return factor * total

    def evaluate(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if on_line:
            return _critical_line(x, y)
        flat_y, inverse = np.unique(np.round(y.ravel(), 14),
                                    return_inverse=True)
        total = np.asarray(_eis_constant_term(k, s, y), dtype=np.complex128)
        mu = s - 0.5
        for n in range(1, n_terms + 1):
            cp, cm = _eis_fourier_coeff(k, s, n)
            wp_flat = _whittaker_w_grid(k / 2.0, mu,
                                        4.0 * math.pi * n * flat_y, quad)
            wp = wp_flat[inverse].reshape(y.shape)
            if k == 0:
                wm = wp
            elif cm == 0.0:
                wm = np.zeros_like(wp)
            else:
                wm_flat = _whittaker_w_grid(-k / 2.0, mu,
                                            4.0 * math.pi * n * flat_y, quad)
                wm = wm_flat[inverse].reshape(y.shape)
            total += cp * wp * np.exp(2j * math.pi * n * x) \
                + cm * wm * np.exp(-2j * math.pi * n * x)
        return factor * total

    evaluate.decays_at_cusp = False
    return evaluate


def poincare_grid(h: int, s: complex, window: float = 40.0
                  ) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Grid evaluator of the Poincare series by a windowed coset sum."""
    if h < 1:
        raise DomainError("poincare_grid needs h >= 1")
    s = complex(s)

    def evaluate(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        z = x + 1j * y
        total = np.exp(s * np.log(y) + 2j * math.pi * h * z)
        y_min = float(np.min(y))
        x_lo, x_hi = float(np.min(x)), float(np.max(x))
        c = 1
        while c * y_min <= window:
            span_sq = window * window - (c * y_min) ** 2
            span = math.sqrt(span_sq)
            lo = math.ceil(-c * x_hi - span)
            hi = math.floor(-c * x_lo + span)
            for d in range(lo, hi + 1):
                if math.gcd(d, c) != 1:
                    continue
                a = pow(d % c, -1, c)
                w = c * z + d
                gz = a / c - 1.0 / (c * w)
                total += np.exp(s * (np.log(y) - 2.0 * np.log(np.abs(w)))
                                + 2j * math.pi * h * gz)
            c += 1
        return total

    evaluate.decays_at_cusp = False
    return evaluate
