import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from dagster import get_dagster_logger
from scipy.integrate import quad

ComplexValue = complex
ArrayLike = Union[float, np.ndarray]

# Lanczos approximation, g = 7, nine coefficients (relative accuracy ~1e-15 on (0, 171))
LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

# Mittag-Leffler evaluation constants
SWITCH_RADIUS = 40.0
SECTOR_MARGIN = 0.05
ASYMPTOTIC_TERMS = 10
DEFAULT_TOL = 1e-12

logger = get_dagster_logger()


class DomainError(ValueError):
    """Raised when a special function is asked for a value outside its supported domain."""


@dataclass(frozen=True)
class MLParams:
    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"Mittag-Leffler alpha must lie in (0, 1], got {self.alpha}")
        if not math.isfinite(self.beta):
            raise ValueError(f"Mittag-Leffler beta must be finite, got {self.beta}")


@dataclass(frozen=True)
class SectorConfig:
    phi0: float

    def __post_init__(self):
        if not (0.0 < self.phi0 < math.pi / 2):
            raise ValueError(f"Sector angle phi0 must lie in (0, pi/2), got {self.phi0}")

    def contains(self, z: complex) -> bool:
        """Whether z lies in the closed sector |arg z| <= phi0 (the origin included)."""
        if z == 0:
            return True
        return abs(cmath.phase(z)) <= self.phi0


# Gamma function family

def _lanczos_sum(x: np.ndarray) -> np.ndarray:
    # x is already shifted by one, as in the classic formulation
    total = np.full_like(x, LANCZOS_COEFFICIENTS[0])
    for i in range(1, len(LANCZOS_COEFFICIENTS)):
        total = total + LANCZOS_COEFFICIENTS[i] / (x + i)
    return total


def _is_pole(x: np.ndarray) -> np.ndarray:
    return (x <= 0) & (x == np.floor(x))


def gamma(x: ArrayLike) -> ArrayLike:
    """Gamma function by the Lanczos approximation, with reflection below 1/2. Poles give inf."""
    arr = np.asarray(x, dtype=float)
    out = np.empty_like(arr)
    small = arr < 0.5
    poles = _is_pole(arr)

    xs = arr[~small] - 1.0
    t = xs + LANCZOS_G + 0.5
    out[~small] = math.sqrt(2 * math.pi) * t ** (xs + 0.5) * np.exp(-t) * _lanczos_sum(xs)

    refl = small & ~poles
    if np.any(refl):
        xr = arr[refl]
        out[refl] = math.pi / (np.sin(math.pi * xr) * gamma(1.0 - xr))
    out[poles] = np.inf
    return out if out.ndim else float(out)


def lgamma(x: ArrayLike) -> ArrayLike:
    """log|Gamma(x)|, finite for large arguments where gamma() overflows."""
    arr = np.asarray(x, dtype=float)
    out = np.empty_like(arr)
    small = arr < 0.5
    poles = _is_pole(arr)

    xs = arr[~small] - 1.0
    t = xs + LANCZOS_G + 0.5
    out[~small] = 0.5 * math.log(2 * math.pi) + (xs + 0.5) * np.log(t) - t + np.log(_lanczos_sum(xs))

    refl = small & ~poles
    if np.any(refl):
        xr = arr[refl]
        out[refl] = math.log(math.pi) - np.log(np.abs(np.sin(math.pi * xr))) - lgamma(1.0 - xr)
    out[poles] = np.inf
    return out if out.ndim else float(out)


def gamma_sign(x: ArrayLike) -> ArrayLike:
    """Sign of Gamma(x); 0 at the poles."""
    arr = np.asarray(x, dtype=float)
    sign = np.where(arr > 0, 1.0, np.where(np.floor(arr) % 2 == 0, 1.0, -1.0))
    sign = np.where(_is_pole(arr), 0.0, sign)
    return sign if sign.ndim else float(sign)


def rgamma(x: ArrayLike) -> ArrayLike:
    """Reciprocal gamma function, exactly zero at the poles."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    regular = ~_is_pole(arr)
    moderate = regular & (np.abs(arr) < 170.0)
    out[moderate] = 1.0 / gamma(arr[moderate])
    large = regular & ~moderate
    out[large] = gamma_sign(arr[large]) * np.exp(-lgamma(arr[large]))
    return out if out.ndim else float(out)


# Mittag-Leffler function

def _series_log_peak(p: MLParams, modulus: float) -> float:
    # Stirling estimate of log max_k |z|^k / Gamma(alpha k + beta)
    return modulus ** (1.0 / p.alpha) + (1.0 - p.beta) / p.alpha * math.log(modulus) - math.log(p.alpha)


def _series_is_safe(p: MLParams, z: complex, tol: float) -> bool:
    modulus = abs(z)
    if modulus <= 1.0:
        return True
    budget = math.log(tol / (64 * np.finfo(float).eps)) if tol > 64 * np.finfo(float).eps else -math.inf
    return _series_log_peak(p, modulus) <= budget


def _ml_series(p: MLParams, z: complex, tol: float) -> complex:
    modulus = abs(z)
    log_mod = math.log(modulus)
    arg = cmath.phase(z)
    chunk = 64
    start = 0
    real_terms, imag_terms = [], []
    while True:
        k = np.arange(start, start + chunk + 1, dtype=float)
        x = p.alpha * k + p.beta
        log_mag = k * log_mod - lgamma(x)
        mag = gamma_sign(x) * np.exp(np.minimum(log_mag, 700.0))
        if z.imag == 0:
            terms = mag * np.sign(z.real) ** k + 0j
        else:
            terms = mag * np.exp(1j * k * arg)

        ratios = np.exp(log_mag[1:] - log_mag[:-1])
        # monotone ratios once alpha k + beta >= 2; the tail after term i is bounded geometrically
        tail = np.abs(mag[1:]) / np.maximum(1.0 - ratios, 1e-300)
        done = (x[:-1] >= 2.0) & (ratios < 1.0) & (tail <= tol / 4)
        if np.any(done):
            stop = int(np.argmax(done))
            real_terms.extend(terms[:stop + 1].real)
            imag_terms.extend(terms[:stop + 1].imag)
            break
        real_terms.extend(terms[:-1].real)
        imag_terms.extend(terms[:-1].imag)
        start += chunk
        if start > 100_000:
            raise DomainError(f"Mittag-Leffler series failed to converge at z={z}")
    return complex(math.fsum(real_terms), math.fsum(imag_terms))


def _ml_kernel(p: MLParams, chi: float, z: complex) -> complex:
    a, b = p.alpha, p.beta
    num = chi * math.sin(math.pi * (1 - b)) - z * math.sin(math.pi * (1 - b + a))
    den = chi * chi - 2 * chi * z * math.cos(a * math.pi) + z * z
    return chi ** ((1 - b) / a) * math.exp(-chi ** (1 / a)) * num / (den * a * math.pi)


def _ml_arc(p: MLParams, eps: float, phi: float, z: complex) -> complex:
    a, b = p.alpha, p.beta
    omega = eps ** (1 / a) * math.sin(phi / a) + phi * (1 + (1 - b) / a)
    scale = eps ** (1 + (1 - b) / a) * math.exp(eps ** (1 / a) * math.cos(phi / a)) / (2 * a * math.pi)
    return scale * cmath.exp(1j * omega) / (eps * cmath.exp(1j * phi) - z)


def _quad_complex(func, lower: float, upper: float, tol: float, points=None) -> complex:
    options = dict(epsabs=tol / 4, epsrel=0.0, limit=400)
    if points:
        options["points"] = [pt for pt in points if lower < pt < upper] or None
    re, re_err = quad(lambda x: func(x).real, lower, upper, **options)
    im, im_err = quad(lambda x: func(x).imag, lower, upper, **options)
    if re_err + im_err > tol:
        raise DomainError(f"Mittag-Leffler quadrature error estimate {re_err + im_err:.2e} exceeds tol={tol:.1e}")
    return complex(re, im)


def _kernel_upper_limit(p: MLParams, z: complex, tol: float) -> float:
    rho = tol / 4
    if p.beta >= 0:
        return max(1.0, 2 * abs(z), (-math.log(math.pi * rho / 6)) ** p.alpha)
    ab = abs(p.beta)
    return max((ab + 1) ** p.alpha, 2 * abs(z),
               (-2 * math.log(math.pi * rho / (6 * (ab + 2) * (2 * ab) ** ab))) ** p.alpha)


def _contour_upper_limit(p: MLParams, z: complex, decay: float, tol: float) -> float:
    # s = r^(1/alpha): integrand on the rays is bounded by s^(1-beta) exp(-decay s)
    s = max(1.0, -math.log(tol / 16) / decay)
    while (1 - p.beta) * math.log(s) - decay * s > math.log(tol / 16):
        s *= 1.25
    return max(2 * abs(z) + 1.0, s ** p.alpha)


def _ml_contour(p: MLParams, z: complex, tol: float) -> complex:
    """
    Hankel contour with rays at +-delta, delta = 3 alpha pi / 4, joined by the unit arc.
    Used where |arg z| is close to alpha*pi, so z stays left of the contour and no residue is added.
    """
    a, b = p.alpha, p.beta
    delta = 0.75 * a * math.pi
    radius = 1.0
    decay = -math.cos(delta / a)
    upper = _contour_upper_limit(p, z, decay, tol)
    # the ray integrands have dropped by e^-10 past this radius
    bulk = (10.0 / decay) ** a

    def g(zeta: complex) -> complex:
        return cmath.exp(zeta ** (1 / a)) * zeta ** ((1 - b) / a) / (zeta - z)

    out_ray, in_ray = cmath.exp(1j * delta), cmath.exp(-1j * delta)
    scale = 1 / (2j * math.pi * a)
    # split tolerance over the three pieces after scaling
    piece_tol = tol * 2 * math.pi * a / 3
    value = _quad_complex(lambda r: g(r * out_ray) * out_ray, radius, upper, piece_tol, points=[abs(z), bulk])
    value -= _quad_complex(lambda r: g(r * in_ray) * in_ray, radius, upper, piece_tol, points=[abs(z), bulk])
    value += _quad_complex(lambda phi: g(radius * cmath.exp(1j * phi)) * 1j * radius * cmath.exp(1j * phi),
                           -delta, delta, piece_tol)
    return value * scale


def _ml_integral(p: MLParams, z: complex, tol: float) -> complex:
    a, b = p.alpha, p.beta
    arg = abs(cmath.phase(z))
    # the real-axis kernel has a pole on the path when |arg z| = alpha*pi
    if abs(arg - a * math.pi) < a * math.pi / 8:
        return _ml_contour(p, z, tol)
    chi0 = _kernel_upper_limit(p, z, tol)
    pole = 0j
    if arg < a * math.pi:
        pole = z ** ((1 - b) / a) * cmath.exp(z ** (1 / a)) / a

    if b < 1 + a:
        value = _quad_complex(lambda chi: _ml_kernel(p, chi, z), 0.0, chi0, tol, points=[abs(z)])
        return value + pole

    eps = 1.0 if arg > a * math.pi else min(1.0, abs(z) / 2)
    value = _quad_complex(lambda chi: _ml_kernel(p, chi, z), eps, max(chi0, 2 * eps), tol, points=[abs(z)])
    value += _quad_complex(lambda phi: _ml_arc(p, eps, phi, z), -a * math.pi, a * math.pi, tol)
    return value + pole


def _ml_asymptotic(p: MLParams, z: complex) -> complex:
    k = np.arange(1, ASYMPTOTIC_TERMS + 1, dtype=float)
    coeffs = rgamma(p.beta - p.alpha * k)
    value = -complex(np.sum(coeffs * np.power(complex(z), -k)))
    if abs(cmath.phase(z)) < p.alpha * math.pi:
        value += z ** ((1 - p.beta) / p.alpha) * cmath.exp(z ** (1 / p.alpha)) / p.alpha
    return value


def mittag_leffler(p: MLParams, z: ComplexValue, tol: float = DEFAULT_TOL) -> ComplexValue:
    """
    Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for 0 < alpha <= 1.

    Branches:
    - power series (exactly summed with math.fsum) when the terms are small enough that
      rounding stays below tol;
    - the integral representation for the remaining |z| <= 40: along the real axis, or along
      a Hankel contour with rays at +-3 alpha pi/4 when |arg z| is near alpha*pi;
    - the inverse-power asymptotic expansion with 10 terms for |z| > 40 and
      |arg z| >= alpha*pi/2 + 0.05.

    Large |z| inside the growth sector raises DomainError, as does a quadrature whose error
    estimate exceeds tol.
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"Mittag-Leffler argument must be finite, got {z}")
    if z == 0:
        return complex(rgamma(p.beta))
    if p.alpha == 1.0 and p.beta == 1.0:
        value = cmath.exp(z)
    elif abs(z) > SWITCH_RADIUS:
        if abs(cmath.phase(z)) < p.alpha * math.pi / 2 + SECTOR_MARGIN:
            raise DomainError(f"Mittag-Leffler argument z={z} is outside supported domain "
                              f"(|z| > {SWITCH_RADIUS} inside the growth sector)")
        logger.debug(f"E_({p.alpha},{p.beta})({z}): asymptotic expansion")
        value = _ml_asymptotic(p, z)
    elif _series_is_safe(p, z, tol):
        logger.debug(f"E_({p.alpha},{p.beta})({z}): power series")
        value = _ml_series(p, z, tol)
    else:
        logger.debug(f"E_({p.alpha},{p.beta})({z}): integral representation")
        value = _ml_integral(p, z, tol)

    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"Mittag-Leffler value at z={z} is not representable")
    return value


def ml_derivative(order_m: int, alpha: float, lam: ComplexValue, t: float,
                  tol: float = DEFAULT_TOL) -> ComplexValue:
    """m-th derivative of t -> E_alpha(lam t^alpha), equal to t^-m E_{alpha,1-m}(lam t^alpha)."""
    if order_m < 1:
        raise ValueError(f"Derivative order must be >= 1, got {order_m}")
    if t <= 0:
        raise ValueError(f"Derivative is evaluated for t > 0, got t={t}")
    if lam == 0:
        return 0j
    value = mittag_leffler(MLParams(alpha, 1.0 - order_m), complex(lam) * t ** alpha, tol)
    return value * t ** (-order_m)


# Hypergeometric and incomplete beta functions

def gauss_2f1(a: float, b: float, c: float, x: ArrayLike, tol: float = 1e-15,
              max_terms: int = 200_000) -> ArrayLike:
    """Gauss hypergeometric function F(a, b; c; x) for real x in [0, 1]."""
    if c <= 0 and c == math.floor(c):
        raise DomainError(f"F(a,b;c;x) is undefined for nonpositive integer c={c}")
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0) or np.any(xs > 1) or np.any(~np.isfinite(xs)):
        raise DomainError(f"F(a,b;c;x) is evaluated for x in [0, 1], got {x}")

    out = np.empty_like(xs)
    at_one = xs == 1.0
    if np.any(at_one):
        if c - a - b <= 0:
            raise DomainError(f"F(a,b;c;1) diverges for c-a-b={c - a - b} <= 0")
        out[at_one] = math.exp(lgamma(c) + lgamma(c - a - b) - lgamma(c - a) - lgamma(c - b)) \
            * gamma_sign(c) * gamma_sign(c - a - b) * gamma_sign(c - a) * gamma_sign(c - b)

    inner = xs[~at_one]
    if inner.size:
        term = np.ones_like(inner)
        total = np.ones_like(inner)
        active = np.ones_like(inner, dtype=bool)
        monotone_from = abs(a) + abs(b) + abs(c) + 2
        k = 0
        while np.any(active):
            ratio = (a + k) * (b + k) / ((c + k) * (k + 1))
            term = term * ratio * inner
            total = total + np.where(active, term, 0.0)
            k += 1
            if k > monotone_from:
                rho = np.maximum(abs((a + k) * (b + k) / ((c + k) * (k + 1))), 1.0) * inner
                tail = np.where(rho < 1.0, np.abs(term) * rho / np.maximum(1.0 - rho, 1e-300), np.inf)
                active = active & (tail > tol * np.maximum(1.0, np.abs(total)))
            if k > max_terms:
                raise DomainError(f"F({a},{b};{c};x) series did not converge within {max_terms} terms")
            if np.all(term == 0):
                break
        out[~at_one] = total
    return out if out.ndim else float(out)


def beta_function(p: float, q: float) -> float:
    return math.exp(lgamma(p) + lgamma(q) - lgamma(p + q))


def incomplete_beta(p: float, q: float, x: ArrayLike) -> ArrayLike:
    """
    Incomplete beta function B_x(p, q) through B_x(p,q) = x^p F(p, 1-q; p+1; x) / p.

    Arguments above 1/2 go through the reflection B_x(p,q) = B(p,q) - B_{1-x}(q,p) so the
    hypergeometric series is only ever summed on [0, 1/2].
    """
    if p <= 0 or q <= 0:
        raise DomainError(f"Incomplete beta requires p > 0 and q > 0, got p={p}, q={q}")
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0) or np.any(xs > 1) or np.any(~np.isfinite(xs)):
        raise DomainError(f"Incomplete beta is defined for x in [0, 1], got {x}")

    complete = beta_function(p, q)
    out = np.empty_like(xs)
    low = xs <= 0.5
    if np.any(low):
        xl = xs[low]
        out[low] = np.power(xl, p) * gauss_2f1(p, 1.0 - q, p + 1.0, xl) / p
    if np.any(~low):
        y = 1.0 - xs[~low]
        out[~low] = complete - np.power(y, q) * gauss_2f1(q, 1.0 - p, q + 1.0, y) / q
    out[xs == 0.0] = 0.0
    out[xs == 1.0] = complete
    return out if out.ndim else float(out)


def gl_weights(alpha: float, n: int) -> np.ndarray:
    """Grunwald-Letnikov weights (-1)^j C(alpha, j), j = 0..n, by the multiplicative recurrence."""
    if n < 0:
        raise ValueError(f"Number of weights must be nonnegative, got {n}")
    j = np.arange(1, n + 1, dtype=float)
    factors = (j - 1.0 - alpha) / j
    return np.concatenate(([1.0], np.cumprod(factors)))

