"""Closed forms for the measure family mu_k and the Jarlskog statistics.

Everything here is exact mathematics evaluated in floating point: the
normalization constants h_k, volumes, entropy averages, moments of Q, and
the distribution of x = sqrt(27 Q) (equivalently of |J| = x / (6 sqrt(3)))
under mu_k.  The distribution functions are power series with logarithmic
terms near x = 0 and plain power series near x = 1; each evaluation
reports which branch ran, how many terms it used, and a truncation bound.

Throughout, a_n denotes the squared-normalized hypergeometric coefficients

    a_n = (1/3)_n (2/3)_n / (n!)^2,

and A_n = 2 psi(n+1) - psi(n+1/3) - psi(n+2/3), which telescopes to
3 ln 3 - sum_{j=n+1}^{3n} 3/j and decays to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaln as _gammaln, polygamma as _polygamma, psi as _psi

__all__ = [
    "SeriesEvaluation",
    "ClosedFormTable",
    "digamma",
    "log_gamma",
    "pochhammer",
    "gauss_2f1_onethird",
    "h_k",
    "volume_ratio",
    "closed_form_table",
    "mean_entropy_mu",
    "mean_generalized_entropy_mu",
    "mean_generalized_entropy_b3",
    "b3_integral",
    "b3_q_integrals",
    "q_moments",
    "density_f12",
    "density_absj",
    "cdf_absj",
    "cdf_absj_values",
    "likelihood_ratio_at",
    "ABSJ_MAX",
]

#: |J| ranges over [0, 1/(6 sqrt(3))]; the maximum is attained at the flat matrix
ABSJ_MAX = 1.0 / (6.0 * math.sqrt(3.0))

_X_SCALE = 6.0 * math.sqrt(3.0)  # x = sqrt(27 Q) = 6 sqrt(3) |J|
_SQRT3_OVER_PI = math.sqrt(3.0) / math.pi
_MAX_TERMS = 600


@dataclass(frozen=True)
class SeriesEvaluation:
    """A numeric result together with how it was obtained.

    method is one of "series-near-0", "series-near-1" (which expansion of
    the function's argument ran) or "quadrature".  error_bound is an upper
    bound on the truncation/integration error, not a statistical estimate.
    """

    value: float
    method: str
    terms_used: int
    error_bound: float


@dataclass(frozen=True)
class ClosedFormTable:
    """The headline constants of mu_k in one row."""

    k: float
    h_k: float
    volume: float
    mean_entropy: float
    mean_j2: float


# ---------------------------------------------------------------------------
# gamma-family primitives


def _require_positive(x: float, name: str) -> float:
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise ValueError(f"{name} must be positive and finite, got {x}")
    return x


def digamma(x: float) -> float:
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    return float(_psi(_require_positive(x, "x")))


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    return float(_gammaln(_require_positive(x, "x")))


def pochhammer(x: float, n: int) -> float:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1) for x > 0, integer n >= 0."""
    _require_positive(x, "x")
    if n != int(n) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    out = 1.0
    for i in range(int(n)):
        out *= x + i
    return out


def _poch_any(x: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= x + i
    return out


# ---------------------------------------------------------------------------
# the hypergeometric 2F1(1/3, 2/3; 1; z)


@lru_cache(maxsize=4)
def _a_coeffs(n_max: int) -> tuple[float, ...]:
    """a_n = (1/3)_n (2/3)_n / (n!)^2 by recurrence."""
    a = [1.0]
    for n in range(n_max):
        a.append(a[-1] * (1.0 / 3.0 + n) * (2.0 / 3.0 + n) / ((n + 1.0) ** 2))
    return tuple(a)


@lru_cache(maxsize=4)
def _A_coeffs(n_max: int) -> tuple[float, ...]:
    """A_n = 2 psi(n+1) - psi(n+1/3) - psi(n+2/3) = 3 ln 3 - sum_{j=n+1}^{3n} 3/j."""
    vals = [3.0 * math.log(3.0)]
    for n in range(1, n_max + 1):
        # going n-1 -> n adds j in {3n-2, 3n-1, 3n} to the sum, removes j = n
        vals.append(
            vals[-1]
            - 3.0 / (3.0 * n - 2.0)
            - 3.0 / (3.0 * n - 1.0)
            - 1.0 / n
            + 3.0 / n
        )
    return tuple(vals)


def gauss_2f1_onethird(z: float, tol: float = 1e-14) -> SeriesEvaluation:
    """2F1(1/3, 2/3; 1; z) on -1 < z < 1.

    For z <= 1/2 the defining series; above that the expansion around z = 1,

        2F1 = (sqrt(3)/(2 pi)) * sum_n a_n (A_n - ln(1-z)) (1-z)^n,

    which converges since 1 - z < 1/2.  Values z >= 1 (logarithmic blowup)
    and z <= -1 (series divergence) are rejected.
    """
    z = float(z)
    if z >= 1.0 or z <= -1.0:
        raise ValueError(f"gauss_2f1_onethird needs -1 < z < 1, got z = {z}")
    if z <= 0.5:
        term = 1.0
        total = 1.0
        n = 0
        while abs(term) >= tol / 10.0 and n < _MAX_TERMS:
            term *= (1.0 / 3.0 + n) * (2.0 / 3.0 + n) / ((n + 1.0) ** 2) * z
            total += term
            n += 1
        bound = abs(term) * abs(z) / (1.0 - abs(z))
        return SeriesEvaluation(total, "series-near-0", n + 1, bound)

    t = 1.0 - z
    log_t = math.log(t)
    a = _a_coeffs(_MAX_TERMS)
    A = _A_coeffs(_MAX_TERMS)
    scale = _SQRT3_OVER_PI / 2.0
    total = 0.0
    tn = 1.0
    term = scale * (A[0] - log_t)
    n = 0
    while abs(term) >= tol / 10.0 and n < _MAX_TERMS:
        total += term
        n += 1
        tn *= t
        term = scale * a[n] * (A[n] - log_t) * tn
    total += term
    bound = abs(term) * t / (1.0 - t)
    return SeriesEvaluation(total, "series-near-1", n + 1, bound)


# ---------------------------------------------------------------------------
# normalization constants, volumes, moments


def _ln_h(k: float) -> float:
    return math.log(math.pi) + 3.0 * float(_gammaln(k)) - math.log(2.0 * k - 1.0) - float(_gammaln(3.0 * k))


def h_k(k: float) -> float:
    """h_k = pi Gamma(k)^3 / ((2k-1) Gamma(3k)), the mu_k normalization.

    h_1 = pi/2, h_{3/2} = pi^2/105, h_2 = pi/360.  Needs k > 1/2.
    """
    k = float(k)
    if not k > 0.5:
        raise ValueError(f"h_k needs k > 0.5, got k = {k}")
    return math.exp(_ln_h(k))


def volume_ratio() -> float:
    """Volume of the unistochastic set over the volume of the polytope.

    The unistochastic set has flat volume 9 h_{3/2}, the whole polytope
    9/8, so the ratio is 8 h_{3/2} = 8 pi^2 / 105, about 0.752.
    """
    return 8.0 * h_k(1.5)


def q_moments(k: float, n: int) -> float:
    """<Q^n> under mu_k, equal to h_{k+n} / h_k.

    Closed form 3^(-3n) (k-1/2) ((k)_n)^2 / ((k+n-1/2) (k+1/3)_n (k+2/3)_n).
    <Q>_1 = 1/180, <Q>_{3/2} = 3/286; n = 0 gives exactly 1.
    """
    k = float(k)
    if not k > 0.5:
        raise ValueError(f"q_moments needs k > 0.5, got k = {k}")
    if n != int(n) or n < 0:
        raise ValueError(f"moment order must be a nonnegative integer, got {n}")
    n = int(n)
    if n == 0:
        return 1.0
    return math.exp(_ln_h(k + n) - _ln_h(k))


def mean_entropy_mu(k: float) -> float:
    """<S> under mu_k: psi(3k+1) - psi(k+1).

    5/6 at k = 1, 286/315 at k = 3/2, 19/20 at k = 2.
    """
    k = float(k)
    if not k > 0.5:
        raise ValueError(f"mean_entropy_mu needs k > 0.5, got k = {k}")
    return float(_psi(3.0 * k + 1.0) - _psi(k + 1.0))


def mean_generalized_entropy_mu(k: float, q: float) -> float:
    """<S_q> under mu_k: (1/(q-1)) (1 - 3 Gamma(k+q) Gamma(3k) / (Gamma(k) Gamma(3k+q))).

    Continuous across q = 1 where it equals the entropy average; evaluated
    there by its quadratic Taylor development to dodge the 0/0.
    """
    k = float(k)
    q = float(q)
    if not k > 0.5:
        raise ValueError(f"mean_generalized_entropy_mu needs k > 0.5, got k = {k}")
    if q < 0.0:
        raise ValueError(f"generalized entropy order must satisfy q >= 0, got {q}")
    if abs(q - 1.0) < 1e-6:
        a = float(_psi(k + 1.0) - _psi(3.0 * k + 1.0))  # G'(1)
        b = float(_polygamma(1, k + 1.0) - _polygamma(1, 3.0 * k + 1.0))  # G''(1)
        return -a - 0.5 * (b + a * a) * (q - 1.0)
    g = (
        math.log(3.0)
        + float(_gammaln(k + q))
        - float(_gammaln(k))
        + float(_gammaln(3.0 * k))
        - float(_gammaln(3.0 * k + q))
    )
    return -math.expm1(g) / (q - 1.0)


def mean_generalized_entropy_b3(q: float) -> float:
    """<S_q> under the flat polytope measure: 2/(q+1) + 4/(q+2) - 9/(q+3) + 4/(q+4).

    A single rational function of q, already continuous at q = 1 where it
    equals 53/60; 2 at q = 0 and 8/15 at q = 2.
    """
    q = float(q)
    if q < 0.0:
        raise ValueError(f"generalized entropy order must satisfy q >= 0, got {q}")
    return 2.0 / (q + 1.0) + 4.0 / (q + 2.0) - 9.0 / (q + 3.0) + 4.0 / (q + 4.0)


def b3_integral(f: Callable[[float, float], float], tol: float = 1e-12) -> SeriesEvaluation:
    """Integral over the polytope of a function of (b1, b2) alone.

    Uses the exact marginalization of the flat measure onto the first row:

        integral f db = int_0^1 db1 int_0^(1-b1) f(b1, b2)
                        * (b1 b2 + (b1 + b2)(1 - b1 - b2)) db2.

    Unnormalized: f = 1 integrates to 1/8.  Raises if the quadrature cannot
    certify the requested absolute tolerance, quoting the achieved bound.
    """
    evals = 0

    def weighted(b2: float, b1: float) -> float:
        nonlocal evals
        evals += 1
        return f(b1, b2) * (b1 * b2 + (b1 + b2) * (1.0 - b1 - b2))

    value, abserr = integrate.dblquad(
        weighted, 0.0, 1.0, 0.0, lambda b1: 1.0 - b1, epsabs=tol / 4.0, epsrel=1e-13
    )
    if abserr > tol:
        raise RuntimeError(
            f"quadrature reached absolute error {abserr:.3e}, above the requested {tol:.3e}"
        )
    return SeriesEvaluation(float(value), "quadrature", evals, float(abserr))


def b3_q_integrals() -> tuple[float, float, float]:
    """(<Q>, <Q^2>, sigma_Q) under the flat polytope measure.

    <Q> = 1/168, <Q^2> = 1/5940, so sigma_Q = sqrt(1/5940 - 1/28224),
    about 0.01153.
    """
    m1 = 1.0 / 168.0
    m2 = 1.0 / 5940.0
    return m1, m2, math.sqrt(m2 - m1 * m1)


def closed_form_table(k: float) -> ClosedFormTable:
    """The constants of mu_k: h_k, embedded volume 9 h_k, <S>, <J^2>.

    <J^2> = <Q>/4 = h_(k+1) / (4 h_k); at k = 3/2 the volume field is the
    flat 4-volume of the unistochastic set, 9 pi^2 / 105.
    """
    k = float(k)
    return ClosedFormTable(
        k=k,
        h_k=h_k(k),
        volume=9.0 * h_k(k),
        mean_entropy=mean_entropy_mu(k),
        mean_j2=q_moments(k, 1) / 4.0,
    )


# ---------------------------------------------------------------------------
# the distribution of x = sqrt(27 Q) and of |J|


def _c_k(k: float) -> float:
    return math.exp(float(_gammaln(k + 1.0 / 3.0) + _gammaln(k + 2.0 / 3.0) - 2.0 * _gammaln(k)))


@lru_cache(maxsize=4)
def _g_coeffs(p_max: int) -> tuple[float, ...]:
    """g_p of 2F1(1/3,2/3;1;v) (1-v)^(-1/2) = sum_p g_p v^p, all positive."""
    a = _a_coeffs(p_max)
    half = [1.0]  # (1/2)_j / j!
    for j in range(p_max):
        half.append(half[-1] * (0.5 + j) / (j + 1.0))
    return tuple(
        sum(a[n] * half[p - n] for n in range(p + 1)) for p in range(p_max + 1)
    )


@lru_cache(maxsize=32)
def _tau_coeffs(k: float, r_max: int) -> tuple[float, ...]:
    """tau_r (r >= 1) with 1 - F0(x) = c_k (k-1/2) sum_r tau_r V^(r+1)/(r+1), V = 1-x^2."""
    g = _g_coeffs(r_max)
    shifted = [1.0]  # (3/2-k)_j / j!
    for j in range(r_max):
        shifted.append(shifted[-1] * (1.5 - k + j) / (j + 1))
    tau = []
    for r in range(1, r_max + 1):
        tau.append(sum(g[m - 1] / m * shifted[r - m] for m in range(1, r + 1)))
    return tuple(tau)


def _check_k(k: float) -> float:
    k = float(k)
    if not k > 0.5:
        raise ValueError(f"the measure family needs k > 0.5, got k = {k}")
    return k


def _x_from_y(y: float) -> float:
    y = float(y)
    if y < -1e-15 or y > ABSJ_MAX * (1.0 + 1e-12):
        raise ValueError(f"|J| values live in [0, {ABSJ_MAX:.17g}], got {y}")
    return min(max(y, 0.0) * _X_SCALE, 1.0)


def density_f12(k: float, x: float, tol: float = 1e-14) -> SeriesEvaluation:
    """Density c_k x^(k-1) 2F1(1/3, 2/3; 1; 1-x) on (0, 1].

    This is the law of the squared-area factor before the final Beta mixing;
    the method tag describes the position of x itself.
    """
    k = _check_k(k)
    x = float(x)
    if not 0.0 < x <= 1.0:
        raise ValueError(f"density_f12 needs 0 < x <= 1, got x = {x}")
    inner = gauss_2f1_onethird(1.0 - x, tol=tol)
    pref = _c_k(k) * x ** (k - 1.0)
    method = "series-near-0" if x <= 0.5 else "series-near-1"
    return SeriesEvaluation(pref * inner.value, method, inner.terms_used, pref * inner.error_bound)


def _f0_small(k: float, x: float, tol: float) -> SeriesEvaluation:
    """f0(x) = 2 c_k (k-1/2) x^(2k-2) (3 - I(x^2)) via the log series, x <= 1/2."""
    pref = 2.0 * _c_k(k) * (k - 0.5) * x ** (2.0 * k - 2.0)
    if x == 0.0:
        return SeriesEvaluation(3.0 * pref, "series-near-0", 1, 0.0)
    a = _a_coeffs(_MAX_TERMS)
    A = _A_coeffs(_MAX_TERMS)
    log_x = math.log(x)
    xsq = x * x
    total = 0.0
    xpow = x
    n = 0
    while n < _MAX_TERMS:
        term = a[n] * xpow / (2 * n + 1) * (A[n] - 2.0 * log_x + 2.0 / (2 * n + 1))
        total += term
        if pref * _SQRT3_OVER_PI * term < tol / 10.0:
            break
        xpow *= xsq
        n += 1
    bound = pref * _SQRT3_OVER_PI * term * xsq / (1.0 - xsq)
    value = pref * (3.0 - _SQRT3_OVER_PI * total)
    return SeriesEvaluation(value, "series-near-0", n + 1, bound)


def _f0_large(k: float, x: float, tol: float) -> SeriesEvaluation:
    """f0 via 3 - I(x^2) = sum_p g_p V^(p+1)/(p+1), V = 1 - x^2 < 3/4."""
    pref = 2.0 * _c_k(k) * (k - 0.5) * x ** (2.0 * k - 2.0)
    v = 1.0 - x * x
    g = _g_coeffs(_MAX_TERMS)
    total = 0.0
    vpow = v
    p = 0
    while p < _MAX_TERMS:
        term = g[p] * vpow / (p + 1)
        total += term
        if pref * term < tol / 10.0:
            break
        vpow *= v
        p += 1
    bound = pref * term * v / (1.0 - v) if v > 0.0 else 0.0
    return SeriesEvaluation(pref * total, "series-near-1", p + 1, bound)


def density_absj(k: float, y: float, tol: float = 1e-14) -> SeriesEvaluation:
    """Density of |J| under mu_k at y in [0, 1/(6 sqrt(3))].

    Equal to 6 sqrt(3) f0(6 sqrt(3) y) where f0 is the density of
    x = sqrt(27 Q).  At k = 1 the density starts at 8 pi for y -> 0 and
    falls to zero at the endpoint.
    """
    k = _check_k(k)
    x = _x_from_y(y)
    inner = _f0_small(k, x, tol / _X_SCALE) if x <= 0.5 else _f0_large(k, x, tol / _X_SCALE)
    return SeriesEvaluation(
        _X_SCALE * inner.value, inner.method, inner.terms_used, _X_SCALE * inner.error_bound
    )


def _cdf_small(k: float, x: float, tol: float) -> SeriesEvaluation:
    pref = 2.0 * _c_k(k) * (k - 0.5) * x ** (2.0 * k - 1.0)
    if x == 0.0:
        return SeriesEvaluation(0.0, "series-near-0", 1, 0.0)
    a = _a_coeffs(_MAX_TERMS)
    A = _A_coeffs(_MAX_TERMS)
    log_x = math.log(x)
    xsq = x * x
    total = 0.0
    xpow = x
    n = 0
    while n < _MAX_TERMS:
        c_n = A[n] + 2.0 / (2 * n + 1) + 1.0 / (n + k)
        term = a[n] * xpow / ((2 * n + 1) * (n + k)) * (c_n - 2.0 * log_x)
        total += term
        if pref * term * _SQRT3_OVER_PI / 2.0 < tol / 10.0:
            break
        xpow *= xsq
        n += 1
    bound = pref * _SQRT3_OVER_PI / 2.0 * term * xsq / (1.0 - xsq)
    value = pref * (3.0 / (2.0 * k - 1.0) - _SQRT3_OVER_PI / 2.0 * total)
    return SeriesEvaluation(value, "series-near-0", n + 1, bound)


def _cdf_large(k: float, x: float, tol: float) -> SeriesEvaluation:
    scale = _c_k(k) * (k - 0.5)
    v = 1.0 - x * x
    if v <= 0.0:
        return SeriesEvaluation(1.0, "series-near-1", 1, 0.0)
    tau = _tau_coeffs(k, _MAX_TERMS)
    total = 0.0
    vpow = v * v
    r = 1
    while r <= _MAX_TERMS:
        term = tau[r - 1] * vpow / (r + 1)
        total += term
        if scale * abs(term) < tol / 10.0:
            break
        vpow *= v
        r += 1
    bound = scale * abs(term) * v / (1.0 - v)
    return SeriesEvaluation(1.0 - scale * total, "series-near-1", r, bound)


def cdf_absj(k: float, y: float, tol: float = 1e-14) -> SeriesEvaluation:
    """P(|J| <= y) under mu_k, for y in [0, 1/(6 sqrt(3))].

    Series around x = 0 below x = 1/2 (with the x^(2k-1) ln x structure),
    series in V = 1 - x^2 above; F(0) = 0 and F at the right endpoint is
    exactly 1.
    """
    k = _check_k(k)
    x = _x_from_y(y)
    return _cdf_small(k, x, tol) if x <= 0.5 else _cdf_large(k, x, tol)


def cdf_absj_values(k: float, ys, tol: float = 1e-14) -> np.ndarray:
    """Vectorized cdf_absj over an array of |J| values (values only).

    Fixed-length Horner evaluation of the same two series; agrees with the
    scalar version to the stated tolerance.
    """
    k = _check_k(k)
    y = np.asarray(ys, dtype=float)
    if y.size and (y.min() < -1e-15 or y.max() > ABSJ_MAX * (1.0 + 1e-12)):
        raise ValueError(f"|J| values live in [0, {ABSJ_MAX:.17g}]")
    x = np.minimum(np.clip(y, 0.0, None) * _X_SCALE, 1.0)
    out = np.empty_like(x)

    n_small = 64
    a = np.array(_a_coeffs(n_small)[: n_small + 1])
    A = np.array(_A_coeffs(n_small)[: n_small + 1])
    ns = np.arange(n_small + 1)
    c = A + 2.0 / (2 * ns + 1) + 1.0 / (ns + k)
    w = a / ((2 * ns + 1) * (ns + k))

    small = x <= 0.5
    xs = x[small]
    pos = xs > 0.0
    xsq = xs * xs
    p_const = np.zeros_like(xs)
    p_log = np.zeros_like(xs)
    for coef_c, coef_w in zip((w * c)[::-1], w[::-1]):
        p_const = p_const * xsq + coef_c
        p_log = p_log * xsq + coef_w
    log_x = np.where(pos, np.log(np.where(pos, xs, 1.0)), 0.0)
    series = xs * (p_const - 2.0 * log_x * p_log)
    pref = 2.0 * _c_k(k) * (k - 0.5) * np.where(pos, xs, 1.0) ** (2.0 * k - 1.0)
    vals = pref * (3.0 / (2.0 * k - 1.0) - 0.5 * _SQRT3_OVER_PI * series)
    out[small] = np.where(pos, vals, 0.0)

    r_max = 220
    tau = np.array(_tau_coeffs(k, r_max))
    v = 1.0 - x[~small] ** 2
    acc = np.zeros_like(v)
    weights = tau / np.arange(2, r_max + 2)
    for coef in weights[::-1]:
        acc = acc * v + coef
    out[~small] = 1.0 - _c_k(k) * (k - 0.5) * acc * v * v
    return out


def likelihood_ratio_at(y: float, tol: float = 1e-12) -> float:
    """Density ratio at |J| = y: Haar against the flat polytope measure.

    The flat measure puts weight 8 pi^2 / 105 on the unistochastic part,
    where it coincides with mu_{3/2}; the ratio is therefore

        density_absj(1, y) / (volume_ratio() * density_absj(3/2, y)).
    """
    num = density_absj(1.0, y, tol=tol).value
    den = volume_ratio() * density_absj(1.5, y, tol=tol).value
    return num / den
