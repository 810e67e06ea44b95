"""Special functions for the Gaussian random walk formulas.

Riemann and Hurwitz zeta at real arguments, Lerch's transcendent with its
ln z expansion, Bernoulli numbers and polynomials, the standard normal CDF
and log-gamma.

Everything works in double precision. The series routines return
:class:`~gwmax.series.SeriesEval` so callers can see how many terms were
consumed and how large the truncation error may be.

Two ``*_scaled`` variants return ``zeta(s) * exp(log_scale)`` directly. They
exist because the power series in the walk formulas multiply zeta values of
very negative argument (which overflow) by ``x**r / r!`` (which underflows),
and only the product is of moderate size.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import erfcx

from .errors import BatemanInvalid, DomainError, PoleAtOne, ToleranceNotMet
from .series import DEFAULT_PRECISION, Precision, SeriesEval

__all__ = [
    "riemann_zeta",
    "riemann_zeta_scaled",
    "hurwitz_zeta",
    "hurwitz_zeta_scaled",
    "lerch_phi",
    "std_normal_cdf",
    "std_normal_pdf",
    "mills_ratio",
    "bernoulli_number",
    "bernoulli_poly",
    "log_gamma",
]

_EPS = 2.0 ** -52
_LN2 = math.log(2.0)
_LN2PI = math.log(2.0 * math.pi)
_LNPI = math.log(math.pi)
_SQRT_HALF = math.sqrt(0.5)
_BORWEIN_BASE = 3.0 + math.sqrt(8.0)
_MAX_BORWEIN_TERMS = 90


def _check_finite(**kwargs):
    for name, x in kwargs.items():
        if not math.isfinite(x):
            raise DomainError(f"{name} must be finite, got {x!r}")


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials
# ---------------------------------------------------------------------------

_BERNOULLI_TABLE_SIZE = 81


@lru_cache(maxsize=1)
def _bernoulli_table() -> tuple[Fraction, ...]:
    # sum_{j=0}^{n} C(n+1, j) B_j = 0, with B_1 = -1/2
    b = [Fraction(1)]
    for n in range(1, _BERNOULLI_TABLE_SIZE):
        acc = Fraction(0)
        c = 1
        for j in range(n):
            acc += c * b[j]
            c = c * (n + 1 - j) // (j + 1)
        b.append(-acc / (n + 1))
    return tuple(b)


def bernoulli_number(k: int) -> Fraction:
    """Exact Bernoulli number ``B_k`` for even ``2 <= k <= 40``."""
    if not isinstance(k, (int, np.integer)) or k % 2 or not 2 <= k <= 40:
        raise DomainError(f"bernoulli_number needs an even k in [2, 40], got {k!r}")
    return _bernoulli_table()[int(k)]


def _bernoulli_even_float(k: int) -> float:
    # internal; allows k up to the table size (used by the EM tails)
    return float(_bernoulli_table()[k])


def bernoulli_poly(k: int, t: float) -> float:
    """Bernoulli polynomial ``B_k(t)`` for ``0 <= k <= 40`` and ``t`` in [0, 1].

    Evaluated in exact rational arithmetic (``t`` is converted exactly from
    its binary value) and rounded once, since the monomial coefficients of
    ``B_40`` are some five orders of magnitude larger than its values.
    """
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= 40:
        raise DomainError(f"bernoulli_poly needs k in [0, 40], got {k!r}")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"bernoulli_poly needs t in [0, 1], got {t!r}")
    b = _bernoulli_table()
    tq = Fraction(t)
    acc = Fraction(0)
    for j in range(k + 1):
        acc = acc * tq + math.comb(k, j) * b[j]
    return float(acc)


# ---------------------------------------------------------------------------
# Gamma, normal distribution
# ---------------------------------------------------------------------------

def log_gamma(s: float) -> float:
    """``ln Gamma(s)`` for ``s > 0``."""
    _check_finite(s=s)
    if s <= 0:
        raise DomainError(f"log_gamma is only supported for s > 0, got {s!r}")
    return math.lgamma(s)


def std_normal_pdf(a):
    return math.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi)


def std_normal_cdf(a: float) -> float:
    """Standard normal distribution function ``P(a)``.

    Computed from the complementary error function on the left half-line; the
    right half-line is defined as ``1 - P(-a)`` so the symmetry identity holds
    to a single rounding.
    """
    _check_finite(a=a)
    if a <= 0.0:
        return 0.5 * math.erfc(-a * _SQRT_HALF)
    return 1.0 - 0.5 * math.erfc(a * _SQRT_HALF)


def mills_ratio(a):
    """``Q(a) / phi(a)`` with ``Q`` the upper normal tail; vectorised, no underflow."""
    return math.sqrt(0.5 * math.pi) * erfcx(np.asarray(a, dtype=float) * _SQRT_HALF)


# ---------------------------------------------------------------------------
# Riemann zeta
# ---------------------------------------------------------------------------

_HALF_STEP_SIN = (0.0, _SQRT_HALF, 1.0, _SQRT_HALF, 0.0, -_SQRT_HALF, -1.0, -_SQRT_HALF)


def _sin_half_pi(s: float) -> float:
    """``sin(pi*s/2)``, exact at multiples of 1/2."""
    t = math.remainder(s, 4.0)  # exact, in [-2, 2]
    if (2.0 * t).is_integer():
        return _HALF_STEP_SIN[int(2.0 * t) % 8]
    if t > 1.0:
        t = 2.0 - t
    elif t < -1.0:
        t = -2.0 - t
    return math.sin(0.5 * math.pi * t)


def _cos_half_pi(s: float) -> float:
    return _sin_half_pi(s + 1.0)


@lru_cache(maxsize=None)
def _borwein_weights(n: int) -> tuple[np.ndarray, float]:
    # Cohen-Rodriguez Villegas-Zagier weights for the alternating series
    d = np.empty(n + 1)
    term = 1.0 / n  # i = 0 term of n * sum (n+i-1)! 4^i / ((n-i)! (2i)!)
    acc = 0.0
    for i in range(n + 1):
        if i > 0:
            term *= 4.0 * (n + i - 1) * (n - i + 1) / ((2 * i - 1) * (2 * i))
        acc += term
        d[i] = n * acc
    w = (d[:n] - d[n]) / d[n]
    w.flags.writeable = False
    return w, float(d[n])


def _zeta_direct(s: float, tol: float, max_terms: int, one_minus_s: float = None) -> SeriesEval:
    """Zeta for ``s >= 1/2`` from the accelerated alternating series.

    ``one_minus_s`` lets a caller pass ``1 - s`` exactly when ``s`` itself was
    rounded next to the pole.
    """
    gap = 1.0 - s if one_minus_s is None else one_minus_s
    denom = -math.expm1(gap * _LN2)  # nonzero since s != 1
    scale = 3.0 / abs(denom)
    n_cap = min(_MAX_BORWEIN_TERMS, max_terms)
    for n in range(4, n_cap + 1, 2):
        bound = scale * _BORWEIN_BASE ** (-n)
        if bound <= 0.25 * tol or n >= n_cap - 1:
            break
    w, _ = _borwein_weights(n)
    k = np.arange(1, n + 1, dtype=float)
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    terms = signs * w * np.exp(-s * np.log(k))
    eta = -math.fsum(terms)
    value = eta / denom
    rounding = 4 * _EPS * float(np.sum(np.abs(terms))) / abs(denom)
    if bound > tol:
        raise ToleranceNotMet(f"riemann_zeta({s}): bound {bound:.3g} above {tol:.3g}")
    return SeriesEval(value, n, bound + rounding)


def riemann_zeta(s: float, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """Riemann zeta function at a real argument ``s != 1``.

    For ``s >= 1/2`` the alternating Dirichlet eta series is summed with the
    Cohen-Villegas-Zagier acceleration. For ``s < 1/2`` the functional
    equation maps the problem to ``1 - s > 1/2``.
    """
    _check_finite(s=s)
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOne("riemann_zeta has a pole at s = 1")
    if s >= 0.5:
        return _zeta_direct(s, prec.target_abs_tol, prec.max_terms)
    if abs(s) < 1e-10:
        # zeta(s) = -1/2 - s ln(2 pi)/2 + O(s^2), and |zeta''(0)| < 2.1
        return SeriesEval(-0.5 - 0.5 * s * _LN2PI, 0, 1.1 * s * s)
    sin_part = _sin_half_pi(s)
    if sin_part == 0.0:
        return SeriesEval(0.0, 0, 0.0)  # trivial zeros
    log_pref = s * _LN2 + (s - 1.0) * _LNPI + math.lgamma(1.0 - s)
    pref = math.exp(log_pref) * abs(sin_part)
    # full relative precision is cheap (about 22 accelerated terms); near the
    # pole at 1 - s = 1 the inner value grows like 1/|s|, so scale with it
    inner_tol = 8 * _EPS * max(1.0, 1.0 / abs(s))
    inner = _zeta_direct(1.0 - s, inner_tol, prec.max_terms, one_minus_s=s)
    value = math.copysign(pref, sin_part) * inner.value
    return SeriesEval(value, inner.terms_used, pref * inner.tail_bound + 4 * _EPS * abs(value))


def riemann_zeta_scaled(s: float, log_scale: float) -> float:
    """``zeta(s) * exp(log_scale)`` evaluated without intermediate overflow."""
    if s >= 0.5:
        return riemann_zeta(s).value * math.exp(log_scale)
    if abs(s) < 1e-10:
        return riemann_zeta(s).value * math.exp(log_scale)
    sin_part = _sin_half_pi(s)
    if sin_part == 0.0:
        return 0.0
    log_mag = s * _LN2 + (s - 1.0) * _LNPI + math.lgamma(1.0 - s) + log_scale
    inner = _zeta_direct(1.0 - s, 8 * _EPS * max(1.0, 1.0 / abs(s)), DEFAULT_PRECISION.max_terms,
                         one_minus_s=s)
    return sin_part * math.exp(log_mag) * inner.value


# ---------------------------------------------------------------------------
# Hurwitz zeta
# ---------------------------------------------------------------------------

_HURWITZ_FOURIER_BELOW = -2.0
_EM_MAX_ORDER = 38  # uses B_2 .. B_76


def _hurwitz_em(s: float, v: float, tol: float, max_terms: int) -> SeriesEval:
    """Direct head plus Euler-Maclaurin tail; any real ``s != 1``."""
    n = max(0, math.ceil(max(12.0, 0.5 * abs(s) + 4.0) - v))
    while True:
        x = n + v
        head = math.fsum((j + v) ** (-s) for j in range(n))
        corr = [x ** (1.0 - s) / (s - 1.0), 0.5 * x ** (-s)]
        # B_2k/(2k)! * s(s+1)...(s+2k-2) * x^(-s-2k+1)
        poch = s
        xpow = x ** (-s - 1.0)
        bound = math.inf
        prev = math.inf
        for k in range(1, _EM_MAX_ORDER + 1):
            t = _bernoulli_even_float(2 * k) / math.factorial(2 * k) * poch * xpow
            if abs(t) <= 0.1 * tol * 1e-3 or abs(t) > prev:
                bound = abs(t)
                break
            corr.append(t)
            prev = abs(t)
            poch *= (s + 2 * k - 1) * (s + 2 * k)
            xpow /= x * x
        else:
            bound = prev
        if bound <= tol:
            return SeriesEval(head + math.fsum(corr), n + len(corr) - 2, bound)
        if 2 * n + 16 > max_terms:
            raise ToleranceNotMet(f"hurwitz_zeta({s}, {v}): bound {bound:.3g} above {tol:.3g}")
        n = 2 * n + 16


def _hurwitz_fourier_scaled(s: float, v: float, log_scale: float, tol: float,
                            max_terms: int) -> tuple[float, int, float]:
    """Hurwitz's formula for ``s < -2``, ``0 < v <= 1``, scaled by ``exp(log_scale)``.

    zeta(s, v) = 2 Gamma(q) (2 pi)^-q sum_n cos(pi q/2 - 2 pi n v) / n^q,  q = 1 - s
    """
    q = 1.0 - s
    log_pref = _LN2 + math.lgamma(q) - q * _LN2PI + log_scale
    pref = math.exp(log_pref)
    # tail of sum n^-q beyond N is below N^(1-q)/(q-1)
    target = tol / max(pref, 1e-300)
    if target >= 1.0:
        n_terms = 1
    else:
        n_terms = math.ceil(math.exp(math.log((q - 1.0) * target) / (1.0 - q))) + 1
    if n_terms > max_terms:
        raise ToleranceNotMet(f"hurwitz_zeta({s}, {v}) needs {n_terms} Fourier terms")
    n = np.arange(1, n_terms + 1, dtype=float)
    phase = 2.0 * np.pi * np.mod(n * v, 1.0)
    theta = math.fmod(0.5 * q, 2.0) * math.pi
    sums = np.cos(theta - phase) * np.exp(-q * np.log(n))
    total = math.fsum(sums)
    tail = pref * (n_terms ** (1.0 - q) / (q - 1.0))
    return pref * total, n_terms, tail + 4 * _EPS * pref * float(np.sum(np.abs(sums)))


def hurwitz_zeta(s: float, v: float, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """Hurwitz zeta ``sum_{n>=0} (n + v)^-s`` and its continuation to ``s < 1``."""
    _check_finite(s=s, v=v)
    if v <= 0:
        raise DomainError(f"hurwitz_zeta needs v > 0, got {v!r}")
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOne("hurwitz_zeta has a pole at s = 1")
    tol = prec.target_abs_tol
    if s >= _HURWITZ_FOURIER_BELOW:
        return _hurwitz_em(s, v, tol, prec.max_terms)
    value, terms, bound = _hurwitz_shifted_fourier(s, v, 0.0, tol, prec.max_terms)
    if bound > tol:
        raise ToleranceNotMet(f"hurwitz_zeta({s}, {v}): bound {bound:.3g} above {tol:.3g}")
    return SeriesEval(value, terms, bound)


def _hurwitz_shifted_fourier(s, v, log_scale, tol, max_terms):
    shift = math.ceil(v) - 1
    vf = v - shift  # in (0, 1]
    value, terms, bound = _hurwitz_fourier_scaled(s, vf, log_scale, tol, max_terms)
    if shift:
        value -= math.fsum(math.exp(-s * math.log(vf + j) + log_scale) for j in range(shift))
    return value, terms + shift, bound


def hurwitz_zeta_scaled(s: float, v: float, log_scale: float,
                        tol: float = 1e-15) -> float:
    """``zeta(s, v) * exp(log_scale)`` evaluated without intermediate overflow.

    ``tol`` is an absolute tolerance on the scaled result.
    """
    if v == 1.0:
        return riemann_zeta_scaled(s, log_scale)
    if s >= _HURWITZ_FOURIER_BELOW:
        scale = math.exp(log_scale)
        return hurwitz_zeta(s, v, Precision(max(tol / max(scale, 1e-300), 1e-15))).value * scale
    return _hurwitz_shifted_fourier(s, v, log_scale, tol, DEFAULT_PRECISION.max_terms)[0]


# ---------------------------------------------------------------------------
# Lerch transcendent
# ---------------------------------------------------------------------------

_BATEMAN_MAX_TERMS = 200
_DIRECT_BLOCK = 2048


def _lerch_direct(z: float, s: float, v: float, prec: Precision) -> SeriesEval:
    tol = prec.target_abs_tol
    total = 0.0
    start = 0
    while start < prec.max_terms:
        n = np.arange(start, min(start + _DIRECT_BLOCK, prec.max_terms), dtype=float)
        log_terms = n * math.log(z) - s * np.log(v + n)
        terms = np.exp(log_terms)
        total += math.fsum(terms)
        nxt = n[-1] + 1.0
        # consecutive-term ratio beyond nxt is at most rho (decreasing in n when s < 0)
        rho = z if s >= 0 else z * ((v + nxt) / (v + nxt + 1.0)) ** s
        if rho < 1.0:
            t_next = math.exp(nxt * math.log(z) - s * math.log(v + nxt))
            bound = t_next / (1.0 - rho)
            if bound <= tol:
                return SeriesEval(total, int(nxt), bound)
        start = int(nxt)
    raise ToleranceNotMet(f"lerch_phi direct series for z={z} did not converge in "
                          f"{prec.max_terms} terms")


def _lerch_bateman(z: float, s: float, v: float, prec: Precision) -> SeriesEval:
    if float(s).is_integer() and s >= 1:
        raise BatemanInvalid(f"ln z expansion needs s not a positive integer, got {s!r}")
    lnz = math.log(z)
    if abs(lnz) >= 2.0 * math.pi:
        raise BatemanInvalid(f"ln z expansion needs |ln z| < 2 pi, got {abs(lnz):.4g}")
    tol = prec.target_abs_tol
    big_l = -lnz
    zv = math.exp(-v * lnz)  # z^-v
    singular = math.gamma(1.0 - s) * zv * big_l ** (s - 1.0)
    log_l = math.log(big_l)
    terms = []
    # zeta vanishes (or nearly) at even negative integers, so successive terms
    # alternate between small and large; the stopping test follows the
    # envelope max(|t_r|, |t_{r-1}|) instead of the raw magnitudes
    envelopes = []
    decreasing = 0
    cap = min(_BATEMAN_MAX_TERMS, prec.max_terms)
    for r in range(cap):
        log_scale = r * log_l - math.lgamma(r + 1.0)
        t = zv * hurwitz_zeta_scaled(s - r, v, log_scale, tol=1e-3 * tol / zv)
        if r % 2:
            t = -t
        terms.append(t)
        env = max(abs(t), abs(terms[-2]) if r else 0.0)
        if envelopes:
            decreasing = decreasing + 1 if env <= envelopes[-1] else 0
        envelopes.append(env)
        if env < 0.1 * tol and decreasing >= 3:
            rho = big_l / (2.0 * math.pi)
            if envelopes[-3] > 0.0:
                rho = max(rho, math.sqrt(env / envelopes[-3]))
            bound = 2.0 * env * rho / (1.0 - rho) if rho < 1 else math.inf
            if bound <= tol:
                return SeriesEval(singular + math.fsum(terms), r + 1, bound, rigorous=False)
    raise ToleranceNotMet(f"lerch_phi ln z expansion did not settle in {cap} terms")


def lerch_phi(z: float, s: float, v: float, prec: Precision = DEFAULT_PRECISION,
              method: str = "auto") -> SeriesEval:
    """Lerch's transcendent ``Phi(z, s, v) = sum_{n>=0} z^n (v + n)^-s``.

    ``method`` is ``"direct"`` for the defining series, ``"bateman"`` for the
    expansion in powers of ``ln z`` with Hurwitz zeta coefficients, or
    ``"auto"``. At ``z = 1`` the value is the Hurwitz zeta function, continued
    in ``s``.
    """
    _check_finite(z=z, s=s, v=v)
    if not 0.0 < z <= 1.0:
        raise DomainError(f"lerch_phi needs 0 < z <= 1, got {z!r}")
    if v <= 0:
        raise DomainError(f"lerch_phi needs v > 0, got {v!r}")
    if method not in ("auto", "direct", "bateman"):
        raise ValueError(f"unknown method {method!r}")
    if z == 1.0:
        if method == "bateman":
            raise BatemanInvalid("ln z expansion is singular at z = 1")
        return hurwitz_zeta(s, v, prec)
    if method == "direct":
        return _lerch_direct(z, s, v, prec)
    if method == "bateman":
        return _lerch_bateman(z, s, v, prec)
    if z <= 0.5:
        return _lerch_direct(z, s, v, prec)
    # geometric estimate of the number of direct terms: z^N (v+N)^-s <= tol
    lnz = math.log(z)
    n_est = (math.log(prec.target_abs_tol) - 1.0) / lnz
    if s < 0:
        n_est *= 1.5
    if n_est <= prec.max_terms:
        return _lerch_direct(z, s, v, prec)
    return _lerch_bateman(z, s, v, prec)
