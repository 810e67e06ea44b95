"""Distribution of the all-time maximum of the Gaussian random walk.

The walk has unit-variance normal increments with mean ``-beta < 0``; ``M`` is
``max(S_n, n >= 0)``. Four routes are available:

``zeta_series``
    Power series in ``beta`` whose coefficients are Riemann zeta values at
    half-integers. Fast for small ``beta``, valid for ``beta < 2 sqrt(pi)``.
``spitzer``
    Direct summation of Spitzer's identities over ``n``. Fast for large
    ``beta``; an Euler-Maclaurin tail keeps it usable as ``beta -> 0``.
``extended``
    The zeta-series tails rewritten as sums over ``n`` with a complex
    parameter ``b = -i beta^2/(4 pi)``, valid for every ``beta > 0``.
``asymptotic``
    The leading heavy-traffic terms only.

All three statistics are instances of ``J_k(beta) = sum_n E[(S_n^+)^k]/n``:
``J_0 = -ln P(M=0)``, ``J_1 = E M`` and ``J_2 = Var M``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import BranchError, ConvergenceFailure, DomainError, ToleranceNotMet
from .euler_maclaurin import EmProblem, em_sum
from .series import DEFAULT_PRECISION, Precision, SeriesEval
from .special_fn import mills_ratio, riemann_zeta, riemann_zeta_scaled

__all__ = [
    "Drift",
    "WalkStats",
    "BETA_MAX",
    "p_zero_zeta",
    "mean_zeta",
    "var_zeta",
    "jk_zeta",
    "p_zero_spitzer",
    "mean_spitzer",
    "var_spitzer",
    "jk_spitzer",
    "asymptotic_stats",
    "s_series",
    "stats_zeta",
    "stats_spitzer",
    "stats_extended",
    "stats_auto",
    "decay_crossover",
    "zeta_series_terms",
    "truncated_normal_moments",
]

SQRT2PI = math.sqrt(2.0 * math.pi)
#: radius of convergence of the zeta series in beta
BETA_MAX = 2.0 * math.sqrt(math.pi)
MAX_MOMENT = 10
# direct Spitzer summation beyond this many terms hands the tail to Euler-Maclaurin
SPITZER_EM_THRESHOLD = 100_000
_SPITZER_BLOCK = 16384
_EPS = 2.0 ** -52


@dataclass(frozen=True)
class Drift:
    """Magnitude ``beta > 0`` of the negative per-step mean."""

    beta: float

    def __post_init__(self):
        b = self.beta
        if isinstance(b, bool) or not isinstance(b, (int, float, np.floating, np.integer)):
            raise DomainError(f"beta must be a real number, got {b!r}")
        if not math.isfinite(b):
            raise DomainError("beta must be finite")
        if b <= 0:
            raise DomainError("beta must be positive")


BetaLike = Union[Drift, float]


def _beta(d: BetaLike) -> float:
    if isinstance(d, Drift):
        return float(d.beta)
    return float(Drift(d).beta)


def _moment_order(k) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 0 <= k <= MAX_MOMENT:
        raise DomainError(f"moment order k must be an integer in [0, {MAX_MOMENT}], got {k!r}")
    return int(k)


@dataclass(frozen=True)
class WalkStats:
    """``P(M=0)``, ``E M`` and ``Var M`` for one drift, with per-quantity diagnostics.

    ``diagnostics`` maps ``"p_zero"``, ``"mean"``, ``"variance"`` (and, for the
    Spitzer route, ``"j0"`` = ``-ln P(M=0)``) to the :class:`SeriesEval`
    behind each number.
    """

    beta: float
    p_zero: float
    mean: float
    variance: float
    method: str
    diagnostics: Mapping[str, SeriesEval] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"p_zero": self.p_zero, "mean": self.mean, "variance": self.variance}


# ---------------------------------------------------------------------------
# zeta series route
# ---------------------------------------------------------------------------

def _check_zeta_domain(beta: float):
    if beta >= BETA_MAX:
        raise DomainError(f"zeta series needs beta < 2*sqrt(pi) = {BETA_MAX:.6f}, got "
                          f"beta={beta}; use the spitzer or extended route")


def zeta_series_terms(k: int, beta: float, n_terms: int) -> list[float]:
    """First terms of ``sum_r zeta(1/2-k-r) (-beta^2/2)^r / (r! (2r+1)...(2r+k+1))``."""
    x = 0.5 * beta * beta
    logx = math.log(x)
    c = 0.5 - k
    out = []
    for r in range(n_terms):
        denom = math.prod(2 * r + i for i in range(1, k + 2))
        t = riemann_zeta_scaled(c - r, r * logx - math.lgamma(r + 1.0)) / denom
        out.append(-t if r % 2 else t)
    return out


def _zeta_power_series(k: int, beta: float, tol: float, max_terms: int) -> SeriesEval:
    """The series of :func:`zeta_series_terms`, truncated with a certified bound.

    Consecutive term magnitudes shrink by less than ``rho = beta^2/(4 pi)``
    (functional equation plus ``zeta(q+1) < zeta(q)``), so after term ``R``
    the remainder is at most ``|t_R| rho / (1 - rho)``.
    """
    rho = beta * beta / (4.0 * math.pi)
    x = 0.5 * beta * beta
    logx = math.log(x)
    c = 0.5 - k
    terms = []
    for r in range(max_terms):
        denom = math.prod(2 * r + i for i in range(1, k + 2))
        t = riemann_zeta_scaled(c - r, r * logx - math.lgamma(r + 1.0)) / denom
        if r % 2:
            t = -t
        terms.append(t)
        bound = abs(t) * rho / (1.0 - rho)
        if bound <= tol and t != 0.0:
            return SeriesEval(math.fsum(terms), r + 1, bound)
    raise ToleranceNotMet(f"zeta series for k={k} at beta={beta} needs more than "
                          f"{max_terms} terms")


def p_zero_zeta(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``P(M = 0)`` from the zeta series (Chang-Peres form)."""
    beta = _beta(d)
    _check_zeta_domain(beta)
    pref = beta / SQRT2PI
    ser = _zeta_power_series(0, beta, 0.5 * prec.target_abs_tol / pref, prec.max_terms)
    expo = pref * ser.value
    p = math.sqrt(2.0) * beta * math.exp(expo)
    return SeriesEval(p, ser.terms_used, p * math.expm1(pref * ser.tail_bound))


def mean_zeta(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``E M`` from the zeta series."""
    beta = _beta(d)
    _check_zeta_domain(beta)
    pref = beta * beta / SQRT2PI
    ser = _zeta_power_series(1, beta, prec.target_abs_tol / pref, prec.max_terms)
    head = math.fsum([0.5 / beta, riemann_zeta(0.5).value / SQRT2PI, 0.25 * beta])
    return SeriesEval(head + pref * ser.value, ser.terms_used, pref * ser.tail_bound)


def var_zeta(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``Var M`` from the zeta series."""
    beta = _beta(d)
    _check_zeta_domain(beta)
    pref = 2.0 * beta ** 3 / SQRT2PI
    ser = _zeta_power_series(2, beta, prec.target_abs_tol / pref, prec.max_terms)
    head = math.fsum([0.25 / (beta * beta), -0.25,
                      -2.0 * riemann_zeta(-0.5).value * beta / SQRT2PI,
                      -beta * beta / 24.0])
    return SeriesEval(head - pref * ser.value, ser.terms_used, pref * ser.tail_bound)


def _jk_polynomial_part(k: int, beta: float) -> tuple[float, float]:
    """Closed-form part of ``J_k`` and the sum of its terms' magnitudes."""
    parts = [math.factorial(k - 1) / (2.0 * beta) ** k]
    for j in range(k + 1):
        s = 1.0 - 0.5 * (k + j)
        assert s <= 0.5  # the zeta pole at 1 cannot occur for k >= 1
        c = (math.comb(k, j) * (-1) ** j * math.gamma(0.5 * (k - j + 1)) / SQRT2PI
             * 2.0 ** (0.5 * (k - j - 1)))
        parts.append(c * riemann_zeta(s).value * beta ** j)
    return math.fsum(parts), math.fsum(abs(p) for p in parts)


def jk_zeta(k: int, d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``J_k(beta)`` from the general zeta-series formula, ``0 <= k <= 10``.

    For ``k = 0`` the ``P(M=0)`` series gives ``J_0 = -ln P(M=0)`` directly.
    The general formula for ``k >= 3`` has no published proof; it is checked
    against :func:`jk_spitzer` in the test suite.
    """
    k = _moment_order(k)
    beta = _beta(d)
    _check_zeta_domain(beta)
    if k == 0:
        pref = beta / SQRT2PI
        ser = _zeta_power_series(0, beta, prec.target_abs_tol / pref, prec.max_terms)
        value = -math.log(math.sqrt(2.0) * beta) - pref * ser.value
        return SeriesEval(value, ser.terms_used, pref * ser.tail_bound)
    pref = math.factorial(k) * beta ** (k + 1) / SQRT2PI
    ser = _zeta_power_series(k, beta, prec.target_abs_tol / pref, prec.max_terms)
    sign = -1.0 if k % 2 == 0 else 1.0  # (-1)^(k+1)
    poly, poly_mag = _jk_polynomial_part(k, beta)
    value = poly + sign * pref * ser.value
    # the two parts cancel heavily for large k and beta
    rounding = 16.0 * _EPS * (poly_mag + pref * abs(ser.value))
    return SeriesEval(value, ser.terms_used, pref * ser.tail_bound + rounding)


# ---------------------------------------------------------------------------
# truncated normal moments
# ---------------------------------------------------------------------------

def truncated_normal_moments(a, kmax: int) -> np.ndarray:
    """Ratios ``I_j(a) = h_j(a) / phi(a)`` for ``j = 0..kmax``.

    ``h_j(a) = int_a^inf (z - a)^j phi(z) dz = E[((Z - a)^+)^j]`` and ``phi`` is
    the standard normal density. Returns shape ``(kmax + 1,) + shape(a)``.

    ``I_{j+1} = j I_{j-1} - a I_j`` with ``I_0`` the Mills ratio. Forward
    recursion is used for ``a <= 1``. Above that it loses digits quickly, so
    the minimal solution is taken by backward (Miller) recursion instead,
    normalised by ``I_0``.
    """
    if np.ndim(a) == 0:
        return np.array(_moments_scalar(float(a), kmax))
    a = np.asarray(a, dtype=float)
    out = np.empty((kmax + 1,) + a.shape)
    mills = mills_ratio(a)
    out[0] = mills
    small = a <= 1.0
    if np.any(small):
        asml = a[small]
        prev, cur = np.zeros_like(asml), mills[small]
        for j in range(kmax):
            nxt = (1.0 if j == 0 else j * prev) - asml * cur
            out[j + 1][small] = nxt
            prev, cur = cur, nxt
    big = ~small
    if np.any(big):
        abig = a[big]
        top = kmax + int(math.ceil(60.0 + 400.0 / float(abig.min()) ** 2))
        y_next = np.zeros_like(abig)
        y_cur = np.ones_like(abig)
        stored = np.empty((kmax + 1, abig.size))
        if top <= kmax:
            stored[top] = y_cur
        for j in range(top, 0, -1):
            y_prev = (y_next + abig * y_cur) / j
            if j - 1 <= kmax:
                stored[j - 1] = y_prev
            elif j - 1 > kmax + 1:
                # keep the pair in range; nothing has been stored yet
                m = np.abs(y_prev)
                rescale = (m > 1e150) | (m < 1e-150)
                if np.any(rescale):
                    f = np.where(rescale, 1.0 / m, 1.0)
                    y_prev = y_prev * f
                    y_cur = y_cur * f
            y_next, y_cur = y_cur, y_prev
        stored *= mills[big] / stored[0]
        for j in range(1, kmax + 1):
            out[j][big] = stored[j]
    return out


def _moments_scalar(a: float, kmax: int) -> list[float]:
    # plain-float twin of truncated_normal_moments for pointwise callers
    mills = float(mills_ratio(a))
    if a <= 1.0:
        out = [mills]
        prev, cur = 0.0, mills
        for j in range(kmax):
            nxt = (1.0 if j == 0 else j * prev) - a * cur
            out.append(nxt)
            prev, cur = cur, nxt
        return out
    top = kmax + math.ceil(60.0 + 400.0 / (a * a))
    y_next, y_cur = 0.0, 1.0
    stored = [0.0] * (kmax + 1)
    for j in range(top, 0, -1):
        y_prev = (y_next + a * y_cur) / j
        if j - 1 <= kmax:
            stored[j - 1] = y_prev
        elif not 1e-150 < y_prev < 1e150:
            y_cur /= y_prev
            y_prev = 1.0
        y_next, y_cur = y_cur, y_prev
    norm = mills / stored[0]
    return [y * norm for y in stored]


# ---------------------------------------------------------------------------
# Spitzer route
# ---------------------------------------------------------------------------

def _spitzer_log_envelope(k: int, beta: float, n: float) -> float:
    """Log of a bound on ``sum_{m > n}`` of the k-th Spitzer summand.

    Uses ``h_k(a) <= k! phi(a) / a^(k+1)`` and sums the geometric envelope.
    """
    x = 0.5 * beta * beta
    return (math.lgamma(k + 1.0) - x * (n + 1.0) - math.log(SQRT2PI)
            - (k + 1.0) * math.log(beta) - 1.5 * math.log(n + 1.0)
            - math.log(-math.expm1(-x)))


def _spitzer_terms_needed(k: int, beta: float, tol: float) -> int:
    target = math.log(tol)
    if _spitzer_log_envelope(k, beta, 1.0) <= target:
        return 1
    hi = 2
    while _spitzer_log_envelope(k, beta, hi) > target:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _spitzer_log_envelope(k, beta, mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def _spitzer_summands(k: int, beta: float, n: np.ndarray) -> np.ndarray:
    a = beta * np.sqrt(n)
    phi = np.exp(-0.5 * a * a) / SQRT2PI
    ratios = truncated_normal_moments(a, k)
    return n ** (0.5 * k - 1.0) * phi * ratios[k]


class _GaussTailExpr:
    """Sum of terms ``c * x^e * B(beta sqrt(x))`` with ``B`` either ``h_j`` or
    ``a^i phi(a)``; closed under d/dx, which gives exact derivatives of the
    Spitzer summands for the Euler-Maclaurin tail.
    """

    def __init__(self, beta: float, terms: dict):
        self.beta = beta
        self.terms = terms

    @classmethod
    def summand(cls, k: int, beta: float) -> "_GaussTailExpr":
        return cls(beta, {(0.5 * k - 1.0, "h", k): 1.0})

    def derivative(self) -> "_GaussTailExpr":
        new: dict = {}

        def add(e, kind, idx, c):
            key = (e, kind, idx)
            new[key] = new.get(key, 0.0) + c

        for (e, kind, idx), c in self.terms.items():
            if e != 0.0:
                add(e - 1.0, kind, idx, c * e)
            # d/dx B(a) = (a B'(a)) / (2x) with a = beta sqrt(x)
            half = 0.5 * c
            if kind == "h":
                if idx >= 2:
                    add(e - 1.0, "h", idx - 2, -half * idx * (idx - 1))
                    add(e - 1.0, "h", idx, half * idx)
                elif idx == 1:
                    add(e - 1.0, "p", 0, -half)
                    add(e - 1.0, "h", 1, half)
                else:
                    add(e - 1.0, "p", 1, -half)
            else:
                if idx:
                    add(e - 1.0, "p", idx, half * idx)
                add(e - 1.0, "p", idx + 2, -half)
        return _GaussTailExpr(self.beta, {key: c for key, c in new.items() if c != 0.0})

    def _bases(self, x):
        a = self.beta * np.sqrt(x)
        phi = np.exp(-0.5 * a * a) / SQRT2PI
        kmax = max((idx for (_, kind, idx) in self.terms if kind == "h"), default=0)
        ratios = truncated_normal_moments(a, kmax)
        for (e, kind, idx), c in self.terms.items():
            base = phi * ratios[idx] if kind == "h" else a ** idx * phi
            yield c, x ** e * base

    def __call__(self, x):
        if np.ndim(x) == 0:
            return math.fsum(float(c * v) for c, v in self._bases(float(x)))
        return sum(c * v for c, v in self._bases(np.asarray(x, dtype=float)))

    def majorant(self, x):
        """``sum |c| x^e B``, a smooth upper bound on the absolute value."""
        return sum(abs(c) * v for c, v in self._bases(np.asarray(x, dtype=float)))


_GL_FINE = np.polynomial.legendre.leggauss(24)
_GL_COARSE = np.polynomial.legendre.leggauss(16)


def _gauss_panels(beta: float, start: float) -> list[tuple[float, float]]:
    # ratio-2 panels near start, then widths capped so exp(-beta^2 x/2) drops
    # by at most e^-4 per panel; stop where that factor reaches e^-120
    cap = 8.0 / (beta * beta)
    stop = max(240.0 / (beta * beta), 2.0 * start)
    edges = [start]
    while edges[-1] < stop:
        edges.append(edges[-1] + min(edges[-1], cap))
    return list(zip(edges[:-1], edges[1:]))


def _gauss_integral(fn, panels) -> tuple[float, float]:
    """Composite Gauss-Legendre integral of a vectorised ``fn`` and an error
    estimate from a lower-order rule on the same panels."""
    lo = np.array([p[0] for p in panels])
    hi = np.array([p[1] for p in panels])
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    totals = []
    for nodes, weights in (_GL_FINE, _GL_COARSE):
        x = mid[:, None] + half[:, None] * nodes[None, :]
        vals = fn(x.ravel()).reshape(x.shape)
        totals.append(math.fsum((half[:, None] * weights[None, :] * vals).ravel()))
    return totals[0], abs(totals[0] - totals[1])


def _spitzer_em(k: int, beta: float, prec: Precision) -> SeriesEval:
    f0 = _GaussTailExpr.summand(k, beta)
    f1 = f0.derivative()
    f3 = f1.derivative().derivative()
    f4 = f3.derivative()

    def integral_from(start):
        panels = _gauss_panels(beta, start)
        value, err = _gauss_integral(f0, panels)
        end = panels[-1][1]
        # f(x) <= k! x^-3/2 phi(beta sqrt x) / beta^(k+1) beyond the last panel
        beyond = (math.factorial(k) / beta ** (k + 3) * 2.0 * end ** -1.5
                  * math.exp(-0.5 * beta * beta * end) / SQRT2PI)
        return value, err + beyond

    def remainder_integral(start):
        value, err = _gauss_integral(f4.majorant, _gauss_panels(beta, start))
        return value + err

    problem = EmProblem(f=f0, odd_derivs=[f1, f3], m=2, a=1, integral_from=integral_from,
                        remainder_integral=remainder_integral)
    return em_sum(problem, prec)


def _spitzer_sum(k: int, beta: float, prec: Precision) -> SeriesEval:
    tol = prec.target_abs_tol
    n_needed = _spitzer_terms_needed(k, beta, 0.5 * tol)
    if n_needed > SPITZER_EM_THRESHOLD:
        return _spitzer_em(k, beta, prec)
    if n_needed > prec.max_terms:
        raise ToleranceNotMet(f"Spitzer series at beta={beta} needs {n_needed} terms")
    parts = []
    for lo in range(1, n_needed + 1, _SPITZER_BLOCK):
        n = np.arange(lo, min(lo + _SPITZER_BLOCK, n_needed + 1), dtype=float)
        parts.append(math.fsum(_spitzer_summands(k, beta, n)))
    bound = math.exp(_spitzer_log_envelope(k, beta, n_needed))
    return SeriesEval(math.fsum(parts), n_needed, bound)


def jk_spitzer(k: int, d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``J_k(beta) = sum_n E[(S_n^+)^k] / n`` by direct summation over ``n``."""
    k = _moment_order(k)
    return _spitzer_sum(k, _beta(d), prec)


def p_zero_spitzer(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``P(M = 0) = exp(-J_0)`` from Spitzer's identity."""
    j0 = _spitzer_sum(0, _beta(d), prec)
    p = math.exp(-j0.value)
    return SeriesEval(p, j0.terms_used, p * math.expm1(j0.tail_bound))


def mean_spitzer(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``E M = sum_n (exp(-beta^2 n/2)/sqrt(2 pi n) - beta P(-beta sqrt n))``."""
    return _spitzer_sum(1, _beta(d), prec)


def var_spitzer(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """``Var M = sum_n ((beta^2 n + 1) P(-beta sqrt n) - beta sqrt(n) phi(beta sqrt n))``."""
    return _spitzer_sum(2, _beta(d), prec)


# ---------------------------------------------------------------------------
# extended route
# ---------------------------------------------------------------------------

def _central_binomial_ratios(count: int) -> list[float]:
    # C(2r, r) / 4^r for r = 0..count-1
    g = [1.0]
    for r in range(1, count):
        g.append(g[-1] * (2 * r - 1) / (2 * r))
    return g


def _s_power_series(j: int, b: complex, count: int) -> list[tuple[complex, float]]:
    """``u_j(x) = sum coef * x^-p`` for large ``x``; list of ``(coef, p)``."""
    g = _central_binomial_ratios(count + 2)
    out = []
    if j == 0:
        # (arcsin(w) - w)/sqrt(b), w = sqrt(b/x): sum_{r>=1} g_r/(2r+1) b^r x^-(r+1/2)
        for r in range(1, count + 1):
            out.append((g[r] / (2 * r + 1) * b ** r, r + 0.5))
    else:
        # 1/(x^j (sqrt x + sqrt(x-b))) = sum_{m>=1} g_m/(2m-1) b^(m-1) x^-(m+j-1/2)
        for m in range(1, count + 1):
            out.append((g[m] / (2 * m - 1) * b ** (m - 1), m + j - 0.5))
    return out


def _s_closed_term(j: int, b: complex, n: int) -> complex:
    if j == 0:
        w = cmath.sqrt(b / n)
        return (cmath.asin(w) - w) / cmath.sqrt(b)
    rn = math.sqrt(n)
    return 1.0 / (n ** (j - 1) * n * (rn + cmath.sqrt(n - b)))


_S_PREFACTOR = (math.sqrt(math.pi), 0.5 * math.sqrt(math.pi), 0.25 * math.sqrt(math.pi))


def s_series(j: int, b: complex, prec: Precision = DEFAULT_PRECISION) -> SeriesEval:
    """The sums ``S_0``, ``S_1``, ``S_2`` of the extended-domain formulas.

    ``S_0(b) = sqrt(pi/b) sum_n (arcsin(sqrt(b/n)) - sqrt(b/n))``,
    ``S_1(b) = sqrt(pi)/(2b) sum_n (sqrt(n) - sqrt(n-b)) / n`` and
    ``S_2(b) = sqrt(pi)/(4b) sum_n (sqrt(n) - sqrt(n-b)) / n^2``, with principal
    branches. Terms with ``n < 4|b|`` use the closed forms (``S_1``, ``S_2``
    rationalised to avoid cancellation); the rest is a power series in ``b/n``
    summed by Euler-Maclaurin.
    """
    if j not in (0, 1, 2):
        raise DomainError(f"s_series index must be 0, 1 or 2, got {j!r}")
    b = complex(b)
    if not (cmath.isfinite(b)) or b == 0:
        raise DomainError("s_series needs a finite nonzero b")
    if b.imag == 0.0 and b.real >= 1.0:
        raise BranchError(f"n - b crosses the principal branch cut for b={b}")
    pref = _S_PREFACTOR[j]
    tol = prec.target_abs_tol / pref
    n0 = max(2, math.ceil(4.0 * abs(b)))
    head = [_s_closed_term(j, b, n) for n in range(1, n0)]
    # |b|/x <= 1/4 on the tail, so 30 terms reach double precision
    coeffs = _s_power_series(j, b, 30)
    m = 2

    def f(x, q=0):
        acc = 0j
        for c, p in coeffs:
            fall = 1.0
            for i in range(q):
                fall *= -p - i
            acc += c * fall * x ** (-p - q)
        return acc

    def antiderivative(x):
        return sum(c * x ** (1.0 - p) / (1.0 - p) for c, p in coeffs)

    def remainder_integral(start):
        total = 0.0
        for c, p in coeffs:
            fall = 1.0
            for i in range(2 * m):
                fall *= p + i
            total += abs(c) * fall * start ** (1.0 - p - 2 * m) / (p + 2 * m - 1.0)
        return total

    problem = EmProblem(f=f, odd_derivs=[lambda x: f(x, 1), lambda x: f(x, 3)], m=m, a=n0,
                        antiderivative=antiderivative, remainder_integral=remainder_integral)
    tail = em_sum(problem, prec.with_tol(0.5 * tol))
    head_sum = complex(math.fsum(z.real for z in head), math.fsum(z.imag for z in head))
    total = head_sum + tail.value
    return SeriesEval(pref * total, len(head) + tail.terms_used, pref * tail.tail_bound)


_EIGHTH_TURN = cmath.exp(0.25j * math.pi)


def stats_extended(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> WalkStats:
    """All three statistics with the zeta-series tails replaced by ``S_j`` sums.

    Valid for every ``beta > 0``, in particular beyond ``2 sqrt(pi)``. The
    phase and prefactor of each substitution were fixed by matching the zeta
    series term by term in ``b``.
    """
    beta = _beta(d)
    tol = prec.target_abs_tol
    b = -1j * beta * beta / (4.0 * math.pi)
    z_half = riemann_zeta(0.5).value
    z_mhalf = riemann_zeta(-0.5).value

    c0 = beta / math.pi
    s0 = s_series(0, b, prec.with_tol(0.5 * tol / c0))
    expo = z_half * beta / SQRT2PI + c0 * (_EIGHTH_TURN * s0.value).real
    p = math.sqrt(2.0) * beta * math.exp(expo)
    p_eval = SeriesEval(p, s0.terms_used, p * math.expm1(c0 * s0.tail_bound))

    c1 = beta * beta / (2.0 * math.pi ** 2)
    s1 = s_series(1, b, prec.with_tol(tol / c1))
    mean = math.fsum([0.5 / beta, z_half / SQRT2PI, 0.25 * beta,
                      c1 * (-_EIGHTH_TURN.conjugate() * s1.value).real])
    mean_eval = SeriesEval(mean, s1.terms_used, c1 * s1.tail_bound)

    c2 = beta ** 3 / (2.0 * math.pi ** 3)
    s2 = s_series(2, b, prec.with_tol(tol / c2))
    var = math.fsum([0.25 / (beta * beta), -0.25, -2.0 * z_mhalf * beta / SQRT2PI,
                     -beta * beta / 24.0, c2 * (_EIGHTH_TURN * s2.value).real])
    var_eval = SeriesEval(var, s2.terms_used, c2 * s2.tail_bound)
    return WalkStats(beta, p, mean, var, "extended",
                     {"p_zero": p_eval, "mean": mean_eval, "variance": var_eval})


# ---------------------------------------------------------------------------
# heavy-traffic asymptotics
# ---------------------------------------------------------------------------

def asymptotic_stats(d: BetaLike) -> WalkStats:
    """Leading heavy-traffic expansions, without any series tail.

    ``E M ~ 1/(2 beta) + zeta(1/2)/sqrt(2 pi) + beta/4`` and
    ``Var M ~ 1/(4 beta^2) - 1/4 - 2 zeta(-1/2) beta/sqrt(2 pi) - beta^2/24``;
    ``P(M=0) ~ sqrt(2) beta exp(zeta(1/2) beta/sqrt(2 pi))``. The reported
    bounds are the first omitted terms and are heuristic.
    """
    beta = _beta(d)
    z_half = riemann_zeta(0.5).value
    z_mhalf = riemann_zeta(-0.5).value
    z_m3half = riemann_zeta(-1.5).value
    p = math.sqrt(2.0) * beta * math.exp(z_half * beta / SQRT2PI)
    mean = 0.5 / beta + z_half / SQRT2PI + 0.25 * beta
    var = 0.25 / beta ** 2 - 0.25 - 2.0 * z_mhalf * beta / SQRT2PI - beta ** 2 / 24.0
    p_next = p * abs(beta / SQRT2PI * z_mhalf * beta * beta / 6.0)
    mean_next = abs(z_mhalf) * beta ** 2 / (2.0 * SQRT2PI)
    var_next = abs(z_m3half) * beta ** 3 / (3.0 * SQRT2PI)
    diag = {
        "p_zero": SeriesEval(p, 0, p_next, rigorous=False),
        "mean": SeriesEval(mean, 0, mean_next, rigorous=False),
        "variance": SeriesEval(var, 0, var_next, rigorous=False),
    }
    return WalkStats(beta, p, mean, var, "asymptotic", diag)


# ---------------------------------------------------------------------------
# route bundles and dispatch
# ---------------------------------------------------------------------------

def stats_zeta(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> WalkStats:
    beta = _beta(d)
    p, m, v = p_zero_zeta(beta, prec), mean_zeta(beta, prec), var_zeta(beta, prec)
    return WalkStats(beta, p.value, m.value, v.value, "zeta_series",
                     {"p_zero": p, "mean": m, "variance": v})


def stats_spitzer(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> WalkStats:
    beta = _beta(d)
    j0 = _spitzer_sum(0, beta, prec)
    p = math.exp(-j0.value)
    p_eval = SeriesEval(p, j0.terms_used, p * math.expm1(j0.tail_bound))
    m, v = mean_spitzer(beta, prec), var_spitzer(beta, prec)
    return WalkStats(beta, p, m.value, v.value, "spitzer",
                     {"p_zero": p_eval, "mean": m, "variance": v, "j0": j0})


def decay_crossover(tol: float = 1e-12) -> tuple[float, float, float]:
    """Drift where the two series decay at the same per-term rate.

    Solves ``x e^x = 2 pi`` (``x = beta^2/2``) by bisection on [1, 2] followed
    by two Newton steps. Returns ``(x0, beta0, exp(-x0))``.
    """
    g = lambda x: x * math.exp(x) - 2.0 * math.pi  # noqa: E731
    lo, hi = 1.0, 2.0
    if not g(lo) < 0.0 < g(hi):
        raise ConvergenceFailure("crossover bracket [1, 2] does not straddle the root")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(2):
        x -= g(x) / ((1.0 + x) * math.exp(x))
    if not 1.0 <= x <= 2.0:
        raise ConvergenceFailure("Newton polish left the bracket")
    return x, math.sqrt(2.0 * x), math.exp(-x)


def auto_method(beta: float) -> str:
    beta0 = decay_crossover()[1]
    if beta <= 0.9 * BETA_MAX and beta <= 1.2 * beta0:
        return "zeta_series"
    return "spitzer"


def stats_auto(d: BetaLike, prec: Precision = DEFAULT_PRECISION) -> WalkStats:
    """Zeta series below ``1.2 * beta0`` (about 2.05), Spitzer above."""
    beta = _beta(d)
    if auto_method(beta) == "zeta_series":
        return stats_zeta(beta, prec)
    return stats_spitzer(beta, prec)
