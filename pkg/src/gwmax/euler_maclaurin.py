"""Euler-Maclaurin summation with a certified remainder bound.

For ``a <= N`` and order ``m >= 1``::

    sum_{n=a}^{N} f(n) = int_a^N f + (f(a) + f(N))/2
                         + sum_{k=1}^{m} B_2k/(2k)! (f^(2k-1)(N) - f^(2k-1)(a)) - R_m

with ``|R_m| <= |B_2m|/(2m)! * int_a^N |f^(2m)|`` because ``|B_2m(t)| <= |B_2m|``
on [0, 1]. For an infinite range every boundary term at ``N`` is dropped.

Derivatives are supplied analytically by the caller. When the bound at the
requested start is too loose, :func:`em_sum` sums a growing head directly
and applies the formula further out, where derivatives are smaller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from scipy import integrate

from .errors import DomainError, RemainderUnbounded, ToleranceNotMet
from .series import DEFAULT_PRECISION, Precision, SeriesEval
from .special_fn import bernoulli_number

__all__ = ["EmProblem", "em_sum", "kingman_constant", "kingman_term", "kingman_partial_sum"]

RealFn = Callable[[float], float]


@dataclass(frozen=True)
class EmProblem:
    """A sum ``sum_{n=a}^{n_end} f(n)`` prepared for Euler-Maclaurin summation.

    Attributes
    ----------
    f : callable
        The summand, as a function of a real argument.
    odd_derivs : sequence of callables
        ``f', f''', ..., f^(2m-1)``; at least ``m`` entries.
    m : int
        Correction order.
    a, n_end : int
        Summation range; ``n_end=None`` means an infinite upper limit, in which
        case ``f`` and its derivatives must vanish at infinity.
    antiderivative : callable, optional
        ``F`` with ``F' = f``. For an infinite range ``F(x) -> 0`` as
        ``x -> inf`` is required.
    integral_from : callable, optional
        ``start -> (int_start^n_end f, error estimate)``, for integrals the
        caller knows how to do better than generic quadrature. Without this
        or ``antiderivative`` the integral is done by adaptive quadrature
        (real summands only).
    even_deriv : callable, optional
        ``f^(2m)``; its absolute value is integrated numerically for the
        remainder bound.
    remainder_integral : callable, optional
        ``start -> int_start^n_end |f^(2m)|`` in closed form or as an upper
        bound. Takes precedence over ``even_deriv``.
    """

    f: RealFn
    odd_derivs: Sequence[RealFn]
    m: int = 2
    a: int = 1
    n_end: Optional[int] = None
    antiderivative: Optional[RealFn] = None
    integral_from: Optional[Callable[[float], tuple[float, float]]] = None
    even_deriv: Optional[RealFn] = None
    remainder_integral: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("Euler-Maclaurin order m must be >= 1")
        if len(self.odd_derivs) < self.m:
            raise DomainError(f"need {self.m} odd derivatives, got {len(self.odd_derivs)}")
        if self.n_end is not None and self.n_end < self.a:
            raise DomainError("empty summation range")


def _quad(fn, lo, hi, tol):
    upper = math.inf if hi is None else hi
    val, err = integrate.quad(fn, lo, upper, epsabs=tol, epsrel=1e-13, limit=400)
    return val, err


def _em_at(p: EmProblem, start: int, tol: float):
    """EM value and bound for ``sum_{n=start}^{n_end} f(n)``."""
    infinite = p.n_end is None
    end = p.n_end
    if p.antiderivative is not None:
        integral = (0.0 if infinite else p.antiderivative(end)) - p.antiderivative(start)
        quad_err = 0.0
    elif p.integral_from is not None:
        integral, quad_err = p.integral_from(start)
    else:
        integral, quad_err = _quad(p.f, start, end, 0.1 * tol)
    total = [integral, 0.5 * p.f(start)]
    if not infinite:
        total.append(0.5 * p.f(end))
    for k in range(1, p.m + 1):
        c = float(bernoulli_number(2 * k)) / math.factorial(2 * k)
        d = p.odd_derivs[k - 1]
        total.append(c * ((0.0 if infinite else d(end)) - d(start)))
    if p.remainder_integral is not None:
        r_int = p.remainder_integral(start)
    elif p.even_deriv is not None:
        ed = p.even_deriv
        r_int, r_err = _quad(lambda x: abs(ed(x)), start, end, 0.01 * tol)
        r_int += r_err
    else:
        raise RemainderUnbounded("no 2m-th derivative or remainder integral supplied")
    bound = abs(float(bernoulli_number(2 * p.m))) / math.factorial(2 * p.m) * r_int
    value = math.fsum(x.real for x in total)
    if any(isinstance(x, complex) for x in total):
        value = complex(value, math.fsum(x.imag for x in total))
    return value, bound + quad_err


def em_sum(p: EmProblem, prec: Precision = DEFAULT_PRECISION, shift: bool = True) -> SeriesEval:
    """Sum ``p`` by Euler-Maclaurin to absolute accuracy ``prec.target_abs_tol``.

    With ``shift=True`` the first ``h`` terms are added directly and the
    formula is applied from ``a + h``, with ``h`` = 0, 1, 2, 4, ... until the
    remainder bound meets the tolerance. ``shift=False`` applies the formula
    at ``a`` once and reports whatever bound results.
    """
    tol = prec.target_abs_tol
    head = []
    h = 0
    best_bound = math.inf
    saw_finite = False
    while True:
        start = p.a + h
        if p.n_end is not None and start > p.n_end:
            # fell off the end: the whole range was summed directly
            return SeriesEval(_fsum(head), len(head), 0.0)
        try:
            value, bound = _em_at(p, start, tol)
        except (ZeroDivisionError, OverflowError, ValueError):
            value, bound = math.nan, math.inf
        if math.isfinite(bound) and not (isinstance(value, float) and math.isnan(value)):
            saw_finite = True
            best_bound = min(best_bound, bound)
            if bound <= tol or not shift:
                return SeriesEval(_fsum(head + [value]), len(head) + p.m + 2, bound)
        elif not shift:
            raise RemainderUnbounded(f"remainder bound is not finite at start={start}")
        nxt = max(1, 2 * h)
        if nxt > prec.max_terms:
            if not saw_finite:
                raise RemainderUnbounded("remainder bound never became finite")
            raise ToleranceNotMet(f"Euler-Maclaurin bound {best_bound:.3g} above {tol:.3g} "
                                  f"after {h} direct terms")
        upto = p.a + nxt
        if p.n_end is not None:
            upto = min(upto, p.n_end + 1)
        head.extend(p.f(n) for n in range(start, upto))
        h = upto - p.a


def _fsum(xs):
    if any(isinstance(x, complex) for x in xs):
        return complex(math.fsum(x.real for x in xs), math.fsum(x.imag for x in xs))
    return math.fsum(xs)


# ---------------------------------------------------------------------------
# Kingman's constant
# ---------------------------------------------------------------------------

def kingman_term(n: float) -> float:
    """``1 / (sqrt(n) (sqrt(n) + sqrt(n-1))^2)``, the n-th term of Kingman's series."""
    r = math.sqrt(n)
    return 1.0 / (r * (r + math.sqrt(n - 1.0)) ** 2)


def _falling(p: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= p - i
    return out


def _kingman_deriv(order: int) -> RealFn:
    # term = 2 x^(1/2) - x^(-1/2) - 2 (x-1)^(1/2)
    c_a = 2.0 * _falling(0.5, order)
    c_b = -_falling(-0.5, order)
    c_c = -2.0 * _falling(0.5, order)
    e_a, e_b = 0.5 - order, -0.5 - order

    def d(x):
        return c_a * x ** e_a + c_b * x ** e_b + c_c * (x - 1.0) ** e_a
    return d


def _kingman_antiderivative(x: float) -> float:
    # (4/3)(x^{3/2} - (x-1)^{3/2}) - 2 x^{1/2}, which tends to 0 at infinity
    r, q = math.sqrt(x), math.sqrt(x - 1.0)
    diff = (3.0 * x * x - 3.0 * x + 1.0) / (x * r + (x - 1.0) * q)
    return 4.0 / 3.0 * diff - 2.0 * r


def kingman_partial_sum(n_max: int) -> float:
    """``(2 pi)^-1/2 * sum_{n<=n_max}`` of Kingman's series, summed directly."""
    return math.fsum(kingman_term(n) for n in range(1, n_max + 1)) / math.sqrt(2.0 * math.pi)


def kingman_constant(prec: Precision = Precision(1e-10), m: int = 2) -> float:
    """Kingman's heavy-traffic constant ``c = (2 pi)^-1/2 sum_n kingman_term(n)``.

    The series has terms of order ``n^-3/2``; Euler-Maclaurin summation from a
    few terms in turns it into a handful of evaluations. Its value equals
    ``-zeta(1/2) / sqrt(2 pi)``.
    """
    problem = EmProblem(
        f=kingman_term,
        odd_derivs=[_kingman_deriv(2 * k - 1) for k in range(1, m + 1)],
        m=m,
        a=1,
        antiderivative=_kingman_antiderivative,
        even_deriv=_kingman_deriv(2 * m),
    )
    scale = math.sqrt(2.0 * math.pi)
    res = em_sum(problem, prec.with_tol(prec.target_abs_tol * scale))
    return res.value / scale
