"""Containers for truncated sums and their accuracy targets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

Number = Union[float, complex]


@dataclass(frozen=True)
class Precision:
    """Accuracy request for a truncated computation.

    ``target_abs_tol`` is an absolute tolerance on the returned value and
    ``max_terms`` caps the number of terms any single series may consume.
    """

    target_abs_tol: float = 1e-12
    max_terms: int = 200_000

    def __post_init__(self):
        if not self.target_abs_tol > 0:
            raise ValueError("target_abs_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")

    def with_tol(self, tol: float) -> "Precision":
        return Precision(tol, self.max_terms)


DEFAULT_PRECISION = Precision()


@dataclass(frozen=True)
class SeriesEval:
    """Value of a truncated infinite sum.

    ``tail_bound`` estimates the absolute truncation error. When ``rigorous``
    is true it is a proven bound (up to floating point roundoff), otherwise
    it is a heuristic such as the size of the first omitted term.
    """

    value: Number
    terms_used: int
    tail_bound: float
    rigorous: bool = True

    def __post_init__(self):
        if self.terms_used < 0:
            raise ValueError("terms_used must be nonnegative")
        if not self.tail_bound >= 0:
            raise ValueError("tail_bound must be nonnegative")

    def __float__(self) -> float:
        return float(self.value.real if isinstance(self.value, complex) else self.value)

    def scaled(self, factor: float, shift: Number = 0.0) -> "SeriesEval":
        """Return ``factor * value + shift`` with the bound scaled accordingly."""
        return SeriesEval(factor * self.value + shift, self.terms_used,
                          abs(factor) * self.tail_bound, self.rigorous)
