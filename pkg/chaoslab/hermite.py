"""Probabilists' Hermite polynomials and the exact scalar toolbox.

H_0 = 1 and H_{k+1} = x H_k - H_k'. Every other module consumes the helpers
here: linearization coefficients for chaos products, chi-square moments for
sphere/radial computations and double factorials for Gaussian moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Sequence, TypeVar

from .exceptions import InputError

T = TypeVar("T")


@dataclass(frozen=True)
class HermitePoly:
    """Monomial coefficients of H_k: ``monomial_coeffs[j]`` multiplies x**j."""

    degree: int
    monomial_coeffs: tuple[Fraction, ...]

    def __call__(self, x: Fraction) -> Fraction:
        total = Fraction(0)
        for coeff in reversed(self.monomial_coeffs):
            total = total * x + coeff
        return total


def _check_degree(k: int) -> None:
    if k < 0:
        raise InputError(f"Hermite degree must be non-negative, got {k}")


@lru_cache(maxsize=None)
def _coeffs(k: int) -> tuple[Fraction, ...]:
    if k == 0:
        return (Fraction(1),)
    previous = _coeffs(k - 1)
    # delta f = x f - f'
    shifted = [Fraction(0), *previous]
    for j in range(1, len(previous)):
        shifted[j - 1] -= j * previous[j]
    return tuple(shifted)


def hermite_coeffs(k: int) -> HermitePoly:
    """Degree-k Hermite polynomial obtained by applying delta k times to 1."""
    _check_degree(k)
    return HermitePoly(degree=k, monomial_coeffs=_coeffs(k))


def hermite_eval(k: int, x: T) -> T:
    """H_k(x) via H_{k+1} = x H_k - k H_{k-1}.

    Works for exact scalars, floats and numpy arrays alike.
    """
    _check_degree(k)
    previous = x * 0 + 1  # type: ignore[operator]
    if k == 0:
        return previous
    current = x
    for j in range(1, k):
        previous, current = current, x * current - j * previous  # type: ignore[operator]
    return current


def normalized_hermite_eval(k: int, x: float) -> float:
    """H_k(x)/sqrt(k!) through the normalized recursion (no factorial overflow)."""
    _check_degree(k)
    previous, current = 0.0, 1.0
    for j in range(k):
        previous, current = current, (x * current - math.sqrt(j) * previous) / math.sqrt(j + 1)
    return current


@lru_cache(maxsize=None)
def _linearize(a: int, b: int) -> tuple[tuple[int, int], ...]:
    terms = []
    for s in range(min(a, b) + 1):
        terms.append((a + b - 2 * s, math.comb(a, s) * math.comb(b, s) * math.factorial(s)))
    return tuple(terms)


def linearize(a: int, b: int) -> Dict[int, Fraction]:
    """Coefficients c_r with H_a H_b = sum_r c_r H_r."""
    _check_degree(a)
    _check_degree(b)
    return {degree: Fraction(coeff) for degree, coeff in _linearize(a, b)}


def linearize_int(a: int, b: int) -> tuple[tuple[int, int], ...]:
    """Integer form of :func:`linearize` for hot loops."""
    return _linearize(a, b)


@lru_cache(maxsize=None)
def _monomial_to_hermite(m: int) -> tuple[tuple[int, int], ...]:
    terms = []
    for s in range(m // 2 + 1):
        coeff = math.factorial(m) // (2**s * math.factorial(s) * math.factorial(m - 2 * s))
        terms.append((m - 2 * s, coeff))
    return tuple(terms)


def monomial_to_hermite(m: int) -> Dict[int, Fraction]:
    """Hermite expansion of x**m: sum_s m!/(2^s s! (m-2s)!) H_{m-2s}."""
    _check_degree(m)
    return {degree: Fraction(coeff) for degree, coeff in _monomial_to_hermite(m)}


def chi2_moment(n: int, q: int) -> Fraction:
    """E[R^{2q}] for R^2 ~ chi2(n), as the telescoping product prod_{j<q} (n + 2j)."""
    if n < 1:
        raise InputError(f"chi-square degrees of freedom must be positive, got {n}")
    if q < 0:
        raise InputError(f"moment order must be non-negative, got {q}")
    return Fraction(math.prod(n + 2 * j for j in range(q)))


def double_factorial(m: int) -> int:
    """m!! for odd m >= -1, with (-1)!! = 1."""
    if m < -1 or m % 2 == 0:
        raise InputError(f"double factorial needs an odd integer >= -1, got {m}")
    return math.prod(range(m, 0, -2))


def factorial_multi(alpha: Sequence[int]) -> int:
    """prod_j alpha_j!, the squared norm of a multi-index Hermite basis element."""
    return math.prod(math.factorial(a) for a in alpha)
