"""Finite Hermite expansions on R^n and their exact calculus.

A ChaosElement stores coefficients over sparse multi-indices: a multi-index is
a sorted tuple of ``(coordinate, degree)`` pairs with positive degrees and
0-based coordinates, so ``((0, 2), (2, 1))`` stands for H_2(x_1) H_1(x_3).
The Ornstein-Uhlenbeck generator acts spectrally: the degree-k part is an
eigenvector with eigenvalue -k.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Sequence, Tuple, Union

import numpy as np

from .exceptions import InputError, ResourceError
from .hermite import (
    factorial_multi,
    hermite_coeffs,
    hermite_eval,
    linearize_int,
    monomial_to_hermite,
)
from .moments import MAX_LEGS
from .utils import format_scalar, parse_scalar

MultiIndex = Tuple[Tuple[int, int], ...]
Point = Union[Sequence[Fraction], Sequence[float], np.ndarray]


def multi_index(degrees: Sequence[int]) -> MultiIndex:
    """Sparse multi-index from a dense degree vector."""
    if any(deg < 0 for deg in degrees):
        raise InputError("Multi-index degrees must be non-negative")
    return tuple((coord, deg) for coord, deg in enumerate(degrees) if deg)


def dense(alpha: MultiIndex, n: int) -> tuple[int, ...]:
    degrees = [0] * n
    for coord, deg in alpha:
        degrees[coord] = deg
    return tuple(degrees)


def total_degree(alpha: MultiIndex) -> int:
    return sum(deg for _, deg in alpha)


def _alpha_factorial(alpha: MultiIndex) -> int:
    return factorial_multi([deg for _, deg in alpha])


@dataclass(frozen=True)
class ChaosElement:
    """Polynomial on R^n expanded in products of Hermite polynomials."""

    n: int
    terms: tuple[tuple[MultiIndex, Fraction], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError("Ambient dimension must be positive")
        for alpha, coeff in self.terms:
            if coeff == 0:
                raise InputError("Zero coefficients are not stored")
            for coord, deg in alpha:
                if not 0 <= coord < self.n or deg <= 0:
                    raise InputError(f"Invalid multi-index {alpha} for dimension {self.n}")

    @classmethod
    def from_dict(cls, n: int, coeffs: Mapping[MultiIndex, Fraction]) -> "ChaosElement":
        cleaned = sorted(
            (tuple(sorted(alpha)), Fraction(coeff)) for alpha, coeff in coeffs.items() if coeff != 0
        )
        merged: Dict[MultiIndex, Fraction] = defaultdict(Fraction)
        for alpha, coeff in cleaned:
            merged[alpha] += coeff
        return cls(n, tuple((alpha, c) for alpha, c in sorted(merged.items()) if c != 0))

    @classmethod
    def constant(cls, n: int, value: Fraction | int = 1) -> "ChaosElement":
        return cls.from_dict(n, {(): Fraction(value)})

    @classmethod
    def hermite(
        cls, n: int, coordinate: int, degree: int, coeff: Fraction | int = 1
    ) -> "ChaosElement":
        """coeff * H_degree(x_{coordinate + 1})."""
        alpha: MultiIndex = ((coordinate, degree),) if degree else ()
        return cls.from_dict(n, {alpha: Fraction(coeff)})

    @property
    def coeffs(self) -> Dict[MultiIndex, Fraction]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((total_degree(alpha) for alpha, _ in self.terms), default=0)

    def is_pure(self, k: int) -> bool:
        return all(total_degree(alpha) == k for alpha, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def components(self) -> Dict[int, "ChaosElement"]:
        grouped: Dict[int, Dict[MultiIndex, Fraction]] = defaultdict(dict)
        for alpha, coeff in self.terms:
            grouped[total_degree(alpha)][alpha] = coeff
        return {k: ChaosElement.from_dict(self.n, part) for k, part in sorted(grouped.items())}

    def support(self) -> set[int]:
        return {coord for alpha, _ in self.terms for coord, _ in alpha}

    def map_coefficients(self, fn) -> "ChaosElement":  # type: ignore[no-untyped-def]
        return ChaosElement.from_dict(
            self.n, {alpha: fn(alpha, coeff) for alpha, coeff in self.terms}
        )

    def __add__(self, other: "ChaosElement") -> "ChaosElement":
        _same_dimension(self, other)
        acc: Dict[MultiIndex, Fraction] = defaultdict(Fraction, self.coeffs)
        for alpha, coeff in other.terms:
            acc[alpha] += coeff
        return ChaosElement.from_dict(self.n, acc)

    def __neg__(self) -> "ChaosElement":
        return self.scale(-1)

    def __sub__(self, other: "ChaosElement") -> "ChaosElement":
        return self + (-other)

    def scale(self, factor: Fraction | int) -> "ChaosElement":
        factor = Fraction(factor)
        return ChaosElement.from_dict(self.n, {alpha: c * factor for alpha, c in self.terms})

    def to_text(self) -> str:
        """Canonical text form `n; a_1:...:a_n=num/den; ...`."""
        items = [
            ":".join(str(deg) for deg in dense(alpha, self.n)) + "=" + format_scalar(coeff)
            for alpha, coeff in self.terms
        ]
        return "; ".join([str(self.n), *items])

    @classmethod
    def from_text(cls, text: str) -> "ChaosElement":
        parts = [part.strip() for part in text.strip().split(";")]
        try:
            n = int(parts[0])
        except ValueError as exc:
            raise InputError(f"Chaos element must start with its dimension: {text!r}") from exc
        coeffs: Dict[MultiIndex, Fraction] = defaultdict(Fraction)
        for item in parts[1:]:
            if not item:
                continue
            if "=" not in item:
                raise InputError(f"Malformed chaos term {item!r}")
            index_text, value_text = item.split("=", 1)
            try:
                degrees = [int(token) for token in index_text.split(":")]
            except ValueError as exc:
                raise InputError(f"Malformed multi-index {index_text!r}") from exc
            if len(degrees) != n:
                raise InputError(f"Multi-index {index_text!r} does not have {n} entries")
            coeffs[multi_index(degrees)] += parse_scalar(value_text)
        return cls.from_dict(n, coeffs)


def _same_dimension(f: ChaosElement, g: ChaosElement) -> None:
    if f.n != g.n:
        raise InputError(f"Dimension mismatch: {f.n} vs {g.n}")


def multiply(f: ChaosElement, g: ChaosElement) -> ChaosElement:
    """Hermite expansion of the pointwise product, coordinate by coordinate."""
    _same_dimension(f, g)
    acc: Dict[MultiIndex, Fraction] = defaultdict(Fraction)
    for alpha, a in f.terms:
        left = dict(alpha)
        for beta, b in g.terms:
            right = dict(beta)
            coords = sorted(left.keys() | right.keys())
            factors = [linearize_int(left.get(c, 0), right.get(c, 0)) for c in coords]
            base = a * b
            for choice in itertools.product(*factors):
                key = tuple((c, deg) for c, (deg, _) in zip(coords, choice) if deg)
                acc[key] += base * math.prod(weight for _, weight in choice)
    return ChaosElement.from_dict(f.n, acc)


def expectation(f: ChaosElement) -> Fraction:
    """Integral against gamma_n: the coefficient of the empty multi-index."""
    return f.coeffs.get((), Fraction(0))


def inner(f: ChaosElement, g: ChaosElement) -> Fraction:
    """E[FG] = sum_alpha f_alpha g_alpha alpha!."""
    _same_dimension(f, g)
    right = g.coeffs
    total = Fraction(0)
    for alpha, coeff in f.terms:
        other = right.get(alpha)
        if other is not None:
            total += coeff * other * _alpha_factorial(alpha)
    return total


def _product(factors: Sequence[ChaosElement]) -> ChaosElement:
    result = factors[0]
    for factor in factors[1:]:
        result = multiply(result, factor)
    return result


def product_expectation(fs: Sequence[ChaosElement], *, cap: int = MAX_LEGS) -> Fraction:
    """E[F_1 ... F_m], exact.

    The factors are split in two halves and only their inner product is taken,
    so the full product expansion is never formed.
    """
    if not fs:
        return Fraction(1)
    if cap > MAX_LEGS:
        raise ResourceError(f"Requested cap {cap} exceeds the hard cap of {MAX_LEGS}")
    total = sum(f.degree for f in fs)
    if total > cap:
        raise ResourceError(f"Product of total degree {total} exceeds the cap of {cap}")
    for f in fs[1:]:
        _same_dimension(fs[0], f)
    if len(fs) == 1:
        return expectation(fs[0])
    half = len(fs) // 2
    return inner(_product(fs[:half]), _product(fs[half:]))


def generator_apply(f: ChaosElement) -> ChaosElement:
    """L F = sum_k (-k) * (degree-k component of F)."""
    return f.map_coefficients(lambda alpha, coeff: -total_degree(alpha) * coeff)


def dirichlet(f: ChaosElement, g: ChaosElement) -> Fraction:
    """Integral of <grad F, grad G> d gamma_n, as -E[F L G]."""
    return -inner(f, generator_apply(g))


def gradient_square(f: ChaosElement) -> ChaosElement:
    """||grad F||^2 = (L(F^2) - 2 F LF) / 2, kept in the Hermite basis."""
    carre = generator_apply(multiply(f, f)) - multiply(f, generator_apply(f)).scale(2)
    return carre.scale(Fraction(1, 2))


def linear_form(v: Sequence[Fraction | int]) -> ChaosElement:
    """sum_j v_j H_1(x_j) for any rational vector."""
    return ChaosElement.from_dict(
        len(v), {((j, 1),): Fraction(value) for j, value in enumerate(v)}
    )


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head, *tail)


def hermite_of_linear_form(p: int, v: Sequence[Fraction | int]) -> ChaosElement:
    """H_p(<v, x>) = sum_{|alpha| = p} multinomial(p; alpha) v^alpha prod_j H_{alpha_j}(x_j)."""
    vector = [Fraction(value) for value in v]
    if sum(value * value for value in vector) != 1:
        raise InputError("hermite_of_linear_form needs an exact unit vector")
    if p < 0:
        raise InputError("Hermite degree must be non-negative")
    coeffs: Dict[MultiIndex, Fraction] = {}
    support = [j for j, value in enumerate(vector) if value != 0]
    for parts in _compositions(p, len(support)):
        multinomial = math.factorial(p) // math.prod(math.factorial(a) for a in parts)
        weight = Fraction(multinomial)
        for j, a in zip(support, parts):
            weight *= vector[j] ** a
        alpha = tuple((j, a) for j, a in zip(support, parts) if a)
        coeffs[alpha] = weight
    return ChaosElement.from_dict(len(vector), coeffs)


def to_monomials(f: ChaosElement) -> Dict[MultiIndex, Fraction]:
    """Monomial coefficients: keys are sparse exponent multi-indices."""
    acc: Dict[MultiIndex, Fraction] = defaultdict(Fraction)
    for alpha, coeff in f.terms:
        expansions = []
        for coord, deg in alpha:
            poly = hermite_coeffs(deg).monomial_coeffs
            expansions.append([(coord, j, c) for j, c in enumerate(poly) if c])
        for choice in itertools.product(*expansions):
            key = tuple((coord, j) for coord, j, _ in choice if j)
            acc[key] += coeff * math.prod((c for _, _, c in choice), start=Fraction(1))
    return {key: value for key, value in sorted(acc.items()) if value != 0}


def from_monomials(n: int, monomials: Mapping[MultiIndex, Fraction]) -> ChaosElement:
    """Inverse basis change: x^m = sum_s m!/(2^s s! (m-2s)!) H_{m-2s}."""
    acc: Dict[MultiIndex, Fraction] = defaultdict(Fraction)
    for exponents, coeff in monomials.items():
        expansions = [
            [(coord, deg, c) for deg, c in monomial_to_hermite(m).items()] for coord, m in exponents
        ]
        for choice in itertools.product(*expansions):
            key = tuple((coord, deg) for coord, deg, _ in choice if deg)
            acc[key] += Fraction(coeff) * math.prod((c for _, _, c in choice), start=Fraction(1))
    return ChaosElement.from_dict(n, acc)


def evaluate(f: ChaosElement, x: Point):  # type: ignore[no-untyped-def]
    """F at a single point (exact for rational input) or at each row of a sample matrix."""
    if isinstance(x, np.ndarray) and x.ndim == 2:
        if x.shape[1] != f.n:
            raise InputError(f"Sample matrix has {x.shape[1]} columns, expected {f.n}")
        total = np.zeros(x.shape[0])
        for alpha, coeff in f.terms:
            term = np.full(x.shape[0], float(coeff))
            for coord, deg in alpha:
                term = term * hermite_eval(deg, x[:, coord])
            total += term
        return total
    point = list(x)
    if len(point) != f.n:
        raise InputError(f"Point has {len(point)} coordinates, expected {f.n}")
    exact = all(isinstance(value, (Fraction, int)) for value in point)
    value = Fraction(0) if exact else 0.0
    for alpha, coeff in f.terms:
        term = coeff if exact else float(coeff)
        for coord, deg in alpha:
            term = term * hermite_eval(deg, point[coord])
        value = value + term
    return value
