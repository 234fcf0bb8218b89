"""Ornstein-Uhlenbeck semigroup on chaos expansions.

Time enters only through the contraction factor s = e^{-t}, so the exact path
never leaves rational arithmetic: P_t scales the degree-k component by s^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Union

import numpy as np

from .chaos import (
    ChaosElement,
    evaluate,
    generator_apply,
    inner,
    multiply,
    product_expectation,
    total_degree,
)
from .exceptions import InputError
from .moments import MAX_LEGS, ComplexVectorSet

MC_BLOCK = 4096


@dataclass(frozen=True)
class ContractionFactor:
    """s = e^{-t} with 0 < s <= 1."""

    s: Fraction

    def __post_init__(self) -> None:
        if not 0 < self.s <= 1:
            raise InputError(f"Contraction factor must lie in (0, 1], got {self.s}")


FactorLike = Union[ContractionFactor, Fraction, int, str]


def as_factor(value: FactorLike) -> ContractionFactor:
    if isinstance(value, ContractionFactor):
        return value
    return ContractionFactor(Fraction(value))


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    samples: int

    def within(self, target: float, sigmas: float = 4.0) -> bool:
        if self.std_error == 0.0:
            return math.isclose(self.estimate, target, rel_tol=1e-12, abs_tol=1e-12)
        return abs(self.estimate - target) <= sigmas * self.std_error


def semigroup_apply(f: ChaosElement, s: FactorLike) -> ChaosElement:
    factor = as_factor(s).s
    return f.map_coefficients(lambda alpha, coeff: coeff * factor ** total_degree(alpha))


def _summarize(values_sum: float, squares_sum: float, samples: int) -> MonteCarloEstimate:
    mean = values_sum / samples
    if samples < 2:
        return MonteCarloEstimate(mean, float("inf"), samples)
    variance = max(squares_sum / samples - mean * mean, 0.0) * samples / (samples - 1)
    return MonteCarloEstimate(mean, math.sqrt(variance / samples), samples)


def _blocks(samples: int) -> List[int]:
    full, rest = divmod(samples, MC_BLOCK)
    return [MC_BLOCK] * full + ([rest] if rest else [])


def mehler_mc(
    f: ChaosElement,
    s: FactorLike,
    x: Sequence[float],
    samples: int,
    seed: int,
) -> MonteCarloEstimate:
    """Average of F(s x + sqrt(1 - s^2) y) over y ~ gamma_n.

    Samples are drawn in fixed-size blocks, block b from the b-th child of
    ``SeedSequence(seed)``, so the estimate depends on the seed only.
    """
    if samples < 1:
        raise InputError("mehler_mc needs at least one sample")
    factor = as_factor(s).s
    point = np.array([float(value) for value in x])
    if point.shape != (f.n,):
        raise InputError(f"Point has {point.size} coordinates, expected {f.n}")
    if factor == 1:
        value = float(evaluate(f, point.reshape(1, -1))[0])
        return MonteCarloEstimate(value, 0.0, samples)
    contraction = float(factor)
    noise = math.sqrt(1.0 - contraction * contraction)
    sizes = _blocks(samples)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    total = total_sq = 0.0
    for child, size in zip(children, sizes):
        y = np.random.default_rng(child).standard_normal((size, f.n))
        values = evaluate(f, contraction * point + noise * y)
        total += float(values.sum())
        total_sq += float((values * values).sum())
    return _summarize(total, total_sq, samples)


def _require_pure(fs: Sequence[ChaosElement]) -> None:
    if not fs:
        raise InputError("At least one chaos element is required")
    for index, f in enumerate(fs, start=1):
        if f.is_zero or not f.is_pure(f.degree):
            raise InputError(f"Element {index} is not a pure chaos element")


def _squared_images(fs: Sequence[ChaosElement], s: FactorLike) -> List[ChaosElement]:
    return [semigroup_apply(multiply(f, f), s) for f in fs]


def phi_curve(
    fs: Sequence[ChaosElement], grid: Sequence[FactorLike], *, cap: int = MAX_LEGS
) -> List[Fraction]:
    """phi(s) = E[prod_i P_t(F_i^2)] at each grid point."""
    _require_pure(fs)
    return [product_expectation(_squared_images(fs, s), cap=cap) for s in grid]


def phi_limit(fs: Sequence[ChaosElement]) -> Fraction:
    """Value of phi as t goes to infinity: prod_i E[F_i^2]."""
    _require_pure(fs)
    return math.prod((inner(f, f) for f in fs), start=Fraction(1))


def negatif_functional(
    fs: Sequence[ChaosElement], s: FactorLike, *, cap: int = MAX_LEGS
) -> Fraction:
    """sum_i E[L P_t(F_i^2) prod_{j != i} P_t(F_j^2)], which equals phi'(t)."""
    _require_pure(fs)
    images = _squared_images(fs, s)
    total = Fraction(0)
    for i, image in enumerate(images):
        others = images[:i] + images[i + 1 :]
        total += product_expectation([generator_apply(image), *others], cap=cap)
    return total


def complex_moment_mc(
    p: Sequence[int], a: ComplexVectorSet, samples: int, seed: int
) -> MonteCarloEstimate:
    """Monte Carlo estimate of E[|G_1^{p_1} ... G_d^{p_d}|^2] with Z = X + iY."""
    if samples < 1:
        raise InputError("complex_moment_mc needs at least one sample")
    if len(p) != a.d:
        raise InputError("One exponent per complex vector is required")
    vectors = np.array([[complex(z) for z in vector] for vector in a.vectors])
    exponents = np.array(p, dtype=float)
    width = vectors.shape[1]
    sizes = _blocks(samples)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    total = total_sq = 0.0
    for child, size in zip(children, sizes):
        rng = np.random.default_rng(child)
        z = rng.standard_normal((size, width)) + 1j * rng.standard_normal((size, width))
        g = z @ vectors.T
        values = np.prod(np.abs(g) ** (2 * exponents), axis=1)
        total += float(values.sum())
        total_sq += float((values * values).sum())
    return _summarize(total, total_sq, samples)
