"""Seeded random instances with exact coordinates.

Rational unit vectors come from inverse stereographic projection of points on
a small rational grid, v = (2t, |t|^2 - 1) / (|t|^2 + 1), so Gram matrices are
exactly PSD with an exact unit diagonal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

import numpy as np

from .chaos import ChaosElement, MultiIndex, hermite_of_linear_form, multi_index
from .exceptions import InputError
from .moments import ComplexRational, ComplexVectorSet, CorrelationMatrix
from .polarization import MultilinearForm

GRID = tuple(
    Fraction(value)
    for value in ("-2", "-3/2", "-1", "-1/2", "-1/3", "0", "1/3", "1/2", "1", "3/2", "2")
)
COEFF_GRID = tuple(Fraction(n, 4) for n in range(-8, 9) if n)


def _pick(rng: np.random.Generator, pool: Sequence[Fraction]) -> Fraction:
    return pool[int(rng.integers(len(pool)))]


def random_unit_vector(rng: np.random.Generator, n: int) -> tuple[Fraction, ...]:
    """Exact rational point on the unit sphere of R^n."""
    if n < 1:
        raise InputError("Dimension must be positive")
    if n == 1:
        return (Fraction(1 if rng.integers(2) else -1),)
    t = [_pick(rng, GRID) for _ in range(n - 1)]
    norm2 = sum(x * x for x in t)
    scale = 1 / (norm2 + 1)
    vector = [2 * x * scale for x in t] + [(norm2 - 1) * scale]
    # Spread the special last coordinate over a random position.
    position = int(rng.integers(n))
    vector[position], vector[-1] = vector[-1], vector[position]
    return tuple(vector)


def random_gram_correlation(
    rng: np.random.Generator, d: int, ambient: int | None = None
) -> CorrelationMatrix:
    vectors = [random_unit_vector(rng, ambient or d) for _ in range(d)]
    return CorrelationMatrix.from_gram(vectors)


def random_degrees(
    rng: np.random.Generator, d: int, max_degree: int, *, budget: int | None = None
) -> List[int]:
    """Degrees in [1, max_degree]; shrunk largest-first until sum <= budget."""
    degrees = [int(rng.integers(1, max_degree + 1)) for _ in range(d)]
    if budget is not None:
        if budget < d:
            raise InputError(f"A budget of {budget} cannot hold {d} positive degrees")
        while sum(degrees) > budget:
            degrees[degrees.index(max(degrees))] -= 1
    return degrees


def _random_composition(rng: np.random.Generator, total: int, parts: int) -> List[int]:
    cuts = sorted(int(c) for c in rng.integers(0, total + 1, size=parts - 1))
    bounds = [0, *cuts, total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def random_pure_chaos(
    rng: np.random.Generator, n: int, k: int, *, max_terms: int = 3
) -> ChaosElement:
    """Pure degree-k element with up to `max_terms` random multi-indices."""
    coeffs: dict[MultiIndex, Fraction] = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        coeffs[multi_index(_random_composition(rng, k, n))] = _pick(rng, COEFF_GRID)
    element = ChaosElement.from_dict(n, coeffs)
    if element.is_zero:
        return ChaosElement.hermite(n, 0, k)
    return element


def random_chaos_family(
    rng: np.random.Generator, d: int, n: int, max_degree: int, *, budget: int
) -> List[ChaosElement]:
    """d pure elements; odd draws use H_p(<v, x>) to get strongly correlated factors."""
    degrees = random_degrees(rng, d, max_degree, budget=budget)
    family = []
    for k in degrees:
        if rng.integers(2):
            family.append(hermite_of_linear_form(k, random_unit_vector(rng, n)))
        else:
            family.append(random_pure_chaos(rng, n, k))
    return family


def random_multilinear_form(
    rng: np.random.Generator, n: int, k: int, *, terms: int | None = None
) -> MultilinearForm:
    """Grid coefficients on random increasing index tuples, then normalized."""
    if not 1 <= k <= n:
        raise InputError("Multilinear forms need 1 <= k <= n")
    count = terms or int(rng.integers(1, n + 1))
    coeffs = {}
    for _ in range(count):
        index = tuple(sorted(int(i) + 1 for i in rng.choice(n, size=k, replace=False)))
        coeffs[index] = _pick(rng, COEFF_GRID)
    return MultilinearForm.from_dict(n, k, coeffs).normalized()


def random_complex_vectors(
    rng: np.random.Generator, d: int, ambient: int
) -> ComplexVectorSet:
    vectors = []
    half_grid = tuple(Fraction(n, 2) for n in range(-4, 5))
    for _ in range(d):
        while True:
            vector = tuple(
                ComplexRational(_pick(rng, half_grid), _pick(rng, half_grid))
                for _ in range(ambient)
            )
            if not all(z.is_zero for z in vector):
                break
        vectors.append(vector)
    return ComplexVectorSet(tuple(vectors))


def disjoint_family(degrees: Sequence[int]) -> List[ChaosElement]:
    """H_{k_i}(x_i) on separate coordinates: the independent equality fixture."""
    n = len(degrees)
    return [ChaosElement.hermite(n, i, k) for i, k in enumerate(degrees)]
