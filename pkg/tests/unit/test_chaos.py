import math
from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest

from chaoslab.chaos import (
    ChaosElement,
    dense,
    dirichlet,
    evaluate,
    from_monomials,
    generator_apply,
    gradient_square,
    hermite_of_linear_form,
    inner,
    linear_form,
    multiply,
    product_expectation,
    to_monomials,
)
from chaoslab.exceptions import InputError, ResourceError
from chaoslab.generators import random_pure_chaos, random_unit_vector
from chaoslab.moments import CorrelationMatrix, isserlis_moment, squared_hermite_moment


def h(n: int, coordinate: int, degree: int) -> ChaosElement:
    return ChaosElement.hermite(n, coordinate, degree)


def test_multiply_linearizes() -> None:
    assert multiply(h(1, 0, 1), h(1, 0, 1)) == h(1, 0, 2) + ChaosElement.constant(1)
    mixed = multiply(h(2, 0, 1), h(2, 1, 1))
    assert mixed.coeffs == {((0, 1), (1, 1)): 1}


def test_expectations() -> None:
    assert product_expectation([h(1, 0, 1)] * 4) == 3
    assert inner(h(1, 0, 2), h(1, 0, 2)) == 2
    assert product_expectation([]) == 1


def test_hermite_of_linear_form() -> None:
    f = hermite_of_linear_form(2, (Fraction(3, 5), Fraction(4, 5)))
    assert f.coeffs == {
        ((0, 2),): Fraction(9, 25),
        ((0, 1), (1, 1)): Fraction(24, 25),
        ((1, 2),): Fraction(16, 25),
    }
    assert inner(f, f) == 2
    with pytest.raises(InputError):
        hermite_of_linear_form(2, (1, 1))


def test_monomial_basis_change() -> None:
    f = h(1, 0, 2)
    assert to_monomials(f) == {((0, 2),): 1, (): -1}
    g = hermite_of_linear_form(3, (Fraction(3, 5), Fraction(-4, 5)))
    assert from_monomials(2, to_monomials(g)) == g


def test_generator_and_dirichlet_form() -> None:
    f = h(1, 0, 2) + h(1, 0, 1)
    assert generator_apply(f) == h(1, 0, 2).scale(-2) - h(1, 0, 1)
    assert dirichlet(h(1, 0, 2), h(1, 0, 2)) == 4


def test_gradient_square_of_linear_form() -> None:
    assert gradient_square(h(1, 0, 1)) == ChaosElement.constant(1, 1)
    f = linear_form([1, 2])
    assert gradient_square(f) == ChaosElement.constant(2, 5)


def test_text_form() -> None:
    f = ChaosElement.from_text("2; 1:1=3/4; 0:2=-1")
    assert f.coeffs == {((0, 1), (1, 1)): Fraction(3, 4), ((1, 2),): -1}
    assert f.to_text() == "2; 1:1=3/4; 0:2=-1"
    with pytest.raises(InputError):
        ChaosElement.from_text("2; 1:1:1=1")


def test_evaluate() -> None:
    assert evaluate(h(1, 0, 2), [Fraction(3)]) == 8
    samples = np.array([[0.0], [1.0], [2.0]])
    assert np.allclose(evaluate(h(1, 0, 2), samples), [-1.0, 0.0, 3.0])


def test_pure_and_components() -> None:
    f = h(2, 0, 2) + h(2, 1, 1)
    assert not f.is_pure(2)
    assert set(f.components()) == {1, 2}
    assert f.degree == 2


def test_product_cap() -> None:
    with pytest.raises(ResourceError):
        product_expectation([h(1, 0, 15), h(1, 0, 15)])


def _random_element(rng: np.random.Generator, n: int, max_degree: int) -> ChaosElement:
    element = random_pure_chaos(rng, n, int(rng.integers(1, max_degree + 1)))
    for _ in range(int(rng.integers(0, 3))):
        element = element + random_pure_chaos(rng, n, int(rng.integers(1, max_degree + 1)))
    return element


def _expectation_via_monomials(f: ChaosElement) -> Fraction:
    return sum(
        (coeff * isserlis_moment(dense(alpha, f.n), CorrelationMatrix.identity(f.n))
         for alpha, coeff in to_monomials(f).items()),
        start=Fraction(0),
    )


def _partial(monomials: dict, coordinate: int) -> dict:
    out: dict = defaultdict(Fraction)
    for alpha, coeff in monomials.items():
        powers = dict(alpha)
        power = powers.get(coordinate, 0)
        if power:
            powers[coordinate] = power - 1
            out[tuple(sorted((c, p) for c, p in powers.items() if p))] += coeff * power
    return out


def test_parseval_against_monomial_expectation() -> None:
    rng = np.random.default_rng(3)
    for _ in range(40):
        f = _random_element(rng, 2, 3)
        g = _random_element(rng, 2, 3)
        assert inner(f, g) == _expectation_via_monomials(multiply(f, g))
        assert inner(f, f) == sum(
            (coeff * coeff * math.prod(math.factorial(deg) for _, deg in alpha) for alpha, coeff in f.terms),
            start=Fraction(0),
        )


def test_generator_eigenvalues_on_random_pure_elements() -> None:
    rng = np.random.default_rng(5)
    for _ in range(50):
        k = int(rng.integers(1, 5))
        f = random_pure_chaos(rng, 3, k)
        assert generator_apply(f) == f.scale(-k)


def test_integration_by_parts_matches_monomial_calculus() -> None:
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(1, 4))
        f = _random_element(rng, n, 3)
        g = _random_element(rng, n, 3)
        mono_f, mono_g = to_monomials(f), to_monomials(g)
        gradient_pairing = sum(
            (inner(from_monomials(n, _partial(mono_f, j)), from_monomials(n, _partial(mono_g, j)))
             for j in range(n)),
            start=Fraction(0),
        )
        assert dirichlet(f, g) == gradient_pairing
        assert dirichlet(f, g) == -inner(f, generator_apply(g))
    f = _random_element(rng, 2, 3)
    assert product_expectation([gradient_square(f)]) == dirichlet(f, f)


def test_squares_of_hermite_linear_forms_match_the_matching_sum() -> None:
    rng = np.random.default_rng(9)
    for _ in range(30):
        d = int(rng.integers(1, 4))
        vectors = [random_unit_vector(rng, 2) for _ in range(d)]
        degrees = [int(rng.integers(1, 4)) for _ in range(d)]
        factors = [hermite_of_linear_form(p, v) for p, v in zip(degrees, vectors)]
        squares = [f for f in factors for _ in range(2)]
        correlation = CorrelationMatrix.from_gram(vectors)
        assert product_expectation(squares) == squared_hermite_moment(degrees, correlation)
