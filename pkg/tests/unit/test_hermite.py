import math
from fractions import Fraction

import pytest

from chaoslab.exceptions import InputError
from chaoslab.hermite import (
    chi2_moment,
    double_factorial,
    factorial_multi,
    hermite_coeffs,
    hermite_eval,
    linearize,
    monomial_to_hermite,
    normalized_hermite_eval,
)


def test_hermite_coeffs_follow_the_recursion() -> None:
    assert hermite_coeffs(0).monomial_coeffs == (Fraction(1),)
    assert hermite_coeffs(3).monomial_coeffs == (0, -3, 0, 1)
    assert hermite_coeffs(4)(Fraction(2)) == -5


def test_hermite_eval_matches_coefficients() -> None:
    for k in range(8):
        poly = hermite_coeffs(k)
        assert hermite_eval(k, Fraction(3, 2)) == poly(Fraction(3, 2))


def test_normalized_eval_divides_by_root_factorial() -> None:
    for k in (0, 3, 7):
        assert normalized_hermite_eval(k, 1.5) == pytest.approx(
            hermite_eval(k, 1.5) / math.sqrt(math.factorial(k))
        )


def test_linearize_squares() -> None:
    assert linearize(2, 2) == {4: 1, 2: 4, 0: 2}
    for k in range(6):
        assert linearize(k, k)[0] == math.factorial(k)


def test_monomial_to_hermite() -> None:
    assert monomial_to_hermite(4) == {4: 1, 2: 6, 0: 3}
    assert monomial_to_hermite(1) == {1: 1}


def test_scalar_helpers() -> None:
    assert chi2_moment(3, 2) == 15
    assert chi2_moment(5, 0) == 1
    assert double_factorial(5) == 15
    assert double_factorial(-1) == 1
    assert factorial_multi([2, 3]) == 12


def test_invalid_arguments_raise() -> None:
    with pytest.raises(InputError):
        hermite_coeffs(-1)
    with pytest.raises(InputError):
        double_factorial(4)
    with pytest.raises(InputError):
        chi2_moment(0, 1)


def test_chi2_moments_telescope() -> None:
    for n in range(1, 7):
        assert chi2_moment(n, 0) == 1
        for q in range(10):
            assert chi2_moment(n, q + 1) == (n + 2 * q) * chi2_moment(n, q)
    for q in range(12):
        assert chi2_moment(1, q) == double_factorial(2 * q - 1)
