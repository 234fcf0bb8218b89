from fractions import Fraction

import pytest

from chaoslab.chaos import ChaosElement, linear_form
from chaoslab.exceptions import InputError, ResourceError
from chaoslab.generators import disjoint_family
from chaoslab.inequalities import (
    probe_complex,
    probe_gpc,
    verify_averaged_fourth,
    verify_frenkel_improved,
    verify_gradient_split,
    verify_hgp,
    verify_main,
    verify_negatif,
    verify_phi_monotone,
)
from chaoslab.moments import ComplexRational, ComplexVectorSet, CorrelationMatrix
from chaoslab.reports import Arithmetic, InequalityId, Status

HALF = Fraction(1, 2)
H1_PAIR = [ChaosElement.hermite(1, 0, 1), ChaosElement.hermite(1, 0, 1)]
GRID = [Fraction(1), Fraction(3, 4), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]


def test_main_inequality_on_correlated_pair() -> None:
    family = [ChaosElement.hermite(2, 0, 1), linear_form([Fraction(3, 5), Fraction(4, 5)])]
    report = verify_main(family)
    assert report.lhs == Fraction(43, 25)
    assert report.rhs == 1
    assert report.status is Status.HOLDS


def test_main_inequality_equality_on_independent_factors() -> None:
    report = verify_main(disjoint_family([1, 2]))
    assert report.lhs == report.rhs == 2
    assert report.status is Status.EQUALITY


def test_main_rejects_mixed_degrees() -> None:
    mixed = ChaosElement.hermite(1, 0, 1) + ChaosElement.hermite(1, 0, 2)
    with pytest.raises(InputError):
        verify_main([mixed])


def test_hgp() -> None:
    report = verify_hgp([2, 2], CorrelationMatrix.bivariate(HALF))
    assert (report.lhs, report.rhs) == (Fraction(27, 2), 4)
    assert report.status is Status.HOLDS
    assert verify_hgp([2, 3], CorrelationMatrix.identity(2)).status is Status.EQUALITY
    floating = verify_hgp([2, 2], CorrelationMatrix.bivariate(0.5))
    assert floating.arithmetic is Arithmetic.FLOAT
    assert floating.status is Status.HOLDS


def test_frenkel_improved() -> None:
    improved, plain = verify_frenkel_improved([(1, 1, 0), (1, 0, 1)])
    assert improved.inequality_id is InequalityId.FRENKEL_IMPROVED
    assert (improved.lhs, improved.rhs, plain.rhs) == (6, 4, 4)
    triple, _ = verify_frenkel_improved([(1, 1, 0), (1, 0, 1), (0, 1, 1)])
    assert (triple.lhs, triple.rhs) == (28, 12)


def test_averaged_fourth() -> None:
    identity = verify_averaged_fourth(CorrelationMatrix.identity(2))
    assert (identity.lhs, identity.rhs) == (15, 15)
    assert identity.status is Status.EQUALITY
    assert verify_averaged_fourth(CorrelationMatrix.bivariate(Fraction(1))).lhs == 111
    assert verify_averaged_fourth(CorrelationMatrix.identity(3)).rhs == 63
    assert verify_averaged_fourth(CorrelationMatrix.identity(3), include_singletons=False).rhs == 54
    with pytest.raises(ResourceError):
        verify_averaged_fourth(CorrelationMatrix.identity(5))


def test_gpc_probe() -> None:
    report = probe_gpc(CorrelationMatrix.bivariate(HALF), 2)
    assert report.inequality_id is InequalityId.GPC
    assert (report.lhs, report.rhs) == (Fraction(57, 2), 9)
    assert not report.is_finding
    assert probe_gpc(CorrelationMatrix.bivariate(HALF), 1).inequality_id is InequalityId.FRENKEL


def test_complex_probe_independent_equality() -> None:
    one = ComplexRational(Fraction(1), Fraction(0))
    zero = ComplexRational(Fraction(0), Fraction(0))
    report = probe_complex([1, 2], ComplexVectorSet(((one, zero), (zero, one))))
    assert report.status is Status.EQUALITY
    assert report.lhs == 16


def test_phi_monotone_reports_tightest_pair() -> None:
    report = verify_phi_monotone(H1_PAIR, GRID)
    assert report.status is Status.HOLDS
    assert (report.lhs, report.rhs) == (Fraction(2049, 2048), 1)


def test_negatif_and_gradient_split() -> None:
    negatif = verify_negatif(H1_PAIR, HALF)
    assert (negatif.lhs, negatif.rhs) == (0, Fraction(-1, 2))
    assert negatif.status is Status.HOLDS
    split = verify_gradient_split(H1_PAIR)
    assert (split.lhs, split.rhs) == (6, 2)
