from fractions import Fraction

import pytest

from chaoslab import utils
from chaoslab.exceptions import InputError


def test_generate_run_id_unique() -> None:
    run_id_1 = utils.generate_run_id()
    run_id_2 = utils.generate_run_id()
    assert run_id_1 != run_id_2
    assert run_id_1.startswith("campaign-")


def test_parse_scalar() -> None:
    assert utils.parse_scalar("3/4") == Fraction(3, 4)
    assert utils.parse_scalar(0.2) == Fraction(1, 5)
    assert utils.parse_scalar(-2) == -2
    with pytest.raises(InputError):
        utils.parse_scalar("three")
    with pytest.raises(InputError):
        utils.parse_scalar(True)


def test_format_scalar() -> None:
    assert utils.format_scalar(Fraction(27, 2)) == "27/2"
    assert utils.format_scalar(Fraction(4)) == "4"
    assert utils.format_scalar(0.5) == "0.5"


def test_instance_rng_is_deterministic() -> None:
    first = utils.instance_rng(7, 3).integers(1000, size=5)
    again = utils.instance_rng(7, 3).integers(1000, size=5)
    other = utils.instance_rng(7, 4).integers(1000, size=5)
    assert list(first) == list(again)
    assert list(first) != list(other)
