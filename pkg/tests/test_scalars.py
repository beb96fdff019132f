import pytest

from jetstar.scalars import Scalar, rational


def test_construction_and_equality():
    assert Scalar(2) == Scalar(rational(4, 2))
    assert Scalar(1, 2) != Scalar(1)
    assert Scalar(rational("1/2")) == Scalar(rational(1, 2))


def test_field_arithmetic_exact():
    a = Scalar(rational(1, 3), rational(1, 2))
    b = Scalar(rational(-2, 7), 1)
    assert (a + b) - b == a
    assert a * b == b * a
    assert (a * b) / b == a
    product = a * b
    assert product.re == rational(1, 3) * rational(-2, 7) - rational(1, 2)
    assert product.im == rational(1, 3) + rational(1, 2) * rational(-2, 7)


def test_i_squares_to_minus_one():
    assert Scalar.i() * Scalar.i() == Scalar(-1)
    assert Scalar.i() ** 4 == Scalar(1)


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        Scalar(1) / Scalar(0)


def test_inverse_of_gaussian_value():
    z = Scalar(3, 4)
    inv = Scalar(1) / z
    assert z * inv == Scalar(1)
    assert inv == Scalar(rational(3, 25), rational(-4, 25))


def test_negative_power():
    z = Scalar(0, 2)
    assert z ** -2 == Scalar(rational(-1, 4))


def test_printing_forms():
    assert str(Scalar(rational(3, 2))) == "3/2"
    assert str(Scalar(0, 1)) == "i"
    assert str(Scalar(0, -1)) == "-i"
    assert str(Scalar(0, rational(-1, 2))) == "-1/2*i"
    assert str(Scalar(1, 1)) == "1 + i"
    assert str(Scalar(1, rational(-2, 3))) == "1 - 2/3*i"


def test_hashable_and_immutable():
    s = Scalar(1, 1)
    assert hash(s) == hash(Scalar(1, 1))
    with pytest.raises(AttributeError):
        s.re = rational(2)
