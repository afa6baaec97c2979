import random

import pytest

from mdconv.field import FieldElement, FieldError, FieldSpec, field_arith


def test_modular_reduction_examples():
    f3 = FieldSpec(3)
    assert f3.element(2) + f3.element(2) == f3.element(1)
    f5 = FieldSpec(5)
    assert f5.element(3) * f5.element(2) == f5.element(1)
    assert f5.element(1) / f5.element(3) == f5.element(2)
    f2 = FieldSpec(2)
    assert f2.element(1) - f2.element(1) == f2.element(0)


def test_prime_validation():
    for bad in (0, 1, 4, 9, 3 * 2731, (1 << 13) + 1):
        with pytest.raises(FieldError):
            FieldSpec(bad)
    for ok in (2, 3, 5, 7, 8191):
        FieldSpec(ok)


def test_mismatched_specs_rejected():
    a = FieldSpec(3).element(1)
    b = FieldSpec(5).element(1)
    with pytest.raises(FieldError):
        _ = a + b
    with pytest.raises(FieldError):
        field_arith(a, b, "mul")


def test_division_by_zero():
    f = FieldSpec(7)
    with pytest.raises(ZeroDivisionError):
        _ = f.element(3) / f.element(0)
    with pytest.raises(ZeroDivisionError):
        f.element(0).inverse()


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13, 8191])
def test_field_axioms_randomized(p):
    rng = random.Random(p)
    f = FieldSpec(p)
    for _ in range(1000):
        a, b, c = (f.element(rng.randrange(p)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a + b) - b == a
        if a.value:
            assert a * (f.one() / a) == f.one()
            assert a * a.inverse() == f.one()


def test_dispatch_table():
    f = FieldSpec(5)
    a, b = f.element(4), f.element(3)
    assert field_arith(a, b, "add") == f.element(2)
    assert field_arith(a, b, "sub") == f.element(1)
    assert field_arith(a, b, "mul") == f.element(2)
    assert field_arith(a, b, "div") == f.element(3)
    with pytest.raises(ValueError):
        field_arith(a, b, "pow")


def test_immutability_and_hash():
    f = FieldSpec(3)
    a = f.element(2)
    with pytest.raises(AttributeError):
        a.value = 0
    assert hash(f.element(2)) == hash(a)
    assert a == 2 and a != 1
