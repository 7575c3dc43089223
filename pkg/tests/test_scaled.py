import pytest

from dyadic_hilbert.scaled import IntegralityError, PrecisionError, ScaledInt


def test_canonical_form():
    x = ScaledInt.make(12, 3, 10)
    assert (x.value, x.scale, x.bits) == (3, 1, 8)
    assert x.abs_bits == 7


def test_arithmetic_tracks_precision():
    a = ScaledInt.make(5, 0, 10)
    b = ScaledInt.make(3, 1, 6)
    s = a + b
    assert s.scale == 1 and s.abs_bits == 5
    assert (s * 2).is_integral()
    assert (s * 2).value == (10 + 3) % (1 << 6)


def test_mod_checks():
    with pytest.raises(IntegralityError):
        ScaledInt.make(1, 1, 10).mod(2)
    with pytest.raises(PrecisionError):
        ScaledInt.make(1, 0, 2).mod(4)
    assert ScaledInt.make(-1, 0, 8).mod(3) == 7
