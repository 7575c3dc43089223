import pytest

from dyadic_hilbert.knfield import kn_ctx
from dyadic_hilbert.oracle import (OracleConfigError, QuadOracleCtx, parity_check, quad_symbol,
                                   quad_symbol_stable, to_gaussian)


@pytest.fixture
def k():
    return kn_ctx(1, 2, 18)


def test_search_modulus_must_be_even():
    QuadOracleCtx(10)
    for bad in (7, 0):
        with pytest.raises(OracleConfigError):
            QuadOracleCtx(bad)


def test_gaussian_coordinates(k):
    # 1 + pibar = i
    assert to_gaussian(1 + k.pibar(), 4) == (0, 1)
    assert to_gaussian(k.const(5), 4) == (5, 0)


def test_classical_values(k, rng):
    one = k.one()
    i = 1 + k.pibar()
    assert quad_symbol(one, k.const(5)) == 1
    # -1 = i^2 is a square in Q_2(i)
    assert quad_symbol(k.const(-1), k.const(-1)) == 1
    for _ in range(10):
        x = k.random_principal_unit(rng)
        assert quad_symbol(x, -x) == 1
        assert quad_symbol(x, x * x) == 1
        assert quad_symbol(x, i * i) == 1


def test_symmetry_and_bilinearity(k, rng):
    for _ in range(10):
        x, y, z = (k.random_principal_unit(rng) for _ in range(3))
        assert quad_symbol(x, y) == quad_symbol(y, x)
        assert quad_symbol(x, y * z) == quad_symbol(x, y) * quad_symbol(x, z)


def test_both_verdicts_occur(k, rng):
    seen = {quad_symbol_stable(*(k.random_principal_unit(rng) for _ in range(2))) for _ in range(30)}
    assert seen == {1, -1}


def test_rejects_other_fields_and_non_units(k):
    with pytest.raises(OracleConfigError):
        quad_symbol(kn_ctx(1, 3, 18).one(), kn_ctx(1, 3, 18).one())
    with pytest.raises(OracleConfigError):
        quad_symbol(k.pibar(), k.one())


def test_parity_check_accepts_ints(k):
    assert parity_check(k.const(5), 1 + k.pibar(), 2)
    assert not parity_check(k.const(5), 1 + k.pibar(), 1)
