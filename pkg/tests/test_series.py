import pytest

from dyadic_hilbert.coeff import ring_new
from dyadic_hilbert.scaled import PrecisionError
from dyadic_hilbert.series import (NotAUnit, SeriesCtx, WindowError, default_chi, default_N, res_of_product,
                                   s_D, s_gamma, s_invert, s_Log, s_Log_via_log1, s_phi, s_residue,
                                   s_Y, series_ctx)

from conftest import CONFIGS


@pytest.fixture(params=CONFIGS, ids=lambda c: f"d{c[0]}n{c[1]}")
def sctx(request):
    d, n = request.param
    return series_ctx(d, n)


def test_defaults():
    assert default_chi(2) == 5 and default_chi(3) == 25 and default_chi(4) == 625
    assert default_N(2, 18) == 4 * 19
    s = series_ctx(1, 2)
    assert (s.M, s.N, s.chi) == (18, 76, 5)


def test_canonical_form_strips_and_normalises(sctx):
    a = sctx.series([0, 0, 4, 8], scale=2)
    assert a.lo == 2 and a.scale == 0
    # each halving of the data costs one known bit
    assert a.identical(sctx.series([1, 2], lo=2, bits=sctx.M - 2))
    z = sctx.series([0, 0], scale=3)
    assert z.is_zero() and z.scale == 0


def test_equality_at_common_precision(sctx):
    a = sctx.series([1, 2, 3], prec=2)
    b = sctx.series([1, 2, 5, 7])
    assert a == b
    assert not a.identical(b)
    assert sctx.series([1, 2]) != sctx.series([1, 3])


def test_truncation_and_window(sctx):
    top = sctx.monomial(sctx.N)
    assert (top * sctx.pi_n()).is_zero()
    assert (top * sctx.pi_n()).prec == sctx.N + 1
    low = sctx.monomial(-sctx.N)
    with pytest.raises(WindowError):
        low * sctx.monomial(-1)


def test_multiplication_precision(sctx):
    a = sctx.series([1, 1], prec=5)
    b = sctx.series([0, 0, 1], lo=0, prec=7)
    assert (a * b).prec == min(2 + 5, 0 + 7)


def test_phi_and_gamma_on_generator(sctx):
    t = sctx.pi_n()
    assert s_phi(t) == (1 + t) ** 2 - 1
    assert s_gamma(t) == (1 + t) ** sctx.chi - 1
    pi = sctx.pi_of_level(0)
    assert s_gamma(pi) == (1 + pi) ** sctx.chi - 1
    for k in range(1, sctx.n + 1):
        assert s_phi(sctx.pi_of_level(k)) == sctx.pi_of_level(k - 1)


def test_phi_semilinear(sctx, rng):
    c = sctx.coeff.random(rng)
    assert s_phi(sctx.const(c)) == sctx.const(c.frobenius())


def test_derivation_rules(sctx, rng):
    f = sctx.random(rng, lo=0, hi=12)
    g = sctx.random(rng, lo=-3, hi=6)
    assert s_D(f * g) == s_D(f) * g + f * s_D(g)
    assert s_D(s_phi(f)) == s_phi(s_D(f)).scalar_int(2)
    assert s_D(s_gamma(f)) == s_gamma(s_D(f)).scalar_int(sctx.chi)
    assert s_D(1 + sctx.pi_n()) == 1 + sctx.pi_n()


def test_invert_power_series_and_laurent(sctx, rng):
    f = 1 + sctx.random(rng, lo=1, hi=10)
    assert f * s_invert(f) == 1
    pi = sctx.pi_of_level(0)
    assert pi * s_invert(pi) == 1
    assert s_invert(sctx.monomial(-3)) == sctx.monomial(3)
    with pytest.raises(NotAUnit):
        s_invert(sctx.series([2, 4, 6]))


def test_log_routes_agree(sctx, rng):
    for _ in range(3):
        f = 1 + sctx.random(rng, lo=1, hi=8)
        L = s_Log(f)
        assert L.scale == 0 and (L.is_zero() or L.lo >= 1)
        assert L == s_Log_via_log1(f)


def test_log_of_product(sctx, rng):
    f = 1 + sctx.random(rng, lo=1, hi=8)
    g = 1 + sctx.random(rng, lo=1, hi=8)
    assert s_Log(f * g) == s_Log(f) + s_Log(g)


def test_log_rejects_bad_input(sctx):
    with pytest.raises(ValueError):
        s_Log(sctx.series([3, 1]))
    with pytest.raises(ValueError):
        s_Log(sctx.monomial(-1) + 1)


def test_slide_identity(sctx, rng):
    f = 1 + sctx.random(rng, lo=1, hi=12)
    Y = s_Y(f)
    assert s_phi(Y) - Y == s_Log(f).mul_pow2(-1)


def test_residue(sctx, rng):
    c = sctx.coeff.random(rng)
    a = sctx.monomial(-1, c) + sctx.random(rng, lo=0, hi=5)
    r = s_residue(a)
    assert r.value == c and r.scale == 0
    b = sctx.random(rng, lo=-6, hi=6)
    assert res_of_product(a, b).value == s_residue(a * b).value


def test_residue_needs_precision(sctx):
    a = sctx.series([1], lo=-3, prec=-2)
    with pytest.raises(PrecisionError):
        s_residue(a)


def test_residue_of_dlog_pi():
    s = series_ctx(1, 2)
    pi = s.pi_of_level(0)
    # Res(D(pi)/pi * dpi_n/(1+pi_n)) = Res(dpi/pi) = 2^n
    dl = s_D(pi) * s_invert(pi)
    r = res_of_product(dl, s_invert(1 + s.pi_n()))
    assert r.value.coords[0] == 4 and r.scale == 0


def test_ctx_validation():
    with pytest.raises(ValueError):
        SeriesCtx(ring_new(1, 10), 1)
