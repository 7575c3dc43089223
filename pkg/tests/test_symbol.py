import pytest

import dyadic_hilbert.symbol as sym
from dyadic_hilbert.knfield import NotPrincipalUnit, kn_ctx
from dyadic_hilbert.oracle import quad_symbol
from dyadic_hilbert.scaled import PrecisionError
from dyadic_hilbert.symbol import (ConsistencyError, Params, TwistedClass, artin_hasse, chi_unit_factor,
                                   cup_product, get_engine, hilbert_symbol, symbol_table, symbol_via_cup,
                                   tr_map)

from conftest import CONFIGS


@pytest.fixture(params=CONFIGS, ids=lambda c: f"d{c[0]}n{c[1]}")
def setup(request):
    d, n = request.param
    P = Params(d, n)
    return P, get_engine(P).kctx


def test_params():
    P = Params(2, 3)
    assert (P.M, P.chi, P.modulus) == (19, 25, 8)
    assert P.doubled().G == 32
    for bad in [dict(d=1, n=1), dict(d=1, n=2, G=4), dict(d=9, n=2)]:
        with pytest.raises(ValueError):
            Params(**bad)


@pytest.mark.parametrize("n", range(2, 7))
def test_chi_unit_factor(n):
    assert chi_unit_factor(Params(1, n)) == 1 + (1 << (n - 1))


def test_trivial_values(setup, rng):
    P, k = setup
    x = k.random_principal_unit(rng)
    assert hilbert_symbol(k.one(), x, P).value == 0
    assert hilbert_symbol(x, k.one(), P).value == 0


def test_x_minus_x(setup, rng):
    # holds for every Steinberg symbol
    P, k = setup
    for _ in range(3):
        x = k.random_principal_unit(rng)
        assert hilbert_symbol(x, -x, P).value == 0


def test_known_value_quadratic_level():
    P = Params(1, 2)
    k = get_engine(P).kctx
    x, y = k.const(5), 1 + k.pibar()
    r = hilbert_symbol(x, y, P, cross_check=True)
    assert r.value == 2 and r.modulus == 4
    assert r.certificate.paths_agreed is True
    assert quad_symbol(x, y) == 1


def test_certificate_fields(setup, rng):
    P, k = setup
    x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
    r = hilbert_symbol(x, y, P)
    assert r.certificate.paths_agreed is None
    assert 0 <= r.certificate.guard_consumed < P.G
    assert r.certificate.recheck_precision == 0
    r2 = hilbert_symbol(x, y, Params(P.d, P.n, recheck=True))
    assert r2.value == r.value and r2.certificate.recheck_precision == 2 * P.G


def test_cup_path(setup, rng):
    P, k = setup
    x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
    r = symbol_via_cup(x, y, P)
    assert r.certificate.paths_agreed is True
    assert r.value == hilbert_symbol(x, y, P).value


def test_disagreement_is_reported(monkeypatch, rng):
    P = Params(1, 2)
    k = get_engine(P).kctx
    x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
    real = sym.Engine.cup_raw
    monkeypatch.setattr(sym.Engine, "cup_raw", lambda self, X, Y: real(self, X, Y) + 1)
    with pytest.raises(ConsistencyError):
        symbol_via_cup(x, y, P)
    assert hilbert_symbol(x, y, P, cross_check=True).certificate.paths_agreed is False


def test_precision_failure_retries_once(monkeypatch, rng):
    P = Params(1, 2)
    k = get_engine(P).kctx
    x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
    want = hilbert_symbol(x, y, P).value
    real = sym._evaluate
    seen = []

    def flaky(x, y, params, path, lifts=None):
        seen.append(params.G)
        if params.G == P.G:
            raise PrecisionError("simulated")
        return real(x, y, params, path, lifts)

    monkeypatch.setattr(sym, "_evaluate", flaky)
    assert hilbert_symbol(x, y, P).value == want
    assert seen == [16, 32]
    monkeypatch.setattr(sym, "_evaluate", lambda *a, **kw: (_ for _ in ()).throw(PrecisionError("x")))
    with pytest.raises(PrecisionError):
        hilbert_symbol(x, y, P)


def test_rejects_non_principal_units():
    P = Params(1, 3)
    k = get_engine(P).kctx
    with pytest.raises(NotPrincipalUnit):
        hilbert_symbol(k.pibar(), k.one(), P)
    with pytest.raises(NotPrincipalUnit):
        artin_hasse(k.const(2), P)


def test_element_from_other_precision(rng):
    P = Params(2, 2)
    other = kn_ctx(2, 2, 40)
    x = other.random_principal_unit(rng)
    y = get_engine(P).kctx.random_principal_unit(rng)
    assert hilbert_symbol(x, y, P).value == hilbert_symbol(get_engine(P).convert(x), y, P).value
    with pytest.raises(ValueError):
        hilbert_symbol(kn_ctx(1, 2, 18).one(), y, P)


def test_artin_hasse_zeta(setup, rng):
    P, k = setup
    x = k.random_principal_unit(rng)
    assert artin_hasse(x, P).value == hilbert_symbol(x, k.zeta(), P).value
    assert artin_hasse(k.zeta(), P).value == 0


def test_tr_map_interfaces(setup, rng):
    P, k = setup
    eng = get_engine(P)
    s = eng.sctx
    b = s.random(rng, lo=-4, hi=6)
    assert tr_map(TwistedClass(b), P) == tr_map(b, eng)
    X = eng.element(k.random_principal_unit(rng))
    Y = eng.element(k.random_principal_unit(rng))
    c = cup_product((X.m, X.nn), (Y.m, Y.nn), P)
    assert isinstance(c, TwistedClass)


def test_table_is_antisymmetric():
    P = Params(1, 3)
    k = get_engine(P).kctx
    gens = [k.const(5), 1 + k.pibar(), k.const(-1), k.zeta(), 1 + k.pibar() ** 3]
    T = symbol_table(gens, P)
    for i in range(len(gens)):
        for j in range(len(gens)):
            assert (T[i][j] + T[j][i]) % 8 == 0
    assert symbol_table(gens[:2], P, path="cup") == [row[:2] for row in T[:2]]
