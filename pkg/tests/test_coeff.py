import pytest
from hypothesis import given, strategies as st

from dyadic_hilbert.coeff import (CONWAY, CoeffError, NotInvertible, _gf2_irreducible, coeff_inv,
                                  frobenius, ring_new, teichmuller, trace_K)


@pytest.mark.parametrize("d", sorted(CONWAY))
def test_defining_polynomials_irreducible(d):
    assert _gf2_irreducible(CONWAY[d])


def test_reducible_detected():
    assert not _gf2_irreducible((1, 0, 1))  # x^2 + 1 = (x + 1)^2
    assert not _gf2_irreducible((0, 1, 1))


def coords(d, M):
    return st.tuples(*[st.integers(0, (1 << M) - 1) for _ in range(d)])


@pytest.mark.parametrize("d,M", [(1, 10), (2, 18), (5, 33), (8, 70)])
def test_ring_axioms(d, M):
    ctx = ring_new(d, M)

    @given(coords(d, M), coords(d, M), coords(d, M))
    def check(a, b, c):
        a, b, c = ctx.elem(a), ctx.elem(b), ctx.elem(c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == ctx.zero()
        assert frobenius(a * b) == frobenius(a) * frobenius(b)

    check()


@pytest.mark.parametrize("d", range(1, 9))
def test_frobenius_order_and_trace(d, rng):
    ctx = ring_new(d, 24)
    for _ in range(20):
        a = ctx.random(rng)
        conj = [a]
        for _ in range(d - 1):
            conj.append(conj[-1].frobenius())
        assert conj[-1].frobenius() == a
        total = ctx.zero()
        for c in conj:
            total = total + c
        # the sum of conjugates is rational and equals the trace
        assert total == ctx.elem([trace_K(a)] + [0] * (d - 1))


def test_frobenius_is_squaring_mod_2(rng):
    ctx = ring_new(4, 12)
    for _ in range(20):
        a = ctx.random(rng)
        diff = frobenius(a) - a * a
        assert all(c % 2 == 0 for c in diff.coords)


def test_trace_of_one():
    for d in range(1, 9):
        assert trace_K(ring_new(d, 20).one()) == d


@pytest.mark.parametrize("d", [1, 2, 3, 6])
def test_teichmuller(d):
    ctx = ring_new(d, 30)
    for r in range(1 << d):
        t = teichmuller(ctx, r)
        assert t ** (1 << d) == t
        assert frobenius(t) == t * t
    assert teichmuller(ctx, 0) == ctx.zero()
    assert teichmuller(ctx, 1) == ctx.one()


def test_inverse(rng):
    ctx = ring_new(3, 40)
    for _ in range(30):
        u = ctx.random(rng, unit=True)
        assert u * coeff_inv(u) == ctx.one()
    with pytest.raises(NotInvertible):
        coeff_inv(ctx.elem([2, 4, 6]))


def test_valuation():
    ctx = ring_new(2, 16)
    assert ctx.elem([8, 4]).valuation() == 2
    assert ctx.elem([3, 0]).is_unit()
    assert not ctx.elem([2, 0]).is_unit()


def test_bad_parameters():
    with pytest.raises(CoeffError):
        ring_new(9, 10)
    with pytest.raises(CoeffError):
        ring_new(2, 0)


def test_mixed_contexts_rejected():
    a = ring_new(2, 16).one()
    b = ring_new(2, 17).one()
    with pytest.raises((CoeffError, TypeError, ValueError)):
        a + b
