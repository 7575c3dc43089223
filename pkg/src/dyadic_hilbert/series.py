"""Windowed Laurent series over O_K/2^M in the variable pi_n.

A Series stores the coefficients of exponents lo .. lo+L-1 as a (d, L) array
together with

* ``scale``: the value is 2^-scale times the stored data,
* ``bits``: the data is known modulo 2^bits (bits <= M),
* ``prec``: the series is known modulo pi_n^prec (None means exact).

Exponents above the degree cap N are truncated and exponents below -N must
vanish, otherwise :class:`WindowError` is raised.  The operators phi and gamma
are integer matrices applied column-wise and cached on the context.
"""

import math
from functools import lru_cache

import numpy as np

from . import kernels
from .coeff import CoeffCtx, CoeffElem
from .scaled import EXACT_BITS, IntegralityError, PrecisionError, ScaledInt


class WindowError(ArithmeticError):
    pass


class NotAUnit(ArithmeticError):
    pass


def _pmin(*ps):
    vals = [p for p in ps if p is not None]
    return min(vals) if vals else None


def _v2(m):
    return (m & -m).bit_length() - 1


def default_N(n, M):
    return (1 << n) * (M + 1)


def default_chi(n):
    return 5 ** (1 << (n - 2))


class ScaledCoeff:
    """A coefficient 2^-scale * value with value known mod 2^bits."""

    __slots__ = ("value", "scale", "bits")

    def __init__(self, value, scale, bits):
        self.value = value
        self.scale = scale
        self.bits = bits

    def trace(self):
        return ScaledInt.make(self.value.trace(), self.scale, self.bits)

    def __repr__(self):
        return f"ScaledCoeff({self.value!r}, scale={self.scale}, bits={self.bits})"


class SeriesCtx:
    def __init__(self, coeff, n, N=None, chi=None, guard=0):
        if not isinstance(coeff, CoeffCtx):
            raise TypeError("coeff must be a CoeffCtx")
        if n < 2:
            raise ValueError("level n must be at least 2")
        self.coeff = coeff
        self.n = n
        self.M = coeff.M
        self.d = coeff.d
        self.N = default_N(n, coeff.M) if N is None else int(N)
        if self.N < (1 << n):
            raise ValueError("degree cap N must be at least 2^n")
        self.chi = default_chi(n) if chi is None else int(chi)
        if self.chi % (1 << n) != 1 or self.chi % (1 << (n + 1)) == 1:
            raise ValueError("chi must be 1 mod 2^n and not 1 mod 2^(n+1)")
        self.guard = guard
        self.dtype = coeff.dtype
        self.wd = np.array(coeff.wd, dtype=self.dtype)
        self._wd1 = np.zeros(1, dtype=self.dtype)
        # log1 integrates with denominators up to N
        self.V = self.N.bit_length() - 1
        self._phi_pos = None
        self._phi_neg = np.zeros((0, 0), dtype=self.dtype)
        self._gamma = np.zeros((0, 0), dtype=self.dtype)
        self._u_inv = None
        self._u_pows = {}
        self._wider = {}

    def __repr__(self):
        return f"SeriesCtx(d={self.d}, n={self.n}, M={self.M}, N={self.N}, chi={self.chi})"

    def widened(self, N):
        """Same ring with a larger window, used for intermediate results."""
        if N <= self.N:
            return self
        if N not in self._wider:
            self._wider[N] = SeriesCtx(self.coeff, self.n, N, self.chi, self.guard)
        return self._wider[N]

    # -- constructors ---------------------------------------------------------

    def series(self, coeffs, lo=0, scale=0, prec=None, bits=None):
        """Build a series from a list of coefficients (ints, tuples or CoeffElem)."""
        L = len(coeffs)
        data = self.coeff.zeros(L)
        for k, c in enumerate(coeffs):
            if isinstance(c, CoeffElem):
                c = c.coords
            elif isinstance(c, int):
                c = self.coeff._const(c)
            else:
                c = tuple(int(x) & self.coeff.mask for x in c)
            for i in range(self.d):
                data[i, k] = c[i]
        return Series.make(self, lo, data, scale, prec, self.M if bits is None else bits)

    def zero(self, prec=None):
        return Series.make(self, 0, self.coeff.zeros(0), 0, prec, self.M)

    def one(self):
        return self.const(1)

    def const(self, c):
        return self.series([c])

    def monomial(self, e, c=1):
        return self.series([c], lo=e)

    def pi_n(self):
        return self.monomial(1)

    def pi_of_level(self, k):
        """(1+pi_n)^(2^(n-k)) - 1, i.e. pi_k written in pi_n; k=0 gives pi."""
        if not 0 <= k <= self.n:
            raise ValueError("level must satisfy 0 <= k <= n")
        q = 1 << (self.n - k)
        return self.series([0] + [math.comb(q, j) for j in range(1, q + 1)])

    def log1p_pi_n(self):
        """log(1 + pi_n) = sum (-1)^(k+1) pi_n^k / k, scale V."""
        coeffs = [0]
        for k in range(1, self.N + 1):
            v = _v2(k)
            c = (pow(k >> v, -1, self.coeff.mod) << (self.V - v)) & self.coeff.mask
            coeffs.append(c if k & 1 else -c)
        return self.series(coeffs, scale=self.V, prec=self.N + 1)

    def random(self, rng, lo=0, hi=10, scale=0):
        coeffs = [self.coeff.random(rng) for _ in range(hi - lo + 1)]
        return self.series(coeffs, lo=lo, scale=scale)

    # -- cached operator matrices --------------------------------------------

    def _int_polymul(self, a, b, out_len):
        """Product of two integer series given as 1-d arrays."""
        return kernels.polymul(a.reshape(1, -1), b.reshape(1, -1), self._wd1, self.M, out_len)[0]

    def phi_matrix(self):
        """Q[k, j] = coefficient of pi_n^k in (pi_n^2 + 2 pi_n)^j, 0 <= j, k <= N."""
        if self._phi_pos is None:
            R = self.N + 1
            Q = np.zeros((R, R), dtype=self.dtype)
            col = np.zeros(R, dtype=self.dtype)
            col[0] = 1
            for j in range(R):
                Q[:, j] = col
                nxt = np.zeros(R, dtype=self.dtype)
                nxt[1:] = col[:-1] * self.dtype(2) if self.dtype is np.uint64 else col[:-1] * 2
                nxt[2:] += col[:-2]
                col = self.coeff.reduce(nxt)
            self._phi_pos = Q
        return self._phi_pos

    def phi_neg_matrix(self, K):
        """Row r-1 / column k-1: coefficient of pi_n^-r in phi(pi_n^-k), 1 <= k <= K."""
        if self._phi_neg.shape[1] < K:
            M, mask = self.M, self.coeff.mask
            rows = 2 * K + M - 1
            P = np.zeros((rows, K), dtype=self.dtype)
            for k in range(1, K + 1):
                for j in range(M):
                    c = math.comb(k + j - 1, j) << j
                    if c & mask == 0:
                        continue
                    P[2 * k + j - 1, k - 1] = (-c if j & 1 else c) & mask
            self._phi_neg = P
        K0 = K
        return self._phi_neg[: 2 * K0 + self.M - 1, :K0]

    def gamma_series(self, R):
        """gamma(pi_n) = (1+pi_n)^chi - 1 truncated to R terms."""
        out = np.zeros(R, dtype=self.dtype)
        mask = self.coeff.mask
        for k in range(1, min(R, self.chi + 1)):
            out[k] = math.comb(self.chi, k) & mask
        return out

    def gamma_matrix(self, R):
        """G[k, j] = coefficient of pi_n^k in gamma(pi_n)^j, 0 <= j, k < R."""
        if self._gamma.shape[0] < R:
            R2 = max(R, min(2 * self._gamma.shape[0], 2 * self.N + 1))
            g = self.gamma_series(R2)
            G = np.zeros((R2, R2), dtype=self.dtype)
            col = np.zeros(R2, dtype=self.dtype)
            col[0] = 1
            for j in range(R2):
                G[:, j] = col
                col = self._int_polymul(col[j:], g, R2 - j)
                col = np.concatenate([np.zeros(j, dtype=self.dtype), col])
            self._gamma = G
        return self._gamma[:R, :R]

    def u_inverse_power(self, k, R):
        """(gamma(pi_n)/pi_n)^-k as an integer power series of length R."""
        key = (k, R)
        if key not in self._u_pows:
            if self._u_inv is None or len(self._u_inv) < R:
                U = self.gamma_series(R + 1)[1:]
                self._u_inv = _power_inverse(self, U.reshape(1, -1), R, d1=True)[0]
            base = self._u_inv[:R]
            result = np.zeros(R, dtype=self.dtype)
            result[0] = 1
            e = k
            while e:
                if e & 1:
                    result = self._int_polymul(result, base, R)
                e >>= 1
                if e:
                    base = self._int_polymul(base, base, R)
            if len(self._u_pows) > 64:
                self._u_pows.clear()
            self._u_pows[key] = result
        return self._u_pows[key]


def _power_inverse(ctx, b, P, d1=False):
    """Inverse of a power series with unit constant term, as a raw (d, P) array."""
    if d1:
        c0 = int(b[0, 0])
        if c0 % 2 == 0:
            raise NotAUnit("not a unit in A_{K_n}")
        t = np.zeros((1, 1), dtype=ctx.dtype)
        t[0, 0] = pow(c0, -1, ctx.coeff.mod)
        wd = ctx._wd1
    else:
        c0 = ctx.coeff.column(b, 0)
        if not c0.is_unit():
            raise NotAUnit("not a unit in A_{K_n}")
        t = ctx.coeff.asarray(c0.inv().coords)
        wd = ctx.wd
    M = ctx.M
    k = 1
    while k < P:
        k = min(2 * k, P)
        bt = kernels.polymul(b[:, :k], t, wd, M, k)
        e = ctx.coeff.reduce(-bt) if bt.dtype != np.uint64 else (np.uint64(0) - bt)
        e[:1, :1] += 2
        e = ctx.coeff.reduce(e)
        t = kernels.polymul(t, e, wd, M, k)
    if t.shape[1] < P:
        t = np.concatenate([t, np.zeros((t.shape[0], P - t.shape[1]), dtype=ctx.dtype)], axis=1)
    return t


def _neg(arr, dtype):
    if dtype == np.uint64:
        return np.uint64(0) - arr
    return -arr


class Series:
    __slots__ = ("ctx", "lo", "data", "scale", "prec", "bits")

    def __init__(self, ctx, lo, data, scale, prec, bits):
        self.ctx = ctx
        self.lo = lo
        self.data = data
        self.scale = scale
        self.prec = prec
        self.bits = bits

    # -- canonical form -------------------------------------------------------

    @classmethod
    def make(cls, ctx, lo, data, scale, prec, bits):
        N = ctx.N
        bits = min(bits, ctx.M)
        if bits <= 0:
            data = data[:, :0]
            bits = 0
        else:
            if data.dtype == np.uint64:
                data = data & np.uint64((1 << bits) - 1)
            else:
                data = data % (1 << bits)
        L = data.shape[1]
        if L:
            nz = np.flatnonzero(np.any(data != 0, axis=0))
        else:
            nz = np.zeros(0, dtype=np.intp)
        # pi_n-adic truncation
        cut = N + 1 if prec is None else min(prec, N + 1)
        if nz.size and lo + nz[-1] >= cut:
            if prec is None or prec > N + 1:
                prec = N + 1
            keep = nz[lo + nz < cut]
            nz = keep
        elif prec is not None and prec > N + 1:
            prec = N + 1
        if nz.size and lo + nz[0] < -N:
            raise WindowError("window exhausted, increase N")
        if nz.size == 0:
            data = data[:, :0]
            new_lo = 0
        else:
            data = data[:, nz[0]: nz[-1] + 1]
            new_lo = lo + int(nz[0])
        # minimal scale
        while scale > 0 and bits > 0:
            if data.shape[1] and np.any(data & 1 if data.dtype == np.uint64 else data % 2):
                break
            data = data >> 1 if data.dtype == np.uint64 else data // 2
            scale -= 1
            bits -= 1
        if data.shape[1] == 0:
            # the zero series keeps its absolute precision at scale 0
            bits, scale = bits - scale, 0
            new_lo = 0
        return cls(ctx, new_lo, np.ascontiguousarray(data), scale, prec, bits)

    @property
    def hi(self):
        return self.lo + self.data.shape[1] - 1

    @property
    def length(self):
        return self.data.shape[1]

    @property
    def abs_bits(self):
        return self.bits - self.scale

    def _eff_lo(self):
        """Lowest exponent that might be nonzero (the precision bound for a zero series)."""
        if self.length:
            return self.lo
        return self.prec

    def is_zero(self):
        return self.length == 0

    def coeff(self, e):
        k = e - self.lo
        if 0 <= k < self.length:
            return self.ctx.coeff.column(self.data, k)
        return self.ctx.coeff.zero()

    def coeffs(self):
        return {self.lo + k: self.ctx.coeff.column(self.data, k) for k in range(self.length)
                if np.any(self.data[:, k] != 0)}

    def rebase(self, ctx):
        return Series.make(ctx, self.lo, self.data, self.scale, self.prec, self.bits)

    def identical(self, other):
        return (self.lo, self.scale, self.prec, self.bits) == (other.lo, other.scale, other.prec, other.bits) \
            and np.array_equal(self.data, other.data)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.const(other)
        if not isinstance(other, Series):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        terms = []
        for e, c in sorted(self.coeffs().items()):
            terms.append(f"{c.coords if self.ctx.d > 1 else c.coords[0]}*t^{e}")
        body = " + ".join(terms[:8]) + (" + ..." if len(terms) > 8 else "")
        return f"Series(scale={self.scale}, prec={self.prec}, bits={self.bits}: {body or '0'})"

    # -- ring operations ------------------------------------------------------

    def _check(self, other):
        if isinstance(other, (int, CoeffElem)):
            return self.ctx.const(other)
        if not isinstance(other, Series):
            return None
        if other.ctx is not self.ctx:
            raise ValueError("series belong to different contexts")
        return other

    def _aligned(self, s):
        """Data shifted to the larger scale s, with its bit count."""
        k = s - self.scale
        if k == 0:
            return self.data, self.bits
        if self.data.dtype == np.uint64:
            return self.data << np.uint64(k), self.bits + k
        return self.data * (1 << k), self.bits + k

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return _combine(self, other, False)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return _combine(self, other, True)

    def __rsub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return _combine(other, self, True)

    def __neg__(self):
        return Series.make(self.ctx, self.lo, _neg(self.data, self.data.dtype), self.scale, self.prec, self.bits)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scalar_int(other)
        if isinstance(other, CoeffElem):
            return self.scalar(other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        return s_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return s_invert(self) ** (-e)
        result = self.ctx.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scalar_int(self, k):
        if k == 0:
            return self.ctx.zero(self.prec)
        r = _v2(k)
        drop = min(r, self.scale)
        k >>= drop
        mask = self.ctx.coeff.mask
        if self.data.dtype == np.uint64:
            data = self.data * np.uint64(k & mask)
        else:
            data = self.data * (k & mask)
        return Series.make(self.ctx, self.lo, data, self.scale - drop, self.prec, self.bits + r - drop)

    def scalar(self, c):
        v = c.valuation()
        data = self.ctx.coeff.arr_scale(c, self.data)
        return Series.make(self.ctx, self.lo, data, self.scale, self.prec, self.bits + v)

    def mul_pow2(self, k):
        if k >= 0:
            return self.scalar_int(1 << k)
        return Series.make(self.ctx, self.lo, self.data, self.scale - k, self.prec, self.bits)

    def shift(self, k):
        """Multiply by pi_n^k."""
        prec = None if self.prec is None else self.prec + k
        return Series.make(self.ctx, self.lo + k, self.data, self.scale, prec, self.bits)

    def part(self, lo=None, hi=None):
        """Restriction to exponents in [lo, hi] (exact, no precision change)."""
        a = self.lo if lo is None else max(lo, self.lo)
        b = self.hi if hi is None else min(hi, self.hi)
        if b < a:
            return Series.make(self.ctx, 0, self.ctx.coeff.zeros(0), self.scale, None, self.bits)
        data = self.data[:, a - self.lo: b - self.lo + 1]
        return Series.make(self.ctx, a, data, self.scale, None, self.bits)

    def with_prec(self, p):
        return Series.make(self.ctx, self.lo, self.data, self.scale, _pmin(self.prec, p), self.bits)

    def frobenius_coeffs(self):
        data = self.ctx.coeff.arr_sigma(self.data)
        return Series.make(self.ctx, self.lo, data, self.scale, self.prec, self.bits)


def _combine(a, b, subtract):
    ctx = a.ctx
    s = max(a.scale, b.scale)
    da, ba = a._aligned(s)
    db, bb = b._aligned(s)
    if a.length == 0 and b.length == 0:
        return Series.make(ctx, 0, ctx.coeff.zeros(0), s, _pmin(a.prec, b.prec), min(ba, bb))
    los = [x.lo for x in (a, b) if x.length]
    his = [x.hi for x in (a, b) if x.length]
    lo, hi = min(los), max(his)
    out = ctx.coeff.zeros(hi - lo + 1)
    if a.length:
        out[:, a.lo - lo: a.hi - lo + 1] = da
    if b.length:
        seg = out[:, b.lo - lo: b.hi - lo + 1]
        seg = seg - db if subtract else seg + db
        out[:, b.lo - lo: b.hi - lo + 1] = ctx.coeff.reduce(seg)
    return Series.make(ctx, lo, out, s, _pmin(a.prec, b.prec), min(ba, bb))


def s_mul(a, b):
    ctx = a.ctx
    la, lb = a._eff_lo(), b._eff_lo()
    bits = min(a.bits, b.bits)
    scale = a.scale + b.scale
    if la is None or lb is None:
        # one factor is an exact zero
        return ctx.zero()
    prec = _pmin(None if b.prec is None else la + b.prec, None if a.prec is None else lb + a.prec)
    if a.length == 0 or b.length == 0:
        return Series.make(ctx, 0, ctx.coeff.zeros(0), 0, prec, bits)
    lo = a.lo + b.lo
    top = a.hi + b.hi
    cap = ctx.N if prec is None else min(ctx.N, prec - 1)
    if top > cap:
        top = cap
        prec = _pmin(prec, ctx.N + 1)
    out_len = top - lo + 1
    if out_len <= 0:
        return Series.make(ctx, 0, ctx.coeff.zeros(0), 0, prec, bits)
    data = kernels.polymul(a.data, b.data, ctx.wd, ctx.M, out_len)
    return Series.make(ctx, lo, data, scale, prec, bits)


def s_arith(op, a, b):
    """Dispatch for the add/sub/mul/scalar-mul family."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scalar":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def _odd_columns(data):
    if data.dtype == np.uint64:
        return np.any(data & np.uint64(1), axis=0)
    return np.any(data % 2 != 0, axis=0)


def _min_valuation(data, bits):
    v = bits
    for x in np.unique(data):
        x = int(x)
        if x:
            v = min(v, _v2(x))
    return v


def s_invert(a):
    """Inverse of a unit of A_{K_n} (a Laurent series with a nonzero reduction mod 2)."""
    ctx = a.ctx
    if a.length == 0 or a.scale > 0:
        raise NotAUnit("not a unit in A_{K_n}")
    odd = _odd_columns(a.data)
    if not odd.any():
        raise NotAUnit("not a unit in A_{K_n}")
    vbar = a.lo + int(np.argmax(odd))
    target = ctx.N + 1 + vbar  # b^-1 is needed up to this exponent
    b = a.shift(-vbar)
    bits = a.bits
    p_in = b.prec
    minus = b.data[:, : max(0, -b.lo)] if b.lo < 0 else b.data[:, :0]
    plus_lo = max(b.lo, 0)
    plus = b.data[:, plus_lo - b.lo:]
    if minus.shape[1] == 0 or not np.any(minus != 0):
        P = target if p_in is None else min(target, p_in)
        plus_full = np.zeros((ctx.d, P), dtype=ctx.dtype)
        m = min(P, plus.shape[1] + plus_lo)
        plus_full[:, plus_lo:m] = plus[:, : m - plus_lo]
        inv = _power_inverse(ctx, plus_full, P)
        wide = ctx.widened(max(ctx.N, P))
        res = Series.make(wide, 0, inv, 0, P, bits).shift(-vbar)
        return res.rebase(ctx)
    ell = -b.lo
    vy = max(1, _min_valuation(minus, bits))
    J = 0
    while (1 << J) * vy < bits:
        J += 1
    P = target + ((1 << J) - 1) * ell + 1
    if p_in is not None:
        P = min(P, p_in)
    wide = ctx.widened(max(P, ((1 << J) + 1) * ell + ctx.N))
    plus_full = np.zeros((ctx.d, P), dtype=ctx.dtype)
    m = min(P, plus.shape[1] + plus_lo)
    plus_full[:, plus_lo:m] = plus[:, : m - plus_lo]
    binv = Series.make(wide, 0, _power_inverse(ctx, plus_full, P), 0, P, bits)
    bminus = Series.make(wide, b.lo, minus, 0, None, bits)
    y = bminus * binv
    acc = binv * (wide.one() - y)
    ypow = y
    for _ in range(1, J):
        ypow = ypow * ypow
        if ypow.is_zero():
            break
        acc = acc * (wide.one() + ypow)
    return acc.shift(-vbar).rebase(ctx)


def s_phi(a):
    """Frobenius: pi_n -> (1+pi_n)^2 - 1 and sigma on coefficients."""
    ctx = a.ctx
    if a.length == 0:
        return a
    data = ctx.coeff.arr_sigma(a.data)
    parts = []
    p = a.prec
    if a.hi >= 0:
        start = max(a.lo, 0)
        vec = np.zeros((ctx.d, a.hi + 1), dtype=ctx.dtype)
        vec[:, start:] = data[:, start - a.lo:]
        Q = ctx.phi_matrix()
        cols = min(vec.shape[1], Q.shape[1])
        out = kernels.matvec(Q, vec[:, :cols], ctx.M)
        exact = p is None and 2 * a.hi <= ctx.N
        parts.append(Series.make(ctx, 0, out, a.scale, None if exact else ctx.N + 1, a.bits))
    if a.lo < 0:
        K = -a.lo
        neg = data[:, : min(K, a.length)]
        vec = np.zeros((ctx.d, K), dtype=ctx.dtype)
        # column k-1 holds exponent -k
        vec[:, K - neg.shape[1]:] = neg[:, ::-1]
        P = ctx.phi_neg_matrix(K)
        out = kernels.matvec(P, vec, ctx.M)
        rows = out.shape[1]
        outr = np.ascontiguousarray(out[:, ::-1])
        parts.append(Series.make(ctx, -rows, outr, a.scale, None, a.bits))
    res = parts[0]
    for q in parts[1:]:
        res = res + q
    if p is not None:
        res = res.with_prec(p if p >= 0 else 2 * p - ctx.M + 1)
    return res


def s_gamma(a):
    """pi_n -> (1+pi_n)^chi - 1, coefficients fixed."""
    ctx = a.ctx
    if a.length == 0:
        return a
    lo = a.lo
    p = a.prec
    top = ctx.N if p is None else min(ctx.N, p - 1)
    # gamma(pi_n^lo A) = pi_n^lo U^lo gamma(A) with U = gamma(pi_n)/pi_n a unit
    base = min(lo, 0)
    R = top - base + 1
    if R <= 0:
        return Series.make(ctx, 0, ctx.coeff.zeros(0), 0, _pmin(p, ctx.N + 1), a.abs_bits)
    A = np.zeros((ctx.d, R), dtype=ctx.dtype)
    off = lo - base
    m = min(R - off, a.length)
    if m > 0:
        A[:, off:off + m] = a.data[:, :m]
    gA = kernels.matvec(ctx.gamma_matrix(R), A, ctx.M)
    if base < 0:
        Upow = ctx.u_inverse_power(-base, R)
        gA = np.stack([ctx._int_polymul(gA[i], Upow, R) for i in range(ctx.d)])
    exact = p is None and lo >= 0 and a.hi * ctx.chi <= ctx.N
    prec = None if exact else _pmin(p, ctx.N + 1)
    return Series.make(ctx, base, gA, a.scale, prec, a.bits)


def _exps_array(ctx, lo, L):
    mask = ctx.coeff.mask
    e = [(lo + k) & mask for k in range(L)]
    return np.array(e, dtype=ctx.dtype)


def s_deriv(a):
    """Formal derivative d/dpi_n."""
    ctx = a.ctx
    if a.length == 0:
        p = None if a.prec is None else a.prec - 1
        return Series.make(ctx, 0, ctx.coeff.zeros(0), 0, p, a.bits)
    ex = _exps_array(ctx, a.lo, a.length)
    data = a.data * ex[None, :]
    p = None if a.prec is None else a.prec - 1
    return Series.make(ctx, a.lo - 1, data, a.scale, p, a.bits)


def s_D(a):
    """D = (1+pi_n) d/dpi_n."""
    da = s_deriv(a)
    return da + da.shift(1)


def _check_log_input(f):
    ctx = f.ctx
    if f.scale != 0 or f.length == 0 or f.lo < 0:
        raise ValueError("log needs a power series with constant term 1")
    if f.lo != 0 or f.coeff(0) != ctx.coeff.one():
        raise ValueError("log needs a power series with constant term 1")


def s_log1(f):
    """log f for f in 1 + pi_n O_K[[pi_n]], integrating f'/f; scale V = floor(log2 N)."""
    _check_log_input(f)
    ctx = f.ctx
    q = s_deriv(f) * s_invert(f)
    V = ctx.V
    mod, mask = ctx.coeff.mod, ctx.coeff.mask
    top = ctx.N - 1 if q.prec is None else min(ctx.N - 1, q.prec - 1)
    L = top + 1
    src = np.zeros((ctx.d, L), dtype=ctx.dtype)
    if q.length:
        a = max(q.lo, 0)
        b = min(q.hi, top)
        if b >= a:
            src[:, a:b + 1] = q.data[:, a - q.lo: b - q.lo + 1]
    fac = []
    for k in range(L):
        m = k + 1
        v = _v2(m)
        fac.append((pow(m >> v, -1, mod) << (V - v)) & mask)
    fac = np.array(fac, dtype=ctx.dtype)
    data = ctx.coeff.reduce(src * fac[None, :])
    prec = top + 2
    return Series.make(ctx, 1, data, V + q.scale, prec, q.bits)


def _log_terms(bits):
    m = 1
    while True:
        m += 1
        if m - 1 - math.log2(m) >= bits + 1:
            return m


def s_Log(f):
    """Log f = (phi/2 - 1) log f, computed as (1/2) log(phi(f) f^-2)."""
    _check_log_input(f)
    ctx = f.ctx
    finv = s_invert(f)
    r = s_phi(f) * finv * finv
    h = (r - 1).mul_pow2(-1)
    if h.scale:
        raise IntegralityError("phi(f)/f^2 is not 1 mod 2")
    mod = ctx.coeff.mod
    mmax = _log_terms(h.bits)
    acc = ctx.zero()
    for m in range(mmax, 0, -1):
        v = _v2(m)
        e = m - 1 - v
        if e >= h.bits and acc.is_zero():
            continue
        c = (pow(m >> v, -1, mod) << e) % mod
        if m % 2 == 0:
            c = -c
        acc = acc * h + c
    out = acc * h
    if out.scale != 0 or (out.length and out.lo < 1):
        raise IntegralityError("Log f is not in pi_n O_K[[pi_n]]; guard precision too small")
    return out


def s_Log_via_log1(f):
    """Cross-check route (1/2)(log phi(f) - 2 log f)."""
    out = (s_log1(s_phi(f)) - s_log1(f).scalar_int(2)).mul_pow2(-1)
    return out


def s_Ysum(f, L=None):
    """S = sum_i phi^i(Log f), iterated until a term vanishes; Y = -S/2."""
    ctx = f.ctx
    if L is None:
        L = s_Log(f)
    S = L
    T = L
    limit = ctx.M + ctx.N.bit_length() + 8
    for _ in range(limit):
        T = s_phi(T)
        if T.is_zero():
            return S
        S = S + T
    raise RuntimeError("phi-iteration for Y did not terminate")


def s_Y(f, L=None):
    return (-s_Ysum(f, L)).mul_pow2(-1)


def s_residue(a):
    """Coefficient of pi_n^-1 with the series' scale."""
    if a.prec is not None and a.prec <= -1:
        raise PrecisionError("residue not determined at this precision")
    return ScaledCoeff(a.coeff(-1), a.scale, a.bits)


def res_of_product(a, b):
    """Res(a*b) computed as a convolution at one exponent."""
    ctx = a.ctx
    la, lb = a._eff_lo(), b._eff_lo()
    bits = min(a.bits, b.bits)
    if la is not None and lb is not None:
        prec = _pmin(None if b.prec is None else la + b.prec, None if a.prec is None else lb + a.prec)
        if prec is not None and prec <= -1:
            raise PrecisionError("residue not determined at this precision")
    zero = ScaledCoeff(ctx.coeff.zero(), 0, EXACT_BITS if a.length == 0 or b.length == 0 else bits)
    if a.length == 0 or b.length == 0:
        return zero
    # exponents k of a with -1-k in b
    k0 = max(a.lo, -1 - b.hi)
    k1 = min(a.hi, -1 - b.lo)
    if k1 < k0:
        return ScaledCoeff(ctx.coeff.zero(), a.scale + b.scale, bits)
    A = a.data[:, k0 - a.lo: k1 - a.lo + 1]
    jb0 = -1 - k1 - b.lo
    jb1 = -1 - k0 - b.lo
    B = b.data[:, jb0: jb1 + 1][:, ::-1]
    value = ctx.coeff.elem(_dot(ctx.coeff, A, B))
    return ScaledCoeff(value, a.scale + b.scale, bits)


def _dot(cctx, A, B):
    """sum_k A[:, k] * B[:, k] in O_K."""
    d, mask = cctx.d, cctx.mask
    if A.dtype == np.uint64:
        G = A @ B.T
    else:
        G = A.dot(B.T)
    full = [0] * (2 * d - 1)
    for i in range(d):
        for j in range(d):
            full[i + j] += int(G[i, j])
    for k in range(2 * d - 2, d - 1, -1):
        c = full[k]
        if c:
            for j, wj in enumerate(cctx.wd):
                full[k - d + j] += c * wj
    return tuple(v & mask for v in full[:d])


@lru_cache(maxsize=32)
def series_ctx(d, n, G=16, N=None):
    from .coeff import ring_new
    M = n + G
    return SeriesCtx(ring_new(d, M), n, N)
