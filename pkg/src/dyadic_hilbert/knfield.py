"""The ramified layer K_n = K(zeta_{2^n}) modulo 2^M.

Elements are polynomials of degree < e = 2^(n-1) in the uniformizer
pibar = zeta - 1 with O_K coefficients, stored as a (d, e) array.  Like series
they carry a power-of-two ``scale`` and the number of known ``bits``.
"""

import math
from functools import lru_cache

import numpy as np

from . import kernels
from .coeff import CoeffElem, ring_new
from .scaled import PrecisionError, ScaledInt
from .series import Series, SeriesCtx, _v2


class ValuationError(ArithmeticError):
    pass


class NotPrincipalUnit(ValuationError):
    def __init__(self, valuation):
        self.valuation = valuation
        if valuation == 0:
            msg = "not a principal unit (x - 1 is a unit)"
        else:
            msg = f"not a principal unit (valuation {valuation})"
        super().__init__(msg)


class KnCtx:
    def __init__(self, coeff, n):
        if n < 2:
            raise ValueError("level n must be at least 2")
        self.coeff = coeff
        self.n = n
        self.d = coeff.d
        self.M = coeff.M
        self.e = 1 << (n - 1)
        e, mask = self.e, coeff.mask
        # min_poly[k] for k <= e, low -> high: (1+X)^e + 1
        self.min_poly = tuple([2] + [math.comb(e, k) for k in range(1, e)] + [1])
        # X^e = sum_k red[k] X^k
        self.red = np.array([(-c) & mask for c in self.min_poly[:e]], dtype=coeff.dtype)
        self.dtype = coeff.dtype
        self.wd = np.array(coeff.wd, dtype=self.dtype)
        self.trace_table = self._newton_traces()
        self._trace_np = np.array(self.trace_table, dtype=self.dtype)
        self._zmats = {}

    def __repr__(self):
        return f"KnCtx(d={self.d}, n={self.n}, M={self.M})"

    def _newton_traces(self):
        """Tr_{K_n/K}(pibar^i), i < e, from Newton's identities on the minimal polynomial."""
        e, a = self.e, self.min_poly
        p = [e]
        for k in range(1, e):
            s = -k * a[e - k]
            for i in range(1, k):
                s -= a[e - i] * p[k - i]
            p.append(s)
        return tuple(x & self.coeff.mask for x in p)

    def extended(self, extra):
        return kn_ctx(self.d, self.n, self.M + extra)

    # -- constructors ---------------------------------------------------------

    def elem(self, coords, scale=0, bits=None):
        """coords: list of at most e entries (int, coordinate tuple or CoeffElem)."""
        data = self.coeff.zeros(self.e)
        if len(coords) > self.e:
            raise ValueError(f"at most {self.e} coordinates")
        for k, c in enumerate(coords):
            if isinstance(c, CoeffElem):
                c = c.coords
            elif isinstance(c, int):
                c = self.coeff._const(c)
            for i in range(self.d):
                data[i, k] = int(c[i]) & self.coeff.mask
        return KnElem.make(self, data, scale, self.M if bits is None else bits)

    def from_data(self, data, scale=0, bits=None):
        return KnElem.make(self, data, scale, self.M if bits is None else bits)

    def zero(self):
        return self.elem([])

    def one(self):
        return self.elem([1])

    def const(self, c):
        return self.elem([c])

    def pibar(self):
        return self.elem([0, 1])

    def zeta(self):
        return self.elem([1, 1])

    def w(self):
        return self.elem([self.coeff.gen()])

    def random(self, rng):
        return self.elem([self.coeff.random(rng) for _ in range(self.e)])

    def random_principal_unit(self, rng):
        coords = [self.coeff.random(rng) for _ in range(self.e)]
        c0 = list(coords[0].coords)
        c0[0] = (c0[0] & ~1) | 1
        for i in range(1, self.d):
            c0[i] &= ~1
        coords[0] = self.coeff.elem(c0)
        return self.elem(coords)

    # -- kernels --------------------------------------------------------------

    def _reduce(self, full):
        """Reduce a (d, L) product modulo the minimal polynomial."""
        e = self.e
        full = full.copy()
        for k in range(full.shape[1] - 1, e - 1, -1):
            col = full[:, k]
            if not np.any(col):
                continue
            full[:, k - e:k] = self.coeff.reduce(full[:, k - e:k] + np.outer(col, self.red))
        return full[:, :e]

    def _mul_data(self, a, b):
        prod = kernels.polymul(a, b, self.wd, self.M, 2 * self.e - 1)
        return self._reduce(prod)

    def z_matrix(self, u, J):
        """Integer matrix (e, J): column j = coordinates of ((1+pibar)^u - 1)^j."""
        u %= 1 << self.n
        key = (u, J)
        if key not in self._zmats:
            mask, e = self.coeff.mask, self.e
            red = [int(r) for r in self.red]

            def mul(a, b):
                full = [0] * (2 * e - 1)
                for i, x in enumerate(a):
                    if x:
                        for j, y in enumerate(b):
                            full[i + j] += x * y
                for k in range(2 * e - 2, e - 1, -1):
                    c = full[k]
                    if c:
                        for j in range(e):
                            full[k - e + j] += c * red[j]
                return [v & mask for v in full[:e]]

            zeta = [1, 1] + [0] * (e - 2)
            zu = [1] + [0] * (e - 1)
            base = zeta
            k = u
            while k:
                if k & 1:
                    zu = mul(zu, base)
                base = mul(base, base)
                k >>= 1
            zu[0] = (zu[0] - 1) & mask
            cols = []
            cur = [1] + [0] * (e - 1)
            for _ in range(J):
                cols.append(cur)
                cur = mul(cur, zu)
            Z = np.zeros((e, J), dtype=self.dtype)
            for j, c in enumerate(cols):
                for i in range(e):
                    Z[i, j] = c[i]
            self._zmats[key] = Z
        return self._zmats[key]


@lru_cache(maxsize=None)
def kn_ctx(d, n, M):
    return KnCtx(ring_new(d, M), n)


class KnElem:
    __slots__ = ("ctx", "data", "scale", "bits")

    def __init__(self, ctx, data, scale, bits):
        self.ctx = ctx
        self.data = data
        self.scale = scale
        self.bits = bits

    @classmethod
    def make(cls, ctx, data, scale, bits):
        bits = min(bits, ctx.M)
        if bits <= 0:
            return cls(ctx, ctx.coeff.zeros(ctx.e), 0, bits - scale)
        if data.dtype == np.uint64:
            data = data & np.uint64((1 << bits) - 1)
        else:
            data = data % (1 << bits)
        while scale > 0 and bits > 0:
            odd = np.any(data & np.uint64(1)) if data.dtype == np.uint64 else np.any(data % 2)
            if odd:
                break
            data = data >> np.uint64(1) if data.dtype == np.uint64 else data // 2
            scale -= 1
            bits -= 1
        if not np.any(data):
            bits, scale = bits - scale, 0
        return cls(ctx, np.ascontiguousarray(data), scale, bits)

    @property
    def abs_bits(self):
        return self.bits - self.scale

    def coords(self):
        return [self.ctx.coeff.column(self.data, k) for k in range(self.ctx.e)]

    def key(self):
        return (self.ctx.d, self.ctx.n, self.ctx.M, self.scale, self.bits, self.data.tobytes())

    def __repr__(self):
        if self.ctx.d == 1:
            body = [int(x) for x in self.data[0]]
        else:
            body = [tuple(int(x) for x in self.data[:, k]) for k in range(self.ctx.e)]
        extra = f", scale={self.scale}" if self.scale else ""
        return f"KnElem({body}{extra})"

    def _check(self, other):
        if isinstance(other, (int, CoeffElem)):
            return self.ctx.const(other)
        if not isinstance(other, KnElem):
            return None
        if other.ctx is not self.ctx:
            raise ValueError("elements belong to different contexts")
        return other

    def _aligned(self, s):
        k = s - self.scale
        if k == 0:
            return self.data, self.bits
        if self.data.dtype == np.uint64:
            return self.data << np.uint64(k), self.bits + k
        return self.data * (1 << k), self.bits + k

    def _combine(self, other, sign):
        s = max(self.scale, other.scale)
        a, ba = self._aligned(s)
        b, bb = other._aligned(s)
        data = a - b if sign < 0 else a + b
        return KnElem.make(self.ctx, self.ctx.coeff.reduce(data), s, min(ba, bb))

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self._combine(other, -1)

    def __rsub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return other._combine(self, -1)

    def __neg__(self):
        return self.ctx.zero() - self

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scalar_int(other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        data = self.ctx._mul_data(self.data, other.data)
        return KnElem.make(self.ctx, data, self.scale + other.scale, min(self.bits, other.bits))

    __rmul__ = __mul__

    def scalar_int(self, k):
        if k == 0:
            return self.ctx.zero()
        r = _v2(k)
        drop = min(r, self.scale)
        data = self.ctx.coeff.arr_scale(k >> drop, self.data)
        return KnElem.make(self.ctx, data, self.scale - drop, self.bits + r - drop)

    def mul_pow2(self, k):
        if k >= 0:
            return self.scalar_int(1 << k)
        return KnElem.make(self.ctx, self.data, self.scale - k, self.bits)

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.const(other)
        if not isinstance(other, KnElem):
            return NotImplemented
        if other.ctx is not self.ctx:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self):
        return not np.any(self.data)

    def valuation(self):
        """pibar-adic valuation (v(2) = e); infinity for zero at working precision."""
        if self.is_zero():
            return math.inf
        e = self.ctx.e
        best = math.inf
        for k in range(e):
            col = [int(x) for x in self.data[:, k]]
            if any(col):
                v = min(_v2(x) for x in col if x)
                best = min(best, e * v + k)
        return best - e * self.scale

    def inv(self):
        v = self.valuation()
        if v == math.inf:
            raise ValuationError("cannot invert zero")
        if self.scale:
            unscaled = KnElem.make(self.ctx, self.data, 0, self.bits)
            return unscaled.inv().mul_pow2(self.scale)
        if v == 0:
            return self._unit_inv()
        # pibar^-1 = rho / 2 with rho = -(2 / pibar), a polynomial in pibar
        ctx = self.ctx
        r = _rho(ctx)
        rv = r ** v
        u = self * rv  # = 2^v * unit
        unit = KnElem.make(ctx, u.data, v, u.bits)
        if unit.scale:
            raise ValuationError("inverse lost integrality")
        return rv * unit._unit_inv().mul_pow2(-v)

    def _unit_inv(self):
        ctx = self.ctx
        c0 = ctx.coeff.column(self.data, 0)
        if not c0.is_unit():
            raise ValuationError("element is not a unit")
        t = ctx.const(c0.inv())
        prec = 1
        target = ctx.e * ctx.M
        while prec < target:
            t = t * (2 - self * t)
            prec *= 2
        return KnElem.make(ctx, t.data, 0, self.bits)


def _rho(ctx):
    e = ctx.e
    coords = [0] * e
    for k in range(1, e):
        coords[k - 1] -= math.comb(e, k)
    coords[e - 1] -= 1
    return ctx.elem(coords)


def kn_arith(op, a, b=None):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown operation {op!r}")


def kn_valuation(a):
    return a.valuation()


def is_principal_unit(a):
    if a.scale:
        return False
    return (a - 1).valuation() >= 1


def require_principal_unit(a):
    if a.scale:
        raise NotPrincipalUnit(-a.scale * a.ctx.e)
    if not is_principal_unit(a):
        v = a.valuation()
        raise NotPrincipalUnit(0 if v == 0 else v)


def lift_unit(x, sctx):
    """Power series f in 1 + pi_n O_K[[pi_n]] with f(pibar) = x.

    With t = x - 1 = sum c_i pibar^i, the constant c_0 is even and
    2 = -pibar^e - sum_{0<k<e} C(e,k) pibar^k, so a single substitution
    clears it.
    """
    require_principal_unit(x)
    ctx = x.ctx
    if sctx.coeff is not ctx.coeff or sctx.n != ctx.n:
        raise ValueError("series context does not match the field")
    e = ctx.e
    t = x - 1
    half = ctx.coeff.asarray([int(v) >> 1 for v in t.data[:, 0]])
    f = ctx.coeff.zeros(e + 1)
    f[:, 0] = 0
    f[0, 0] = 1
    f[:, 1:e] = t.data[:, 1:]
    for k in range(1, e):
        f[:, k:k + 1] = ctx.coeff.reduce(f[:, k:k + 1] - ctx.coeff.arr_scale(math.comb(e, k), half))
    f[:, e:] = ctx.coeff.arr_scale(-1, half)
    return Series.make(sctx, 0, f, 0, None, sctx.M)


def eval_at_root(F, u, ctx):
    """F((1+pibar)^u - 1) in K_n; negative exponents need u != 0 and return a scaled element."""
    if F.ctx.coeff is not ctx.coeff:
        raise ValueError("series context does not match the field")
    u %= 1 << ctx.n
    if F.length == 0:
        return KnElem.make(ctx, ctx.coeff.zeros(ctx.e), 0, F.abs_bits + F.scale)
    if F.lo < 0 and u == 0:
        raise ValueError("cannot evaluate negative powers at zeta = 1")
    pos = F.part(lo=0)
    out = ctx.zero()
    if pos.length:
        J = pos.hi + 1
        vec = np.zeros((ctx.d, J), dtype=ctx.dtype)
        vec[:, pos.lo:] = pos.data
        Z = ctx.z_matrix(u, J)
        data = kernels.matvec(Z, vec, ctx.M)
        out = KnElem.make(ctx, data, pos.scale, pos.bits)
    if F.lo < 0:
        return _eval_negative(F.part(hi=-1), u, ctx, out)
    return out


def _eval_negative(Fm, u, ctx, pos_value):
    """Sum F_{-k} z^-k with z = zeta^u - 1 in an extended context (scaled result)."""
    K = -Fm.lo
    z_base = ctx.zeta() ** u - 1
    v = z_base.valuation()
    # z^-1 = rho^v * unit^-1 / 2^v, so each power costs at most v bits
    ext = ctx.extended(K * v + 2)
    z = ext.zeta() ** u - 1
    zi = z.inv()
    base = KnElem.make(ext, zi.data, 0, zi.bits)
    s1 = zi.scale
    acc = ext.zero()
    power = ext.one()
    for k in range(1, K + 1):
        power = power * base
        c = Fm.coeff(-k)
        if not c.is_zero():
            cc = ext.coeff.elem(c.coords)
            term = power * ext.const(cc)
            acc = acc + term.mul_pow2((K - k) * s1)
    acc = KnElem.make(ext, acc.data, K * s1 + Fm.scale, min(acc.bits, Fm.bits + K * s1))
    lifted = KnElem.make(ext, np.array(pos_value.data, dtype=ext.dtype), pos_value.scale, pos_value.bits)
    return acc + lifted


def kn_galois(a, c):
    """The automorphism pibar -> (1+pibar)^c - 1 for odd c, trivial on O_K."""
    if c % 2 == 0:
        raise ValueError("c must be odd")
    ctx = a.ctx
    Z = ctx.z_matrix(c, ctx.e)
    data = kernels.matvec(Z, a.data, ctx.M)
    return KnElem.make(ctx, data, a.scale, a.bits)


def log_extra_bits(n, M):
    """Extra precision carried by kn_log: squarings, divisions by m, 2n bits of headroom."""
    kmax = n + 1
    Mp = M + kmax + 2 * n + 2
    e = 1 << (n - 1)
    m = _log_terms_kn(e, Mp + 8)
    return kmax + 2 * n + 2 + m.bit_length()


def _log_terms_kn(e, Mp):
    m = 1
    while m * (e + 1) - e * math.log2(m) < e * Mp + e:
        m += 1
    return m


def kn_log(x):
    """2-adic logarithm of a principal unit, returned in an extended-precision context."""
    require_principal_unit(x)
    ctx = x.ctx
    e, n = ctx.e, ctx.n
    extra = log_extra_bits(n, ctx.M)
    ext = ctx.extended(extra)
    # inputs are exact representatives, so they are known to every bit of ext
    y = KnElem.make(ext, np.array(x.data, dtype=ext.dtype), 0, ext.M)
    k = 0
    while True:
        t = y - 1
        vt = t.valuation()
        if vt > e:
            break
        y = y * y
        k += 1
        if k > n + 2:
            raise PrecisionError("kn_log: squaring did not reach the convergence disc")
    if t.is_zero():
        return KnElem.make(ext, ext.coeff.zeros(e), 0, t.bits)
    mmax = _log_terms_kn(e, ext.M)
    lost = mmax.bit_length()
    mod = ext.coeff.mod
    acc = ext.zero()
    power = ext.one()
    for m in range(1, mmax + 1):
        power = power * t
        if power.is_zero():
            break
        v = _v2(m)
        if v:
            shifted = KnElem.make(ext, power.data, v, power.bits)
            if shifted.scale:
                raise PrecisionError("kn_log: term not divisible by its denominator")
            term = shifted
        else:
            term = power
        term = term.scalar_int(pow(m >> v, -1, mod))
        acc = acc + term if m & 1 else acc - term
    acc = KnElem.make(ext, acc.data, 0, min(acc.bits, ext.M - lost))
    return acc.mul_pow2(-k)


def kn_trace(a):
    """Tr_{K_n/Q_2} as a scaled 2-adic integer."""
    ctx = a.ctx
    col = ctx.coeff.reduce(a.data @ ctx._trace_np)
    tr = ctx.coeff.elem([int(v) for v in col]).trace()
    return ScaledInt.make(tr, a.scale, a.bits)
