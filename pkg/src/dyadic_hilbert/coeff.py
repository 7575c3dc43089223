"""The unramified coefficient ring O_K / 2^M, K/Q_2 of degree d.

Elements are coordinate tuples in the power basis 1, w, ..., w^(d-1) where w is
a root of a fixed lift of a Conway polynomial over F_2.  Besides scalar
arithmetic the context exposes column-wise helpers on (d, L) numpy arrays,
which is how the series layer stores coefficients.
"""

from functools import lru_cache

import numpy as np

from .kernels import dtype_for

MAX_D = 8
MAX_M = 512

# Conway polynomials over F_2, coefficients low -> high (leading 1 included).
CONWAY = {
    1: (1, 1),
    2: (1, 1, 1),
    3: (1, 1, 0, 1),
    4: (1, 1, 0, 0, 1),
    5: (1, 0, 1, 0, 0, 1),
    6: (1, 1, 0, 1, 1, 0, 1),
    7: (1, 1, 0, 0, 0, 0, 0, 1),
    8: (1, 0, 1, 1, 1, 0, 0, 0, 1),
}


class CoeffError(ValueError):
    pass


class NotInvertible(CoeffError):
    pass


def _gf2_irreducible(poly):
    """Brute-force irreducibility of a polynomial over F_2 given as a bit tuple."""
    deg = len(poly) - 1
    p = sum(b << i for i, b in enumerate(poly))

    def mod(a, b):
        db = b.bit_length() - 1
        while a and a.bit_length() - 1 >= db:
            a ^= b << (a.bit_length() - 1 - db)
        return a

    for q in range(2, 1 << (deg // 2 + 1)):
        if q.bit_length() - 1 >= 1 and q.bit_length() - 1 <= deg // 2 and mod(p, q) == 0:
            return False
    return True


class CoeffCtx:
    """Immutable context for O_K / 2^M."""

    def __init__(self, d, M):
        if not isinstance(d, int) or not isinstance(M, int):
            raise CoeffError("d and M must be integers")
        if d < 1 or d > MAX_D:
            raise CoeffError(f"unsupported degree d={d} (1 <= d <= {MAX_D})")
        if M < 1 or M > MAX_M:
            raise CoeffError(f"unsupported precision M={M} (1 <= M <= {MAX_M})")
        self.d = d
        self.M = M
        self.mod = 1 << M
        self.mask = self.mod - 1
        self.defining_poly = CONWAY[d]
        # w^d = sum_j wd[j] w^j
        self.wd = tuple((-c) & self.mask for c in self.defining_poly[:d])
        self.dtype = dtype_for(M)
        self._sigma_w = self._lift_frobenius_root()
        # column j = coordinates of sigma(w^j)
        cols = [self.one_coords()]
        for _ in range(1, d):
            cols.append(self._mul(cols[-1], self._sigma_w))
        self.sigma_matrix = tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))
        self._sigma_np = self._np_matrix(self.sigma_matrix)
        self.trace_vector = self._power_sums()
        self._trace_np = np.array(self.trace_vector, dtype=self.dtype)

    # -- construction helpers -------------------------------------------------

    def _np_matrix(self, rows):
        out = np.empty((self.d, self.d), dtype=self.dtype)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                out[i, j] = v
        return out

    def _poly_eval(self, coeffs, x):
        acc = self.zero_coords()
        for c in reversed(coeffs):
            acc = self._add(self._mul(acc, x), self._const(c))
        return acc

    def _lift_frobenius_root(self):
        d = self.d
        if d == 1:
            return self.w_coords()
        w = self.w_coords()
        r = self._mul(w, w)
        deriv = tuple((i * c) for i, c in enumerate(self.defining_poly))[1:]
        # Newton on the defining polynomial, starting from w^2 (a root mod 2)
        for _ in range(self.M.bit_length() + 2):
            val = self._poly_eval(self.defining_poly, r)
            if not any(val):
                break
            dv = self._poly_eval(deriv, r)
            r = self._sub(r, self._mul(val, self._inv(dv)))
        return r

    def _power_sums(self):
        """Tr(w^i) for i < d via Newton's identities on the defining polynomial."""
        d = self.d
        a = self.defining_poly  # monic, a[d] = 1
        p = [d % self.mod]
        for k in range(1, d):
            s = -k * a[d - k]
            for i in range(1, k):
                s -= a[d - i] * p[k - i]
            p.append(s % self.mod)
        return tuple(p)

    # -- raw coordinate arithmetic --------------------------------------------

    def zero_coords(self):
        return (0,) * self.d

    def one_coords(self):
        return (1,) + (0,) * (self.d - 1)

    def w_coords(self):
        if self.d == 1:
            return ((-1) & self.mask,)
        return (0, 1) + (0,) * (self.d - 2)

    def _const(self, c):
        return (c & self.mask,) + (0,) * (self.d - 1)

    def _add(self, a, b):
        m = self.mask
        return tuple((x + y) & m for x, y in zip(a, b))

    def _sub(self, a, b):
        m = self.mask
        return tuple((x - y) & m for x, y in zip(a, b))

    def _mul(self, a, b):
        d, m = self.d, self.mask
        if d == 1:
            return ((a[0] * b[0]) & m,)
        full = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    full[i + j] += x * y
        for k in range(2 * d - 2, d - 1, -1):
            c = full[k]
            if c:
                for j, wj in enumerate(self.wd):
                    full[k - d + j] += c * wj
        return tuple(v & m for v in full[:d])

    def _pow(self, a, e):
        result = self.one_coords()
        while e:
            if e & 1:
                result = self._mul(result, a)
            a = self._mul(a, a)
            e >>= 1
        return result

    def _is_unit(self, a):
        return any(x & 1 for x in a)

    def _inv(self, a):
        if not self._is_unit(a):
            raise NotInvertible("not invertible")
        if self.d == 1:
            return (pow(a[0], -1, self.mod),)
        t = self._pow(a, (1 << self.d) - 2)  # inverse mod 2
        two = self._const(2)
        for _ in range(self.M.bit_length() + 1):
            t = self._mul(t, self._sub(two, self._mul(a, t)))
        return t

    def _sigma(self, a):
        S, m = self.sigma_matrix, self.mask
        return tuple(sum(S[i][j] * a[j] for j in range(self.d)) & m for i in range(self.d))

    # -- public element API ---------------------------------------------------

    def elem(self, coords):
        if isinstance(coords, int):
            return CoeffElem(self, self._const(coords))
        coords = tuple(int(c) & self.mask for c in coords)
        if len(coords) != self.d:
            raise CoeffError(f"expected {self.d} coordinates, got {len(coords)}")
        return CoeffElem(self, coords)

    def zero(self):
        return CoeffElem(self, self.zero_coords())

    def one(self):
        return CoeffElem(self, self.one_coords())

    def gen(self):
        return CoeffElem(self, self.w_coords())

    def teichmuller(self, r):
        """Teichmueller lift of a residue-field element given as d bits (tuple or bitmask)."""
        if isinstance(r, int):
            bits = tuple((r >> i) & 1 for i in range(self.d))
        else:
            bits = tuple(int(b) & 1 for b in r)
            if len(bits) != self.d:
                raise CoeffError(f"expected {self.d} residue bits")
        a = bits
        q = 1 << self.d
        for _ in range(self.M + 1):
            nxt = self._pow(a, q)
            if nxt == a:
                break
            a = nxt
        return CoeffElem(self, a)

    def random(self, rng, unit=False):
        c = tuple(rng.randrange(self.mod) for _ in range(self.d))
        if unit and not self._is_unit(c):
            c = ((c[0] | 1),) + c[1:]
        return CoeffElem(self, c)

    def __eq__(self, other):
        return isinstance(other, CoeffCtx) and (self.d, self.M) == (other.d, other.M)

    def __hash__(self):
        return hash((self.d, self.M))

    def __repr__(self):
        return f"CoeffCtx(d={self.d}, M={self.M})"

    # -- column-wise helpers on (d, L) arrays ---------------------------------

    def zeros(self, L):
        return np.zeros((self.d, L), dtype=self.dtype)

    def asarray(self, rows):
        return np.array(rows, dtype=self.dtype).reshape(self.d, -1)

    def reduce(self, arr):
        if arr.dtype == np.uint64:
            return arr & np.uint64(self.mask)
        return arr % self.mod

    def arr_sigma(self, arr, times=1):
        for _ in range(times % self.d if self.d > 1 else 0):
            arr = self.reduce(self._sigma_np @ arr)
        return arr

    def mult_matrix(self, c):
        """Matrix of multiplication by the scalar c (column j = c * w^j)."""
        cols = []
        basis = self.one_coords()
        w = self.w_coords()
        for _ in range(self.d):
            cols.append(self._mul(c, basis))
            basis = self._mul(basis, w)
        return self._np_matrix([[cols[j][i] for j in range(self.d)] for i in range(self.d)])

    def arr_scale(self, c, arr):
        """Multiply every column by the scalar c (CoeffElem, coordinates or int)."""
        if isinstance(c, int):
            if arr.dtype == np.uint64:
                return arr * np.uint64(c & self.mask) & np.uint64(self.mask)
            return (arr * (c & self.mask)) % self.mod
        coords = c.coords if isinstance(c, CoeffElem) else tuple(c)
        if self.d == 1:
            return self.arr_scale(coords[0], arr)
        return self.reduce(self.mult_matrix(coords) @ arr)

    def arr_trace(self, arr):
        return self.reduce(self._trace_np @ arr)

    def column(self, arr, k):
        return CoeffElem(self, tuple(int(v) & self.mask for v in arr[:, k]))


class CoeffElem:
    __slots__ = ("ctx", "coords")

    def __init__(self, ctx, coords):
        self.ctx = ctx
        self.coords = coords

    def _check(self, other):
        if isinstance(other, int):
            return self.ctx._const(other)
        if not isinstance(other, CoeffElem):
            return None
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise CoeffError("operands belong to different coefficient contexts")
        return other.coords

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return CoeffElem(self.ctx, self.ctx._add(self.coords, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return CoeffElem(self.ctx, self.ctx._sub(self.coords, o))

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return CoeffElem(self.ctx, self.ctx._sub(o, self.coords))

    def __neg__(self):
        return CoeffElem(self.ctx, self.ctx._sub(self.ctx.zero_coords(), self.coords))

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return CoeffElem(self.ctx, self.ctx._mul(self.coords, o))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        return CoeffElem(self.ctx, self.ctx._pow(self.coords, e))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coords == self.ctx._const(other)
        return isinstance(other, CoeffElem) and self.ctx == other.ctx and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        if self.ctx.d == 1:
            return f"CoeffElem({self.coords[0]})"
        return f"CoeffElem{self.coords}"

    def is_zero(self):
        return not any(self.coords)

    def is_unit(self):
        return self.ctx._is_unit(self.coords)

    def valuation(self):
        """2-adic valuation (M for zero)."""
        v = self.ctx.M
        for c in self.coords:
            if c:
                v = min(v, (c & -c).bit_length() - 1)
        return v

    def inv(self):
        return CoeffElem(self.ctx, self.ctx._inv(self.coords))

    def frobenius(self):
        return CoeffElem(self.ctx, self.ctx._sigma(self.coords))

    def trace(self):
        t = self.ctx.trace_vector
        return sum(a * b for a, b in zip(self.coords, t)) & self.ctx.mask


@lru_cache(maxsize=None)
def ring_new(d, M):
    """Cached coefficient context for O_K/2^M with [K:Q_2] = d."""
    return CoeffCtx(d, M)


def coeff_inv(a):
    return a.inv()


def frobenius(a):
    return a.frobenius()


def trace_K(a):
    return a.trace()


def teichmuller(ctx, r):
    return ctx.teichmuller(r)
