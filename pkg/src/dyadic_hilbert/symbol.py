"""The Hilbert symbol pipeline.

``hilbert_symbol`` evaluates the closed residue formula; ``symbol_via_cup``
builds the cup product of the two (phi, Gamma)-cocycles and applies the trace
map; ``artin_hasse`` gives the closed form for y = zeta.
"""

from collections import OrderedDict
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .coeff import ring_new
from .knfield import (KnElem, is_principal_unit, kn_ctx, kn_log, kn_trace, lift_unit,
                      require_principal_unit)
from .scaled import IntegralityError, PrecisionError, ScaledInt
from .series import (Series, SeriesCtx, default_chi, default_N, res_of_product, s_D, s_gamma,
                     s_invert, s_Log, s_phi, s_Ysum)


class ConsistencyError(ArithmeticError):
    """The two evaluation paths disagree."""


@dataclass(frozen=True)
class Params:
    d: int
    n: int
    G: int = 16
    N: Optional[int] = None
    recheck: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.G < 8:
            raise ValueError("guard G must be at least 8")
        if not 1 <= self.d <= 8:
            raise ValueError("d must be between 1 and 8")

    @property
    def M(self):
        return self.n + self.G

    @property
    def chi(self):
        return default_chi(self.n)

    @property
    def degree_cap(self):
        return default_N(self.n, self.M) if self.N is None else self.N

    @property
    def modulus(self):
        return 1 << self.n

    def doubled(self):
        return replace(self, G=2 * self.G, N=None)


@dataclass(frozen=True)
class Certificate:
    guard_consumed: int
    paths_agreed: Optional[bool]
    recheck_precision: int


@dataclass(frozen=True)
class SymbolValue:
    value: int
    modulus: int
    certificate: Certificate

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class TwistedClass:
    rep: Series


class ElementData:
    """Series attached to one lift f, computed on demand."""

    def __init__(self, engine, f):
        self.engine = engine
        self.f = f
        self._c = {}

    def _get(self, name, fn):
        if name not in self._c:
            self._c[name] = fn()
        return self._c[name]

    @property
    def L(self):
        return self._get("L", lambda: s_Log(self.f))

    @property
    def S(self):
        return self._get("S", lambda: s_Ysum(self.f, self.L))

    @property
    def Y(self):
        return self._get("Y", lambda: (-self.S).mul_pow2(-1))

    @property
    def Dl(self):
        return self._get("Dl", lambda: s_D(self.f) * s_invert(self.f))

    @property
    def phiDl(self):
        return self._get("phiDl", lambda: s_phi(self.Dl))

    @property
    def phiY(self):
        return self._get("phiY", lambda: s_phi(self.Y))

    @property
    def m(self):
        return self._get("m", lambda: self.L * self.engine.inv_pi)

    @property
    def nn(self):
        eng = self.engine
        return self._get("n", lambda: self.Dl.scalar_int(eng.u) + self.S.scalar_int((eng.chi - 1) // 2))


class Engine:
    """Contexts, cached constant series and per-element caches for one Params."""

    def __init__(self, params, cache_size=1024):
        self.params = params
        self.n = params.n
        self.M = params.M
        self.chi = params.chi
        self.u = (self.chi - 1) >> self.n
        self.coeff = ring_new(params.d, params.M)
        self.sctx = SeriesCtx(self.coeff, params.n, params.N, self.chi, params.G)
        self.kctx = kn_ctx(params.d, params.n, params.M)
        self._cache = OrderedDict()
        self._cache_size = cache_size
        self._w = None
        self._inv_pi = None
        self._inv_1p = None

    @property
    def w(self):
        """1 / (pi (1 + pi_n))."""
        if self._w is None:
            s = self.sctx
            self._w = s_invert(s.pi_of_level(0) * (1 + s.pi_n()))
        return self._w

    @property
    def inv_pi(self):
        if self._inv_pi is None:
            self._inv_pi = s_invert(self.sctx.pi_of_level(0))
        return self._inv_pi

    @property
    def inv_1p(self):
        if self._inv_1p is None:
            self._inv_1p = s_invert(1 + self.sctx.pi_n())
        return self._inv_1p

    def convert(self, x):
        """Re-express an element (exact representative) in this engine's field."""
        if x.ctx is self.kctx:
            return x
        if x.ctx.d != self.params.d or x.ctx.n != self.n:
            raise ValueError("element belongs to a different field")
        if x.scale:
            raise ValueError("element must be integral")
        data = np.array([[int(v) for v in row] for row in x.data], dtype=object)
        return self.kctx.from_data(np.array(data % self.coeff.mod, dtype=self.coeff.dtype))

    def element(self, x):
        x = self.convert(x)
        key = x.key()
        data = self._cache.get(key)
        if data is None:
            data = ElementData(self, lift_unit(x, self.sctx))
            self._cache[key] = data
            if len(self._cache) > self._cache_size:
                self._cache.popitem(last=False)
        else:
            self._cache.move_to_end(key)
        return data

    def from_lift(self, f):
        if f.ctx is not self.sctx:
            f = f.rebase(self.sctx)
        return ElementData(self, f)

    # -- raw evaluations (before reduction mod 2^n) ---------------------------

    def main_raw(self, X, Y):
        n = self.n
        A = X.Dl * Y.L - X.L * Y.phiDl
        B = X.L * Y.phiY - X.Y * Y.L
        t1 = res_of_product(A, self.w).trace()
        t2 = res_of_product(B, self.w).trace()
        return t1 * (-(1 + (1 << (n - 1)))) + t2 * (-(1 << n))

    def cup_raw(self, X, Y):
        H = cup_product((X.m, X.nn), (Y.m, Y.nn), self)
        return tr_map(H, self)


def get_engine(params):
    return _engine(replace(params, recheck=False))


@lru_cache(maxsize=16)
def _engine(params):
    return Engine(params)


def _log_chi_unit(n, chi, bits):
    """l = log(chi) / 2^n as a residue mod 2^bits (a 2-adic unit)."""
    t = Fraction(chi - 1)
    total = Fraction(0)
    power = Fraction(1)
    m = 0
    while True:
        m += 1
        power *= t
        term = power / m
        total += term if m % 2 else -term
        # v2(t^m / m) >= n m - log2 m
        if n * (m + 1) - (m + 1).bit_length() > bits + n + 2:
            break
    ell = total / (1 << n)
    num, den = ell.numerator, ell.denominator
    if num % 2 == 0 or den % 2 == 0:
        raise PrecisionError("log(chi) / 2^n is not a unit")
    mod = 1 << bits
    return num * pow(den, -1, mod) % mod


def chi_unit_factor(params):
    """(chi - 1) / log(chi) mod 2^n; equals 1 + 2^(n-1)."""
    n = params.n
    mod = 1 << n
    ell = _log_chi_unit(n, params.chi, n + 8)
    a = (params.chi - 1) >> n
    value = a * pow(ell, -1, 1 << (n + 8)) % mod
    if value != (1 + (1 << (n - 1))) % mod:
        raise PrecisionError(f"(chi-1)/log(chi) = {value} mod 2^{n}, expected 1 + 2^(n-1)")
    return value


def tr_map(c, engine):
    """-(2^n / log chi) Tr Res(a / (1 + pi_n)) for the class of a (x) eps^2."""
    if isinstance(c, TwistedClass):
        rep = c.rep
    else:
        rep = c
    if isinstance(engine, Params):
        engine = get_engine(engine)
    ell = _log_chi_unit(engine.n, engine.chi, engine.M + 8)
    factor = -pow(ell, -1, 1 << (engine.M + 8))
    res = res_of_product(rep, engine.inv_1p).trace()
    return res * factor


def cup_product(c1, c2, engine):
    """[(m1, n1)] cup [(m2, n2)] = n1 (x) gamma(m2) - m1 (x) phi(n2), twisted gamma."""
    m1, n1 = c1
    m2, n2 = c2
    if isinstance(engine, Params):
        engine = get_engine(engine)
    rep = n1 * s_gamma(m2).scalar_int(engine.chi) - m1 * s_phi(n2)
    return TwistedClass(rep)


def _finish(raw, params, kind):
    if raw.scale:
        raise IntegralityError(f"{kind}: result has a denominator 2^{raw.scale}")
    consumed = max(0, params.M - raw.abs_bits)
    if raw.abs_bits < params.n or consumed >= params.G:
        raise PrecisionError(f"{kind}: guard exhausted ({consumed} of {params.G} bits consumed)")
    return raw.mod(params.n), consumed


def _evaluate(x, y, params, path, lifts=None):
    engine = get_engine(params)
    if lifts is None:
        X, Y = engine.element(x), engine.element(y)
    else:
        X, Y = engine.from_lift(lifts[0]), engine.from_lift(lifts[1])
    raw = engine.main_raw(X, Y) if path == "main" else engine.cup_raw(X, Y)
    return _finish(raw, params, path)


def _with_retry(x, y, params, path, lifts=None):
    try:
        return _evaluate(x, y, params, path, lifts) + (params,)
    except PrecisionError:
        bigger = params.doubled()
        return _evaluate(x, y, bigger, path, lifts) + (bigger,)


def _check_inputs(x, y):
    for z in (x, y):
        require_principal_unit(z)


def _recheck(x, y, params, path, value, lifts=None):
    bigger = params.doubled()
    v2, _ = _evaluate(x, y, bigger, path, lifts)
    if v2 != value:
        raise PrecisionError(f"recheck at guard {bigger.G} gives {v2}, not {value}")
    return bigger.G


def hilbert_symbol(x, y, params, cross_check=False, lifts=None):
    """[x, y] mod 2^n from the closed residue formula."""
    _check_inputs(x, y)
    value, consumed, used = _with_retry(x, y, params, "main", lifts)
    recheck = _recheck(x, y, used, "main", value, lifts) if params.recheck else 0
    agreed = None
    if cross_check:
        other, _, _ = _with_retry(x, y, params, "cup", lifts)
        agreed = other == value
    return SymbolValue(value, params.modulus, Certificate(consumed, agreed, recheck))


def symbol_via_cup(x, y, params, lifts=None, check=True):
    """[x, y] through the cup product and the trace map; checked against the closed formula."""
    _check_inputs(x, y)
    value, consumed, used = _with_retry(x, y, params, "cup", lifts)
    recheck = _recheck(x, y, used, "cup", value, lifts) if params.recheck else 0
    agreed = None
    if check:
        main, _, _ = _with_retry(x, y, params, "main", lifts)
        agreed = main == value
        if not agreed:
            raise ConsistencyError(f"cup path gives {value}, closed formula gives {main}")
    return SymbolValue(value, params.modulus, Certificate(consumed, agreed, recheck))


def artin_hasse(x, params):
    """[x, zeta] = -(1 + 2^(n-1)) Tr(log x) / 2^n mod 2^n."""
    require_principal_unit(x)
    n = params.n
    engine = get_engine(params)
    x = engine.convert(x)
    T = kn_trace(kn_log(x))
    q = T.mul_pow2(-n)
    if q.scale:
        raise PrecisionError("trace of log x is not divisible by 2^n at certified precision")
    raw = q * (-(1 + (1 << (n - 1))))
    value = raw.mod(n)
    consumed = max(0, params.M - raw.abs_bits)
    return SymbolValue(value, params.modulus, Certificate(consumed, None, 0))


def symbol_table(gens, params, path="main"):
    fn = hilbert_symbol if path == "main" else symbol_via_cup
    return [[fn(a, b, params).value for b in gens] for a in gens]


__all__ = [
    "Params", "Certificate", "SymbolValue", "TwistedClass", "Engine", "ConsistencyError",
    "get_engine", "chi_unit_factor", "hilbert_symbol", "artin_hasse", "tr_map", "cup_product",
    "symbol_via_cup", "symbol_table", "is_principal_unit", "KnElem", "ScaledInt",
]
