"""Brute-force quadratic Hilbert symbol over K_2 = Q_2(i).

Independent of the series code: elements are turned into Gaussian integers
modulo 2^(m/2) = pibar^m (up to a unit) and isotropy of z^2 - x a^2 - y b^2 is
decided by exhaustive search over that finite ring.
"""

from dataclasses import dataclass
from functools import lru_cache

DEFAULT_M = 10


class OracleConfigError(ValueError):
    pass


@dataclass(frozen=True)
class QuadOracleCtx:
    search_modulus: int = DEFAULT_M

    def __post_init__(self):
        m = self.search_modulus
        if m < 2 or m % 2:
            raise OracleConfigError("search modulus must be an even exponent >= 2")

    @property
    def j(self):
        return self.search_modulus // 2


@lru_cache(maxsize=None)
def _squares(j):
    mod = 1 << j
    out = set()
    for a in range(mod):
        for b in range(mod):
            out.add(((a * a - b * b) % mod, (2 * a * b) % mod))
    return frozenset(out)


def to_gaussian(x, j):
    """Coordinates (c0, c1) in the basis 1, pibar = i - 1 -> (re, im) mod 2^j."""
    ctx = x.ctx
    if ctx.d != 1 or ctx.n != 2:
        raise OracleConfigError("the quadratic oracle needs d = 1 and n = 2")
    if x.scale:
        raise OracleConfigError("oracle inputs must be integral")
    if ctx.M < j:
        raise OracleConfigError(f"element precision {ctx.M} is below the search modulus")
    c0, c1 = (int(v) for v in x.data[0])
    mod = 1 << j
    return ((c0 - c1) % mod, c1 % mod)


def _gmul(a, b, mod):
    return ((a[0] * b[0] - a[1] * b[1]) % mod, (a[0] * b[1] + a[1] * b[0]) % mod)


def _is_unit(g):
    # Z[i]/2^j: units are the elements with re + im odd
    return (g[0] + g[1]) % 2 == 1


def _represents(x, y, j):
    """Does z^2 = x + y b^2 have a solution mod 2^j for some b?"""
    mod = 1 << j
    sq = _squares(j)
    for s in sq:
        t = _gmul(y, s, mod)
        if ((x[0] + t[0]) % mod, (x[1] + t[1]) % mod) in sq:
            return True
    return False


def quad_symbol(x, y, m=DEFAULT_M):
    """+1 if z^2 = x a^2 + y b^2 has a primitive solution mod pibar^m, else -1."""
    ctx = QuadOracleCtx(m)
    gx, gy = to_gaussian(x, ctx.j), to_gaussian(y, ctx.j)
    if not (_is_unit(gx) and _is_unit(gy)):
        raise OracleConfigError("oracle inputs must be units")
    # a primitive solution has a or b a unit (z unit alone forces z^2 in pibar^2);
    # scaling by that unit reduces to a = 1 or b = 1
    if _represents(gx, gy, ctx.j) or _represents(gy, gx, ctx.j):
        return 1
    return -1


def quad_symbol_stable(x, y, m=DEFAULT_M):
    """Verdict at m, checked against m + 2; raises if the two differ."""
    a = quad_symbol(x, y, m)
    b = quad_symbol(x, y, m + 2)
    if a != b:
        raise OracleConfigError(f"verdict changes between pibar^{m} and pibar^{m + 2}")
    return a


def parity_check(x, y, s, m=DEFAULT_M):
    value = s.value if hasattr(s, "value") else int(s)
    return (-1) ** (value % 2) == quad_symbol(x, y, m)
