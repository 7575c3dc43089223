"""Seeded property suites shared by ``selfcheck`` and the acceptance tests.

Every suite is a function ``(rng, count) -> (checked, failures, detail)``; the
runner derives one ``random.Random`` per (suite, configuration) from the seed,
so reports are reproducible byte for byte.
"""

import cmath
import math
import random
import time
from dataclasses import dataclass, field

from .coeff import ring_new
from .knfield import (eval_at_root, kn_ctx, kn_galois, kn_log, kn_trace, lift_unit)
from .oracle import quad_symbol, quad_symbol_stable
from .scaled import ScaledInt
from .series import (res_of_product, s_gamma, s_invert, s_Log, s_phi, s_Y)
from .symbol import (ConsistencyError, Params, artin_hasse, chi_unit_factor, get_engine,
                     hilbert_symbol, symbol_via_cup, tr_map)

CONFIGS = ((1, 2), (2, 2), (1, 3), (2, 3))

# per-suite sample counts
LEVELS = {
    "fast": {"coeff": 100, "hom": 10, "invert": 10, "slide": 5, "fact1": 5, "fact2": 3,
             "bilinear": 6, "antisym": 8, "squares": 3, "ah": 4, "paths": 5, "quad": 10,
             "lift": 3, "galois": 3, "cobound": 5, "recheck": 3, "klog": 5, "weak": 5, "smoke": 2},
    "full": {"coeff": 1000, "hom": 100, "invert": 100, "slide": 50, "fact1": 50, "fact2": 25,
             "bilinear": 100, "antisym": 100, "squares": 25, "ah": 25, "paths": 50, "quad": 50,
             "lift": 25, "galois": 25, "cobound": 50, "recheck": 20, "klog": 100, "weak": 50, "smoke": 10},
}


@dataclass
class SuiteResult:
    name: str
    criterion: int
    checked: int
    failures: int
    detail: str = ""
    seconds: float = field(default=0.0, compare=False)

    @property
    def passed(self):
        return self.failures == 0 and self.checked > 0


def _rng(seed, *parts):
    return random.Random(":".join(str(p) for p in (seed,) + parts))


def _params(d, n):
    return Params(d, n)


def _env(d, n):
    P = _params(d, n)
    eng = get_engine(P)
    return P, eng, eng.sctx, eng.kctx


def _random_f(sctx, rng, deg=12):
    coeffs = [1] + [sctx.coeff.random(rng) for _ in range(deg)]
    return sctx.series(coeffs)


def _random_laurent(sctx, rng, lo_min=-8, hi_max=10):
    lo = rng.randint(lo_min, -1)
    hi = rng.randint(0, hi_max)
    return sctx.random(rng, lo=lo, hi=hi)


# -- coeff -------------------------------------------------------------------

def suite_coeff(seed, count):
    checked = fails = 0
    for d in range(1, 9):
        for M in (8, 20, 40):
            ctx = ring_new(d, M)
            rng = _rng(seed, "coeff", d, M)
            for _ in range(max(1, count // 24)):
                a, b = ctx.random(rng), ctx.random(rng)
                s = a
                for _ in range(d):
                    s = s.frobenius()
                ok = s == a
                ok &= (a + b).trace() == (a.trace() + b.trace()) & ctx.mask
                ok &= a.frobenius().trace() == a.trace()
                u = ctx.random(rng, unit=True)
                ok &= u.inv().inv() == u and u * u.inv() == 1
                t = ctx.teichmuller(rng.randrange(1 << d))
                ok &= t ** (1 << d) == t
                checked += 1
                fails += not ok
    return checked, fails, "frobenius^d = id, trace, inverse, teichmuller"


# -- series ------------------------------------------------------------------

def suite_homomorphisms(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, _ = _env(d, n)
        rng = _rng(seed, "hom", d, n)
        for _ in range(count):
            a = _random_laurent(sctx, rng)
            b = _random_laurent(sctx, rng)
            ok = s_phi(a * b) == s_phi(a) * s_phi(b)
            ok &= s_gamma(a * b) == s_gamma(a) * s_gamma(b)
            ok &= s_phi(a + b) == s_phi(a) + s_phi(b)
            ok &= s_phi(s_gamma(a)) == s_gamma(s_phi(a))
            checked += 1
            fails += not ok
    return checked, fails, "phi, gamma ring homomorphisms commuting"


def suite_invert(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, _ = _env(d, n)
        rng = _rng(seed, "invert", d, n)
        for _ in range(count):
            a = _random_laurent(sctx, rng, lo_min=-4, hi_max=8)
            # a unit coefficient near the bottom keeps the inverse inside the window
            k = rng.randint(a.lo, min(a.hi, a.lo + 2))
            a = a + sctx.monomial(k, sctx.coeff.random(rng, unit=True)).scalar_int(1) - \
                sctx.monomial(k, a.coeff(k))
            ok = a * s_invert(a) == 1
            checked += 1
            fails += not ok
    return checked, fails, "a * invert(a) = 1"


def suite_weak_congruences(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, _ = _env(d, n)
        rng = _rng(seed, "weak", d, n)
        u = eng.inv_pi + sctx.one().mul_pow2(-1)
        tw = s_gamma(u).scalar_int(sctx.chi) - u
        ok = tw.is_zero() or tw.lo >= 0
        checked += 1
        fails += not ok
        for _ in range(count):
            F = sctx.random(rng, lo=0, hi=15)
            G = (s_gamma(F) - F) * eng.inv_pi
            ok = (G.is_zero() or G.lo >= 0) and G.scale == 0
            checked += 1
            fails += not ok
    return checked, fails, "(gamma F - F)/pi integral; chi gamma(1/pi + 1/2) = 1/pi + 1/2 mod O_K[[pi_n]]"


def suite_slide(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, _ = _env(d, n)
        rng = _rng(seed, "slide", d, n)
        for _ in range(count):
            f = _random_f(sctx, rng)
            Y = s_Y(f)
            ok = Y.scale <= 1 and (s_phi(Y) - Y) == s_Log(f).mul_pow2(-1)
            checked += 1
            fails += not ok
    return checked, fails, "(phi - 1) Y = Log f / 2"


def _digits_agree(a, b):
    """Two series over different precisions agree on every digit the coarser one retains."""
    ab = min(a.abs_bits, b.abs_bits)
    if ab <= 0:
        return False
    exps = set(a.coeffs()) | set(b.coeffs())
    top = min(x for x in (a.prec, b.prec) if x is not None) if (a.prec or b.prec) else None
    for e in exps:
        if top is not None and e >= top:
            continue
        for ca, cb in zip(a.coeff(e).coords, b.coeff(e).coords):
            va = ScaledInt.make(ca, a.scale, a.bits)
            vb = ScaledInt.make(cb, b.scale, b.bits)
            diff = va - vb
            if diff.value != 0:
                return False
    return True


def suite_guard_doubling(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, _ = _env(d, n)
        eng2 = get_engine(P.doubled())
        rng = _rng(seed, "guard", d, n)
        for _ in range(max(1, count // 5)):
            coeffs = [1] + [tuple(rng.randrange(1 << P.M) for _ in range(d)) for _ in range(10)]
            f1 = sctx.series(coeffs)
            f2 = eng2.sctx.series(coeffs)
            ok = _digits_agree(s_Log(f1), s_Log(f2)) and _digits_agree(s_Y(f1), s_Y(f2))
            checked += 1
            fails += not ok
    return checked, fails, "Log and Y stable under doubled guard"


# -- knfield -----------------------------------------------------------------

def suite_kn_identities(seed, count):
    checked = fails = 0
    for d, n in CONFIGS + ((1, 4),):
        k = kn_ctx(d, n, n + 16)
        z = k.zeta()
        ok = z ** (1 << (n - 1)) == -1 and z ** (1 << n) == 1
        pb = k.pibar()
        phi_val = (1 + pb) ** k.e + 1
        ok &= phi_val.is_zero()
        for i in range(k.e):
            s = sum((cmath.exp(2j * math.pi * u / (1 << n)) - 1) ** i for u in range(1, 1 << n, 2))
            ok &= round(s.real) % k.coeff.mod == k.trace_table[i] and abs(s.imag) < 1e-6
        checked += 1
        fails += not ok
    return checked, fails, "minimal polynomial, zeta order, Newton traces vs complex power sums"


def suite_kn_log(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "klog", d, n)
        for _ in range(max(1, count // 4)):
            x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
            diff = kn_log(x * y) - kn_log(x) - kn_log(y)
            # x*y is only a representative mod 2^M, so agreement is mod 2^(M-1)
            ok = diff.valuation() >= k.e * (P.M - 1)
            checked += 1
            fails += not ok
    return checked, fails, "log(xy) = log x + log y"


def suite_fact1(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "fact1", d, n)
        for _ in range(count):
            F = sctx.random(rng, lo=0, hi=rng.randint(0, 20))
            total = k.zero()
            for u in range(1 << n):
                total = total + eval_at_root(F, u, k)
            r = res_of_product(F, eng.w)
            rhs = k.elem([r.value], scale=r.scale, bits=r.bits).scalar_int(1 << n)
            ok = total == rhs
            checked += 1
            fails += not ok
    return checked, fails, "sum over zeta of F(zeta - 1) = 2^n Res(F dpi_n / (pi (1 + pi_n)))"


def suite_fact2(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "fact2", d, n)
        for _ in range(count):
            x = k.random_principal_unit(rng)
            T = kn_trace(kn_log(x))
            L = s_Log(lift_unit(x, sctx))
            total = k.zero()
            for u in range(1 << n):
                total = total + eval_at_root(L, u, k)
            const_ok = all(not any(int(v) for v in total.data[:, i]) for i in range(1, k.e))
            rhs = -ScaledInt.make(total.coords()[0].trace(), total.scale, total.bits)
            diff = T - rhs
            ok = const_ok and diff.value == 0 and diff.abs_bits > n
            checked += 1
            fails += not ok
    return checked, fails, "Tr log x = -Tr_K sum_zeta Log f (zeta - 1)"


# -- symbol ------------------------------------------------------------------

def suite_chi(seed, count):
    checked = fails = 0
    for n in range(2, 6):
        P = Params(1, n)
        try:
            ok = chi_unit_factor(P) == 1 + (1 << (n - 1))
        except ArithmeticError:
            ok = False
        checked += 1
        fails += not ok
    return checked, fails, "(chi - 1)/log chi = 1 + 2^(n-1) mod 2^n, n = 2..5"


def _sym(x, y, P, **kw):
    return hilbert_symbol(x, y, P, **kw).value


def suite_bilinear(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        mod = 1 << n
        rng = _rng(seed, "bilinear", d, n)
        for _ in range(count):
            a, b, c = (k.random_principal_unit(rng) for _ in range(3))
            ok = _sym(a * b, c, P) == (_sym(a, c, P) + _sym(b, c, P)) % mod
            ok &= _sym(c, a * b, P) == (_sym(c, a, P) + _sym(c, b, P)) % mod
            checked += 1
            fails += not ok
    return checked, fails, "[x1 x2, y] = [x1, y] + [x2, y] and in the second slot"


def suite_antisym(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "antisym", d, n)
        for _ in range(count):
            x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
            ok = (_sym(x, y, P) + _sym(y, x, P)) % (1 << n) == 0
            checked += 1
            fails += not ok
    return checked, fails, "[x, y] + [y, x] = 0"


def suite_squares(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "squares", d, n)
        for _ in range(count):
            x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
            ok = _sym(x ** (1 << n), y, P) == 0
            checked += 1
            fails += not ok
    return checked, fails, "[x^(2^n), y] = 0"


def suite_artin_hasse(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "ah", d, n)
        z = k.zeta()
        for _ in range(count):
            x = k.random_principal_unit(rng)
            ok = _sym(x, z, P) == artin_hasse(x, P).value
            checked += 1
            fails += not ok
    return checked, fails, "[x, zeta] = -(1 + 2^(n-1)) Tr(log x) / 2^n"


def suite_paths(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "paths", d, n)
        for _ in range(count):
            x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
            try:
                symbol_via_cup(x, y, P)
                ok = True
            except ConsistencyError:
                ok = False
            checked += 1
            fails += not ok
    return checked, fails, "closed formula = cup product + trace map"


def suite_quad(seed, count):
    checked = fails = 0
    P, eng, sctx, k = _env(1, 2)
    rng = _rng(seed, "quad")
    for _ in range(count):
        x, y, y2 = (k.random_principal_unit(rng) for _ in range(3))
        try:
            q = quad_symbol_stable(x, y)
            ok = (-1) ** _sym(x, y, P) == q
            ok &= quad_symbol(y, x) == q
            ok &= quad_symbol(x, y * y2) == q * quad_symbol(x, y2)
        except ArithmeticError:
            ok = False
        except ValueError:
            ok = False
        checked += 1
        fails += not ok
    return checked, fails, "parity of [x, y] = quadratic symbol (stable at m = 10, 12)"


def suite_smoke_n4(seed, count):
    checked = fails = 0
    P, eng, sctx, k = _env(1, 4)
    rng = _rng(seed, "smoke4")
    z = k.zeta()
    for _ in range(count):
        a, b, c = (k.random_principal_unit(rng) for _ in range(3))
        ok = _sym(a * b, c, P) == (_sym(a, c, P) + _sym(b, c, P)) % 16
        ok &= (_sym(a, c, P) + _sym(c, a, P)) % 16 == 0
        ok &= _sym(a, z, P) == artin_hasse(a, P).value
        checked += 1
        fails += not ok
    return checked, fails, "n = 4, d = 1: bilinearity, antisymmetry, [x, zeta]"


def _perturbed_lift(x, sctx, k, rng):
    f = lift_unit(x, sctx)
    phi_poly = (1 + sctx.pi_n()) ** k.e + 1
    # r(0) = 0 keeps the constant term 1
    r = sctx.random(rng, lo=1, hi=6)
    return f + phi_poly * r


def suite_lift(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "lift", d, n)
        for _ in range(count):
            x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
            f2 = _perturbed_lift(x, sctx, k, rng)
            g2 = _perturbed_lift(y, sctx, k, rng)
            ok = eval_at_root(f2, 1, k) == x and eval_at_root(g2, 1, k) == y
            ok &= hilbert_symbol(x, y, P, lifts=(f2, g2)).value == _sym(x, y, P)
            checked += 1
            fails += not ok
    return checked, fails, "symbols from f + Phi r and g + Phi s agree"


def suite_galois(seed, count):
    checked = fails = 0
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        mod = 1 << n
        rng = _rng(seed, "galois", d, n)
        for _ in range(count):
            x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
            base = _sym(x, y, P)
            ok = True
            for c in (3, 5):
                ok &= _sym(kn_galois(x, c), kn_galois(y, c), P) == c * base % mod
            checked += 1
            fails += not ok
    return checked, fails, "[sigma_c x, sigma_c y] = c [x, y], c = 3, 5"


def suite_coboundary(seed, count):
    checked = fails = 0
    exact = True
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        rng = _rng(seed, "cobound", d, n)
        for _ in range(count):
            b = _random_laurent(sctx, rng)
            t1 = tr_map(s_gamma(b).scalar_int(sctx.chi) - b, eng)
            t2 = tr_map(b - s_phi(b), eng)
            ok = t1.mod(n) == 0 and t2.mod(n) == 0
            exact &= t1.value == 0 and t2.value == 0
            checked += 1
            fails += not ok
    return checked, fails, "TR kills (chi gamma - 1) b and (1 - phi) b" + (" (exactly)" if exact else "")


def suite_recheck(seed, count):
    checked = fails = 0
    per = max(1, count // len(CONFIGS))
    for d, n in CONFIGS:
        P, eng, sctx, k = _env(d, n)
        P2 = P.doubled()
        rng = _rng(seed, "recheck", d, n)
        for _ in range(per):
            x, y = k.random_principal_unit(rng), k.random_principal_unit(rng)
            ok = _sym(x, y, P) == _sym(x, y, P2)
            checked += 1
            fails += not ok
    return checked, fails, "same class at guard G and 2G"


# name, criterion (0 = module invariant), count key, function
SUITES = (
    ("coeff.invariants", 0, "coeff", suite_coeff),
    ("series.homomorphisms", 0, "hom", suite_homomorphisms),
    ("series.invert", 0, "invert", suite_invert),
    ("series.weak_congruences", 0, "weak", suite_weak_congruences),
    ("series.slide", 1, "slide", suite_slide),
    ("series.guard_doubling", 0, "recheck", suite_guard_doubling),
    ("knfield.identities", 0, "coeff", suite_kn_identities),
    ("knfield.log", 0, "klog", suite_kn_log),
    ("knfield.fact1", 2, "fact1", suite_fact1),
    ("knfield.fact2", 3, "fact2", suite_fact2),
    ("symbol.bilinearity", 4, "bilinear", suite_bilinear),
    ("symbol.antisymmetry", 5, "antisym", suite_antisym),
    ("symbol.squares", 0, "squares", suite_squares),
    ("symbol.artin_hasse", 6, "ah", suite_artin_hasse),
    ("symbol.two_paths", 7, "paths", suite_paths),
    ("oracle.quadratic", 8, "quad", suite_quad),
    ("symbol.lift_independence", 9, "lift", suite_lift),
    ("symbol.galois", 10, "galois", suite_galois),
    ("symbol.tr_coboundary", 11, "cobound", suite_coboundary),
    ("symbol.chi_factor", 12, "coeff", suite_chi),
    ("symbol.precision_recheck", 13, "recheck", suite_recheck),
    ("symbol.smoke_n4", 0, "smoke", suite_smoke_n4),
)


def run_selfcheck(level="fast", seed=1, only=None, clock=time.perf_counter):
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    counts = LEVELS[level]
    results = []
    for name, crit, key, fn in SUITES:
        if only is not None and name not in only and crit not in only:
            continue
        t0 = clock()
        try:
            checked, failures, detail = fn(seed, counts[key])
        except Exception as exc:  # a crash is a failure, reported with its message
            checked, failures, detail = 1, 1, f"error: {type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, crit, checked, failures, detail, clock() - t0))
    return results


def format_report(results, level, seed):
    lines = [f"selfcheck level={level} seed={seed}"]
    width = max(len(r.name) for r in results) if results else 10
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<{width}}  {r.checked - r.failures}/{r.checked}  {r.detail}")
    total_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - total_fail}/{len(results)} suites passed")
    return "\n".join(lines)
