"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times polymul and matvec at sizes the symbol pipeline actually uses, then one
end-to-end symbol batch per backend (the batch runs in a subprocess so the
backend is chosen at import).
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

import numpy as np

from dyadic_hilbert import kernels
from dyadic_hilbert.coeff import ring_new

BATCH = """
import random, time
from dyadic_hilbert.symbol import Params, get_engine, hilbert_symbol
P = Params({d}, {n}); k = get_engine(P).kctx; rng = random.Random(0)
xs = [k.random_principal_unit(rng) for _ in range(12)]
t0 = time.perf_counter()
for a in xs:
    for b in xs[:4]:
        hilbert_symbol(a, b, P)
print(time.perf_counter() - t0)
"""


def _arr(ctx, L, rng):
    return ctx.asarray([[rng.randrange(ctx.mod) for _ in range(L)] for _ in range(ctx.d)])


def bench_kernels(repeat):
    rng = random.Random(1)
    rows = []
    for d, M, L in [(1, 18, 80), (2, 19, 168), (2, 19, 340), (4, 24, 340)]:
        ctx = ring_new(d, M)
        a, b = _arr(ctx, L, rng), _arr(ctx, L, rng)
        mat = np.array([[rng.randrange(ctx.mod) for _ in range(L)] for _ in range(L)], dtype=np.uint64)
        for name, fn in [
            ("polymul", lambda be: kernels.polymul(a, b, ctx.wd, M, L, backend=be)),
            ("matvec", lambda be: kernels.matvec(mat, a, M, backend=be)),
        ]:
            t = {}
            for be in ("python", "cython"):
                if be == "cython" and kernels._ext is None:
                    continue
                number = 20
                t[be] = min(timeit.repeat(lambda: fn(be), number=number, repeat=repeat)) / number
            rows.append((name, d, M, L, t))
    return rows


def bench_batch(d, n):
    out = {}
    for be in ("python", "cython"):
        env = dict(os.environ)
        if be == "python":
            env["DYADIC_HILBERT_PURE"] = "1"
        elif kernels._ext is None:
            continue
        else:
            env.pop("DYADIC_HILBERT_PURE", None)
        res = subprocess.run([sys.executable, "-c", BATCH.format(d=d, n=n)], env=env,
                             capture_output=True, text=True, check=True)
        out[be] = float(res.stdout)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"compiled kernels: {'available' if kernels._ext is not None else 'missing'}")
    print(f"{'kernel':<8} {'d':>2} {'M':>3} {'L':>4} {'python us':>10} {'cython us':>10} {'speedup':>8}")
    for name, d, M, L, t in bench_kernels(args.repeat):
        py = t["python"] * 1e6
        cy = t.get("cython")
        cy_s = f"{cy * 1e6:10.1f}" if cy else f"{'-':>10}"
        sp = f"{t['python'] / cy:7.1f}x" if cy else f"{'-':>8}"
        print(f"{name:<8} {d:>2} {M:>3} {L:>4} {py:10.1f} {cy_s} {sp}")
    print()
    print("48 symbols, fresh process per backend")
    for d, n in [(1, 2), (2, 3)]:
        t = bench_batch(d, n)
        line = f"  d={d} n={n}: python {t['python']:.2f}s"
        if "cython" in t:
            line += f", cython {t['cython']:.2f}s ({t['python'] / t['cython']:.1f}x)"
        print(line)


if __name__ == "__main__":
    main()
