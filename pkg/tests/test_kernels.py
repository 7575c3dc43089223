import os
import subprocess
import sys

import numpy as np
import pytest

from dyadic_hilbert import kernels
from dyadic_hilbert.coeff import ring_new

needs_ext = pytest.mark.skipif(kernels._ext is None, reason="compiled kernels not built")


def _naive_polymul(a, b, ctx, out_len):
    out = [ctx.zero() for _ in range(out_len)]
    for i in range(a.shape[1]):
        for j in range(b.shape[1]):
            if i + j < out_len:
                out[i + j] = out[i + j] + ctx.column(a, i) * ctx.column(b, j)
    return out


@pytest.mark.parametrize("d,M", [(1, 18), (2, 19), (3, 40), (8, 64)])
def test_python_polymul_matches_schoolbook(d, M, rng):
    ctx = ring_new(d, M)
    a = ctx.asarray([[rng.randrange(ctx.mod) for _ in range(7)] for _ in range(d)])
    b = ctx.asarray([[rng.randrange(ctx.mod) for _ in range(5)] for _ in range(d)])
    got = kernels.polymul(a, b, ctx.wd, M, 9, backend="python")
    want = _naive_polymul(a, b, ctx, 9)
    assert [ctx.column(got, k) for k in range(9)] == want


@needs_ext
@pytest.mark.parametrize("d,M", [(1, 18), (2, 19), (2, 35), (4, 64)])
def test_backends_agree(d, M, rng):
    ctx = ring_new(d, M)
    for L1, L2, out in [(1, 1, 1), (30, 17, 46), (64, 64, 80), (5, 40, 3)]:
        a = ctx.asarray([[rng.randrange(ctx.mod) for _ in range(L1)] for _ in range(d)])
        b = ctx.asarray([[rng.randrange(ctx.mod) for _ in range(L2)] for _ in range(d)])
        p = kernels.polymul(a, b, ctx.wd, M, out, backend="python")
        c = kernels.polymul(a, b, ctx.wd, M, out, backend="cython")
        assert np.array_equal(p, c)
    mat = np.array([[rng.randrange(ctx.mod) for _ in range(20)] for _ in range(13)], dtype=np.uint64)
    vec = ctx.asarray([[rng.randrange(ctx.mod) for _ in range(20)] for _ in range(d)])
    assert np.array_equal(kernels.matvec(mat, vec, M, backend="python"),
                          kernels.matvec(mat, vec, M, backend="cython"))


def test_object_dtype_above_64_bits(rng):
    ctx = ring_new(2, 80)
    assert ctx.dtype is object
    a = ctx.asarray([[rng.randrange(ctx.mod) for _ in range(4)] for _ in range(2)])
    got = kernels.polymul(a, a, ctx.wd, 80, 7)
    assert [ctx.column(got, k) for k in range(7)] == _naive_polymul(a, a, ctx, 7)


def test_pure_python_selected_by_environment():
    env = dict(os.environ, DYADIC_HILBERT_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import dyadic_hilbert as d; print(d.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_pure_python_symbol_matches_default():
    code = ("from dyadic_hilbert.cli import main; import sys; "
            "sys.exit(main(['symbol','--d','2','--n','3','--x','1+t+w*t^2','--y','5+4*w*t','--emit','json']))")
    runs = []
    for pure in ("1", ""):
        env = dict(os.environ, DYADIC_HILBERT_PURE=pure)
        if not pure:
            env.pop("DYADIC_HILBERT_PURE")
        runs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout)
    assert runs[0] == runs[1]
