"""Backend selection for the two hot kernels (polynomial product, matrix-vector).

The compiled extension is used when it imported cleanly and the working
precision fits in 64 bits.  Set DYADIC_HILBERT_PURE=1 to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _ext
except ImportError:  # extension not built
    _ext = None

if os.environ.get("DYADIC_HILBERT_PURE"):
    _ext = None

BACKEND = "cython" if _ext is not None else "python"


def dtype_for(M):
    return np.uint64 if M <= 64 else object


def polymul(a, b, wd, M, out_len, backend=None):
    """(d, La) x (d, Lb) -> (d, out_len) over (Z/2^M)[w]/(P)."""
    backend = backend or BACKEND
    if out_len <= 0:
        return np.zeros((a.shape[0], 0), dtype=a.dtype)
    if backend == "cython" and a.dtype == np.uint64:
        if _ext is None:
            raise RuntimeError("compiled kernels are not available")
        return _ext.polymul(
            np.ascontiguousarray(a), np.ascontiguousarray(b),
            np.asarray(wd, dtype=np.uint64), np.uint64((1 << M) - 1), out_len,
        )
    return _pykernels.polymul(a, b, wd, M, out_len)


def matvec(mat, vec, M, backend=None):
    """Apply an integer matrix (rows = output exponents) to each coordinate row."""
    backend = backend or BACKEND
    if backend == "cython" and vec.dtype == np.uint64:
        if _ext is None:
            raise RuntimeError("compiled kernels are not available")
        cols = min(mat.shape[1], vec.shape[1])
        return _ext.matvec(
            np.ascontiguousarray(mat[:, :cols]), np.ascontiguousarray(vec[:, :cols]),
            np.uint64((1 << M) - 1),
        )
    return _pykernels.matvec(mat, vec, M)
