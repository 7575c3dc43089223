"""Pure-Python kernels: Kronecker substitution on Python integers.

Coefficient arrays have shape (d, L): row i holds the w^i coordinate of each
power of the series variable.  Arrays are uint64 when M <= 64 (the low 64 bits
of an exact product are the product mod 2^64) and object arrays otherwise.
"""

import numpy as np


def _slot_bytes(M, la, lb, d):
    terms = d * min(la, lb)
    bits = 2 * M + terms.bit_length() + 1
    return max((bits + 7) // 8, 8)


def _pack(a, width, stride, slot):
    """Pack a (d, L) array into one integer, column-major with the given stride."""
    d, L = a.shape
    if a.dtype == np.uint64:
        buf = np.zeros((L * stride, slot), dtype=np.uint8)
        for i in range(d):
            raw = np.ascontiguousarray(a[i]).astype("<u8").view(np.uint8).reshape(L, 8)
            buf[i::stride, :8] = raw
        return int.from_bytes(buf.tobytes(), "little")
    parts = []
    zero = bytes(slot)
    for s in range(L):
        for i in range(stride):
            parts.append(int(a[i, s]).to_bytes(slot, "little") if i < d else zero)
    return int.from_bytes(b"".join(parts), "little")


def _unpack(value, nslots, slot, dtype, mask):
    raw = value.to_bytes(nslots * slot, "little")
    if dtype == np.uint64:
        grid = np.frombuffer(raw, dtype=np.uint8).reshape(nslots, slot)
        low = np.ascontiguousarray(grid[:, :8]).view("<u8").reshape(nslots)
        return low.astype(np.uint64) & np.uint64(mask)
    out = np.empty(nslots, dtype=object)
    for s in range(nslots):
        out[s] = int.from_bytes(raw[s * slot:(s + 1) * slot], "little") & mask
    return out


def reduce_rows(full, wd, mask):
    """Fold rows w^k (k >= d) of a (2d-1, L) array back into the power basis."""
    d = len(wd)
    full = full.copy()
    for k in range(2 * d - 2, d - 1, -1):
        row = full[k]
        for j, c in enumerate(wd):
            if c:
                full[k - d + j] = (full[k - d + j] + row * _scalar(c, full.dtype)) & _scalar(mask, full.dtype)
    return full[:d]


def _scalar(c, dtype):
    return np.uint64(c) if dtype == np.uint64 else c


def polymul(a, b, wd, M, out_len):
    d = a.shape[0]
    mask = (1 << M) - 1
    a = a[:, :out_len]
    b = b[:, :out_len]
    la, lb = a.shape[1], b.shape[1]
    if la == 0 or lb == 0 or out_len <= 0:
        return np.zeros((d, max(out_len, 0)), dtype=a.dtype)
    stride = 2 * d - 1
    slot = _slot_bytes(M, la, lb, d)
    prod = _pack(a, d, stride, slot) * _pack(b, d, stride, slot)
    total = la + lb - 1
    flat = _unpack(prod, total * stride, slot, a.dtype, mask)
    full = flat.reshape(total, stride).T
    if total < out_len:
        pad = np.zeros((stride, out_len - total), dtype=a.dtype)
        full = np.concatenate([full, pad], axis=1)
    full = np.ascontiguousarray(full[:, :out_len])
    if d == 1:
        return full
    return np.ascontiguousarray(reduce_rows(full, wd, mask))


def matvec(mat, vec, M):
    cols = min(mat.shape[1], vec.shape[1])
    out = vec[:, :cols] @ mat[:, :cols].T
    if out.dtype == np.uint64:
        return out & np.uint64((1 << M) - 1)
    return out % (1 << M)
