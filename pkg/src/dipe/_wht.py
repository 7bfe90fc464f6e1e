"""Walsh-Hadamard transform along the leading axis."""

from __future__ import annotations

from functools import cache

import numpy as np

_CHUNK = 5
_MATMUL_MAX = 9


@cache
def _hadamard(k: int, dtype: str) -> np.ndarray:
    h = np.ones((1, 1), dtype=dtype)
    for _ in range(k):
        h = np.block([[h, h], [h, -h]])
    h.setflags(write=False)
    return h


def wht(v: np.ndarray) -> np.ndarray:
    """Unnormalized transform: out[s] = sum_b (-1)^{popcount(s & b)} v[b].

    Works for integer, float and complex arrays; trailing axes are batched.
    Short transforms split the 2^n axis into chunks of at most 2^5 hit by a
    small dense Hadamard matrix; long ones use radix-2 butterflies.
    """
    v = np.asarray(v)
    size = v.shape[0]
    if size < 1 or size & (size - 1):
        raise ValueError("length must be a power of two")
    n = size.bit_length() - 1
    rest = int(np.prod(v.shape[1:], dtype=np.int64))
    dtype = np.result_type(v.dtype, np.int8)
    if n > _MATMUL_MAX:
        return _butterfly(v.astype(dtype, copy=True))
    out = v.astype(dtype, copy=True).reshape(size, rest)
    done = 0
    while done < n:
        k = min(_CHUNK, n - done)
        outer = 1 << (n - done - k)
        inner = (1 << done) * rest
        out = np.matmul(_hadamard(k, dtype.str), out.reshape(outer, 1 << k, inner))
        done += k
    return out.reshape(v.shape)


def _butterfly(out: np.ndarray) -> np.ndarray:
    h = 1
    while h < out.shape[0]:
        view = out.reshape((-1, 2, h) + out.shape[1:])
        lo = view[:, 0].copy()
        view[:, 0] += view[:, 1]
        lo -= view[:, 1]
        view[:, 1] = lo
        h *= 2
    return out
