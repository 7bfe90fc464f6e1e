"""Small dense linear algebra over GF(2) on uint8 matrices."""

from __future__ import annotations

import numpy as np


def row_reduce(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = np.array(a, dtype=np.uint8) & 1
    pivots: list[int] = []
    r = 0
    rows, cols = m.shape
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if len(hits) == 0:
            continue
        p = r + hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        m[others] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray) -> int:
    return len(row_reduce(a)[1])


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution x of a @ x = b (mod 2), or None if inconsistent."""
    a = np.asarray(a, dtype=np.uint8)
    aug = np.hstack([a, np.asarray(b, dtype=np.uint8).reshape(-1, 1)])
    red, pivots = row_reduce(aug)
    ncols = a.shape[1]
    if ncols in pivots:
        return None
    x = np.zeros(ncols, dtype=np.uint8)
    for i, c in enumerate(pivots):
        x[c] = red[i, -1]
    return x


def nullspace(a: np.ndarray) -> np.ndarray:
    """Basis (rows) of {x : a @ x = 0 mod 2}."""
    a = np.asarray(a, dtype=np.uint8)
    ncols = a.shape[1]
    red, pivots = row_reduce(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(pivots):
            basis[k, c] = red[i, f]
    return basis
