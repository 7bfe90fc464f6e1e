"""Post-processing functions f(a, b) for each ensemble.

All three functions are Pauli invariant, f(a, b) = f(a ^ b, 0), and take
integer values, so they are evaluated on integer-encoded XORs with exact
integer arithmetic.

* global:    2^n if a == b, else -1
* local:     (-1)^D 2^(n - D) with D the Hamming distance
* brickwork: product over last-layer pairs of 4 (equal 2-bit blocks) or -1
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .clifford import cl1_table, cl2_table
from .ensembles import EnsembleKind, EnsembleSpec, last_layer_pairs
from .errors import ConfigError, ResourceCapError
from .pauli import BitString, popcount

TABLE_CAP = 24


class FnKind(enum.Enum):
    GLOBAL = "global"
    LOCAL = "local"
    BRICKWORK = "brickwork"


@dataclass(frozen=True)
class ClassicalFn:
    kind: FnKind
    n: int
    depth: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.kind is FnKind.BRICKWORK:
            if self.n % 2:
                raise ConfigError(f"brickwork functions need even n, got {self.n}")
            if self.depth < 1:
                raise ConfigError("brickwork depth must be >= 1")

    @classmethod
    def for_ensemble(cls, spec: EnsembleSpec) -> "ClassicalFn":
        if spec.kind is EnsembleKind.GLOBAL_CLIFFORD:
            return cls(FnKind.GLOBAL, spec.n)
        if spec.kind is EnsembleKind.LOCAL_CLIFFORD:
            return cls(FnKind.LOCAL, spec.n)
        return cls(FnKind.BRICKWORK, spec.n, spec.depth)

    @property
    def parity(self) -> int:
        return self.depth % 2

    @cached_property
    def block_masks(self) -> tuple[int, ...]:
        """Integer masks of the last-layer pairs (brickwork only)."""
        n = self.n
        return tuple((1 << (n - 1 - p)) | (1 << (n - 1 - q)) for p, q in last_layer_pairs(n, self.depth))

    @property
    def f00(self) -> int:
        return 1 << self.n

    def norm_sq(self) -> int:
        """sum_a f(a, 0)^2."""
        n = self.n
        if self.kind is FnKind.GLOBAL:
            return 4**n + 2**n - 1
        if self.kind is FnKind.LOCAL:
            return 5**n
        return 19 ** (n // 2)

    @property
    def exact_int64(self) -> bool:
        return self.n <= 62

    def values(self, xor: np.ndarray) -> np.ndarray:
        """f(x, 0) for integer-encoded x; int64 when it fits, Python ints otherwise."""
        n = self.n
        x = np.asarray(xor)
        if not self.exact_int64:
            return np.array([self.value_int(int(v)) for v in x.ravel()], dtype=object).reshape(x.shape)
        x = x.astype(np.int64)
        if self.kind is FnKind.GLOBAL:
            return np.where(x == 0, np.int64(1) << n, np.int64(-1))
        if self.kind is FnKind.LOCAL:
            d = popcount(x)
            return np.where(d % 2, -1, 1) * np.left_shift(np.int64(1), n - d)
        unequal = np.zeros(x.shape, dtype=np.int64)
        for mask in self.block_masks:
            unequal += (x & mask) != 0
        blocks = len(self.block_masks)
        return np.where(unequal % 2, -1, 1) * np.left_shift(np.int64(1), 2 * (blocks - unequal))

    def value_int(self, x: int) -> int:
        n = self.n
        if self.kind is FnKind.GLOBAL:
            return (1 << n) if x == 0 else -1
        if self.kind is FnKind.LOCAL:
            d = x.bit_count()
            return (-1) ** d * (1 << (n - d))
        unequal = sum(1 for mask in self.block_masks if x & mask)
        return (-1) ** unequal * 4 ** (len(self.block_masks) - unequal)

    def table(self) -> np.ndarray:
        """f(x, 0) for all 2^n values of x (read-only, cached)."""
        return self._table

    @cached_property
    def _table(self) -> np.ndarray:
        if self.n > TABLE_CAP:
            raise ResourceCapError(f"dense table for n = {self.n} exceeds the cap of {TABLE_CAP}")
        t = self.values(np.arange(1 << self.n, dtype=np.int64))
        t.setflags(write=False)
        return t


def eval_fn(fn: ClassicalFn, a: BitString, b: BitString) -> float:
    if a.n != fn.n or b.n != fn.n:
        raise ValueError(f"bitstrings must have length {fn.n}")
    return float(fn.value_int(a.to_int() ^ b.to_int()))


def norm_sq(fn: ClassicalFn) -> int:
    return fn.norm_sq()


# ---------------------------------------------------------------------------
# moment-channel verification


def block_table(equal: float = 4.0, unequal: float = -1.0) -> np.ndarray:
    """f(a, b) on one 2-qubit block as a 4x4 array."""
    return np.where(np.eye(4, dtype=bool), equal, unequal)


def two_copy_swap(dim: int) -> np.ndarray:
    s = np.zeros((dim * dim, dim * dim))
    for a in range(dim):
        for b in range(dim):
            s[b * dim + a, a * dim + b] = 1.0
    return s


def twirl_diagonal(values: np.ndarray, unitaries: np.ndarray) -> np.ndarray:
    """E_U (U^dagger)^{(x)2} O U^{(x)2} for O = sum_ab values[a, b] |ab><ab|."""
    dim = unitaries.shape[1]
    diag = np.asarray(values, dtype=float).reshape(dim * dim)
    v = np.einsum("gij,gkl->gikjl", unitaries, unitaries).reshape(len(unitaries), dim * dim, dim * dim)
    # sum_g V^dagger diag(O) V, contracted over the diagonal index
    return np.einsum("gji,j,gjk->ik", v.conj(), diag, v, optimize=True) / len(unitaries)


def twirl_residual(values: np.ndarray, k: int) -> float:
    """Max entry of |M(O) - SWAP| averaging over all of Cl_k (k = 1 or 2)."""
    table = cl1_table() if k == 1 else cl2_table()
    dim = 1 << k
    m = twirl_diagonal(values, table.matrices)
    return float(np.max(np.abs(m - two_copy_swap(dim))))


def verify_unbiasedness(fn: ClassicalFn) -> tuple[bool, float]:
    """Check that the two-copy twirl of the diagonal of f is the SWAP operator.

    Local functions and ensembles factor over sites, and a brickwork function
    factors over the blocks of the last layer whose Cl_2 twirl already yields
    SWAP (which later layers leave invariant); so the check runs on one site
    or one block. Global functions are enumerable for n <= 2 only.
    """
    if fn.kind is FnKind.LOCAL:
        residual = twirl_residual(ClassicalFn(FnKind.LOCAL, 1).table()[np.bitwise_xor.outer(range(2), range(2))], 1)
    elif fn.kind is FnKind.BRICKWORK:
        residual = twirl_residual(block_table(), 2)
    else:
        if fn.n > 2:
            raise ResourceCapError("global Clifford enumeration is limited to n <= 2")
        tab = fn.table()
        idx = np.bitwise_xor.outer(np.arange(1 << fn.n), np.arange(1 << fn.n))
        residual = twirl_residual(tab[idx], fn.n)
    return residual < 1e-12, residual
