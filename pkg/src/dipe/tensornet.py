"""Depth-dependent brickwork weights Upsilon_d(P).

Upsilon_d(P) = sum_a f_d(a, 0)^2 h(a, P) with
h(a, P) = E_U <0|U P U^dag|0> <a|U P U^dag|a> over depth-d brickwork circuits.

A Clifford brick maps the 2-bit support signature of a Pauli through the
column-stochastic matrix ``B``: the identity stays put and any non-identity
input becomes a uniform non-identity Pauli on the pair. Two evaluations ship:

* an exact dense chain over all 2^n signatures (small n), and
* a transfer-matrix contraction around the ring whose bond carries the
  d - 1 signature bits crossing each column boundary (any even n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache

import numpy as np

from ._wht import wht
from .classical import ClassicalFn, FnKind
from .clifford import conjugate
from .ensembles import EnsembleKind, EnsembleSpec, brick_layout, sample_unitary
from .errors import ConfigError, ResourceCapError
from .pauli import BitString, PauliString, SignedPauli, popcount

ORACLE_CAP = 14
BOND_BITS_CAP = 12


def _frac_array(rows) -> np.ndarray:
    return np.array([[float(Fraction(v)) for v in row] for row in rows])


@dataclass(frozen=True)
class BrickTransfer:
    """Signature transfer of one random Cl_2 brick; rows/cols are 2-bit signatures 00, 01, 10, 11."""

    B: np.ndarray = field(
        default_factory=lambda: _frac_array(
            [[1, 0, 0, 0], [0, "1/5", "1/5", "1/5"], [0, "1/5", "1/5", "1/5"], [0, "3/5", "3/5", "3/5"]]
        )
    )

    def __post_init__(self):
        self.B.setflags(write=False)

    @property
    def B_reduced(self) -> np.ndarray:
        """The two distinct columns: identity input and non-identity input."""
        return self.B[:, :2]


@dataclass(frozen=True)
class WeightVectors:
    """Per-site weights of an output signature bit for a_i = 0 (W0) and a_i = 1 (W1)."""

    W0: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0 / 3.0]))
    W1: np.ndarray = field(default_factory=lambda: np.array([1.0, -1.0 / 3.0]))


@dataclass(frozen=True)
class FTensor:
    """f_d(a, 0)^2 on one last-layer block, indexed by the block's two bits of a."""

    values: np.ndarray = field(default_factory=lambda: np.array([16.0, 1.0, 1.0, 1.0]))


BRICK = BrickTransfer()
WEIGHTS = WeightVectors()
FBLOCK = FTensor()


def block_weights() -> np.ndarray:
    """G[g] = sum_{a in {0,1}^2} F(a) w(a_1, g_1) w(a_2, g_2) for the output signature g."""
    w = np.stack([WEIGHTS.W0, WEIGHTS.W1])  # [a_bit, g_bit]
    g = np.einsum("a,ai,aj->ij", FBLOCK.values, w[[0, 0, 1, 1]], w[[0, 1, 0, 1]])
    return g.reshape(4)


def last_layer_factor() -> np.ndarray:
    """L[t] = sum_g B[g, t] G[g] for the brick input flag t (0 identity, 1 otherwise)."""
    return BRICK.B_reduced.T @ block_weights()


@dataclass(frozen=True, eq=False)
class SignatureDistribution:
    n: int
    probs: np.ndarray

    def __post_init__(self):
        if self.probs.shape != (1 << self.n,):
            raise ValueError("probability vector does not match n")

    def prob(self, gamma: BitString | str) -> float:
        if isinstance(gamma, str):
            gamma = BitString.from_str(gamma)
        return float(self.probs[gamma.to_int()])


def _check(n: int, d: int) -> None:
    if n < 2 or n % 2:
        raise ConfigError(f"brickwork circuits need even n >= 2, got {n}")
    if d < 1:
        raise ConfigError("depth must be >= 1")


def _apply_brick(probs: np.ndarray, n: int, q1: int, q2: int) -> np.ndarray:
    t = probs.reshape((2,) * n)
    t = np.moveaxis(t, (q1, q2), (0, 1)).reshape(4, -1)
    t = (BRICK.B @ t).reshape((2, 2) + (2,) * (n - 2))
    return np.moveaxis(t, (0, 1), (q1, q2)).reshape(-1)


def propagate_signature(p: PauliString, d: int, n: int | None = None, cap: int = ORACLE_CAP) -> SignatureDistribution:
    """Distribution of the support signature of U P U^dag after d brick layers."""
    n = p.n if n is None else n
    if p.n != n:
        raise ValueError(f"Pauli on {p.n} qubits, expected {n}")
    _check(n, d)
    if n > cap:
        raise ResourceCapError(f"dense signature chain for n = {n} exceeds the cap of {cap}")
    probs = np.zeros(1 << n)
    probs[p.support] = 1.0
    for pairs in brick_layout(n, d).layers:
        for q1, q2 in pairs:
            probs = _apply_brick(probs, n, q1, q2)
    return SignatureDistribution(n, probs)


def h_all(p: PauliString, d: int, cap: int = ORACLE_CAP) -> np.ndarray:
    """h(a, P) for every a: transform of Pr(gamma) 3^{-|gamma|} with sign (-1)^{|gamma & a|}."""
    n = p.n
    dist = propagate_signature(p, d, n, cap)
    weights = dist.probs * 3.0 ** -popcount(np.arange(1 << n))
    return wht(weights)


def h_oracle(a: BitString, p: PauliString, d: int, n: int | None = None, cap: int = ORACLE_CAP) -> float:
    n = p.n if n is None else n
    if a.n != n:
        raise ValueError(f"bitstring of length {a.n}, expected {n}")
    dist = propagate_signature(p, d, n, cap)
    w0, w1 = WEIGHTS.W0, WEIGHTS.W1
    gammas = np.arange(1 << n)
    total = dist.probs.copy()
    for i, ai in enumerate(a.bits):
        g = (gammas >> (n - 1 - i)) & 1
        total *= (w1 if ai else w0)[g]
    return float(total.sum())


def upsilon_oracle(p: PauliString, d: int, n: int | None = None, cap: int = ORACLE_CAP) -> float:
    n = p.n if n is None else n
    _check(n, d)
    f2 = ClassicalFn(FnKind.BRICKWORK, n, d).table().astype(float) ** 2
    return float(np.sum(f2 * h_all(p, d, cap)))


def h_monte_carlo(
    a: BitString, p: PauliString, d: int, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Sample mean and standard error of <0|UPU^dag|0><a|UPU^dag|a> over brickwork circuits."""
    spec = EnsembleSpec(EnsembleKind.BRICKWORK, p.n, d)
    a_int = a.to_int()
    sp = SignedPauli(p)
    vals = np.empty(samples)
    for s in range(samples):
        q = conjugate(sample_unitary(spec, rng).tableau, sp)
        if q.pauli.x:
            vals[s] = 0.0
        else:
            # the two diagonal elements share the sign, so it cancels
            vals[s] = (-1) ** popcount(q.pauli.z & a_int)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


# ---------------------------------------------------------------------------
# transfer-matrix contraction


def block_pattern(p: PauliString) -> tuple[int, ...]:
    """x(P): per block (2c, 2c+1) of the first layer, 1 if P acts non-trivially on it."""
    if p.n % 2:
        raise ConfigError(f"brickwork circuits need even n, got {p.n}")
    n = p.n
    bits = [(p.support >> (n - 1 - i)) & 1 for i in range(n)]
    return tuple(int(bits[2 * c] or bits[2 * c + 1]) for c in range(p.n // 2))


def _brick_out(t: np.ndarray, o1: np.ndarray, o2: np.ndarray) -> np.ndarray:
    """B'(o1 o2 | t) for input flag t and output bits, elementwise."""
    col = BRICK.B_reduced
    return col[2 * o1 + o2, t]


@cache
def column_transfers(d: int) -> tuple[np.ndarray, np.ndarray]:
    """T[x] over the d - 1 boundary bits; x is the column's first-layer flag.

    Column c holds the odd bricks on (2c, 2c+1) and the even bricks on
    (2c+1, 2c+2). Left boundary bits l_1..l_{d-1} are the signatures of site
    2c after each layer, right boundary bits r_1..r_{d-1} those of site
    2c+2, and the internal bits i_1..i_{d-1} (site 2c+1) are summed out.
    The last layer contributes L[t] instead of an output distribution.
    """
    if d < 1:
        raise ConfigError("depth must be >= 1")
    k = d - 1
    if k > BOND_BITS_CAP:
        raise ResourceCapError(f"bond dimension 2^{k} exceeds the cap of 2^{BOND_BITS_CAP}")
    lf = last_layer_factor()
    size = 1 << k
    # all (l, i, r) assignments, bit ell-1 of each word is the value after layer ell
    l, i, r = np.meshgrid(np.arange(size), np.arange(size), np.arange(size), indexing="ij")

    def bit(word, ell):
        return (word >> (ell - 1)) & 1

    out = []
    for x in (0, 1):
        w = np.ones(l.shape)
        for ell in range(1, d + 1):
            if ell % 2:
                t = np.full(l.shape, x) if ell == 1 else bit(l, ell - 1) | bit(i, ell - 1)
                w = w * (lf[t] if ell == d else _brick_out(t, bit(l, ell), bit(i, ell)))
            else:
                t = bit(i, ell - 1) | bit(r, ell - 1)
                w = w * (lf[t] if ell == d else _brick_out(t, bit(i, ell), bit(r, ell)))
        mat = w.sum(axis=1)
        mat.setflags(write=False)
        out.append(mat)
    return out[0], out[1]


def upsilon_from_pattern(pattern, d: int) -> float:
    """Tr prod_c T[x_c] around the ring of n/2 columns."""
    pattern = tuple(int(v) for v in pattern)
    if not pattern:
        raise ConfigError("empty block pattern")
    mats = column_transfers(d)
    acc = mats[pattern[0]]
    for x in pattern[1:]:
        acc = acc @ mats[x]
    return float(np.trace(acc))


def upsilon_mps(p: PauliString, d: int, n: int | None = None) -> float:
    n = p.n if n is None else n
    if p.n != n:
        raise ValueError(f"Pauli on {p.n} qubits, expected {n}")
    _check(n, d)
    return upsilon_from_pattern(block_pattern(p), d)


def pauli_for_pattern(pattern) -> PauliString:
    """Z on the first site of each flagged block."""
    return PauliString.from_label("".join(("ZI" if x else "II") for x in pattern))
