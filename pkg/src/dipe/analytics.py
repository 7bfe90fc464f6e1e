"""Closed-form variances, Pauli-spectrum sums and exact moment oracles.

The variance of X_m splits as V1 + V2 + V3 + V4 with, for a fixed unitary U
and outcome distributions p, q of U rho U^dag and U sigma U^dag,

    V1 = -tr[rho sigma]^2
    V2 = E_U sum_ab f(a,b)^2 p_a q_b / m^2
    V3 = (m-1)/m^2 E_U [sum_a p_a (F q)_a^2 + sum_b q_b (F^T p)_b^2]
    V4 = ((m-1)/m)^2 E_U (p^T F q)^2.

Xi(P) = tr[P rho] tr[P sigma] is the Pauli-spectrum product of the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache

import numpy as np

from ._wht import wht
from .classical import ClassicalFn, FnKind
from .clifford import cl1_table, ordered_products
from .ensembles import EnsembleKind, EnsembleSpec, sample_unitary
from .errors import ConfigError, ResourceCapError
from .states import (
    StabilizerState,
    StatePair,
    apply_circuit_vector,
    inner_product,
    make_haar_random,
    make_s_state,
    pauli_cross_vector,
    to_statevector,
)
from .pauli import bit_matrix_to_ints, ints_to_bit_matrix, popcount

PAULI_SUM_CAP = 8
SPARSE_CAP = 20


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class VarianceBreakdown:
    v1: float
    v2: float
    v3: float
    v4: float

    @property
    def total(self):
        return self.v1 + self.v2 + self.v3 + self.v4


@dataclass(frozen=True)
class AvgVarianceInputs:
    norm_sq: int | float
    f00: int | float
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError("n and m must be at least 1")
        if self.norm_sq < 1:
            raise ConfigError("norm_sq must be >= 1")

    @classmethod
    def for_fn(cls, fn: ClassicalFn, m: int) -> "AvgVarianceInputs":
        return cls(fn.norm_sq(), fn.f00, fn.n, m)

    @classmethod
    def for_ensemble(cls, spec: EnsembleSpec, m: int) -> "AvgVarianceInputs":
        return cls.for_fn(ClassicalFn.for_ensemble(spec), m)


@dataclass(frozen=True)
class NonstabReport:
    xi_norm_sq: float
    xi_tilde_dot_xi: float
    m2: float | None = None
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# average variances over Haar states


def _q(v) -> Fraction:
    return Fraction(v) if isinstance(v, (int, Fraction)) else Fraction(repr(float(v)))


def _finish(parts, exact: bool) -> VarianceBreakdown:
    return VarianceBreakdown(*(parts if exact else (float(p) for p in parts)))


def avg_variance_case1(inp: AvgVarianceInputs, exact: bool = False) -> VarianceBreakdown:
    """Expected V1..V4 for rho = sigma = a single Haar-random pure state."""
    d = Fraction(2) ** inp.n
    f2, f0, m = _q(inp.norm_sq), _q(inp.f00), Fraction(inp.m)
    v1 = Fraction(-1)
    v2 = (f0**2 + f2) / ((d + 1) * m**2)
    v3 = 2 * (m - 1) * (1 + f2 + 2 * f0 + 2 * f0**2) / ((d + 1) * (d + 2) * m**2)
    v4 = ((m - 1) / m) ** 2 * (d + 2 * d * f0 + 4 + 8 * f0 + d * f0**2 + 2 * f2 + 6 * f0**2) / (
        (d + 1) * (d + 2) * (d + 3)
    )
    return _finish((v1, v2, v3, v4), exact)


def avg_variance_case2(inp: AvgVarianceInputs, exact: bool = False) -> VarianceBreakdown:
    """Expected V1..V4 for independent Haar-random pure states rho, sigma."""
    d = Fraction(2) ** inp.n
    f2, m = _q(inp.norm_sq), Fraction(inp.m)
    v1 = -1 / (d / 2 * (d + 1))
    v2 = f2 / (d * m**2)
    v3 = 2 * (m - 1) * (1 + f2) / (d * (d + 1) * m**2)
    v4 = ((m - 1) / m) ** 2 * (d + 2 + f2) / (d * (d + 1) ** 2)
    return _finish((v1, v2, v3, v4), exact)


def leading_v2_base(kind: EnsembleKind) -> float:
    """b with case-2 V2 m^2 = b^n asymptotically: 2, 2.5 and sqrt(19)/2."""
    return {EnsembleKind.GLOBAL_CLIFFORD: 2.0, EnsembleKind.LOCAL_CLIFFORD: 2.5, EnsembleKind.BRICKWORK: math.sqrt(19) / 2}[kind]


# ---------------------------------------------------------------------------
# Pauli spectra


def _dense_vectors(pair: StatePair, cap: int) -> tuple[np.ndarray, np.ndarray]:
    if pair.n > cap:
        raise ResourceCapError(f"dense Pauli sums for n = {pair.n} exceed the cap of {cap}")
    return to_statevector(pair.rho).amplitudes, to_statevector(pair.sigma).amplitudes


def pauli_spectrum(state, cap: int = PAULI_SUM_CAP) -> np.ndarray:
    """tr[P rho] for all 4^n Paulis as a (2^n, 2^n) array indexed by the (x, z) masks."""
    if state.n > cap:
        raise ResourceCapError(f"dense Pauli spectrum for n = {state.n} exceeds the cap of {cap}")
    psi = to_statevector(state).amplitudes
    return pauli_cross_vector(psi, psi).real


def xi_dense(pair: StatePair, cap: int = PAULI_SUM_CAP) -> np.ndarray:
    """Xi(P) = tr[P rho] tr[P sigma] indexed [x, z]."""
    return pauli_spectrum(pair.rho, cap) * pauli_spectrum(pair.sigma, cap)


def stabilizer_group(state: StabilizerState) -> tuple[np.ndarray, np.ndarray]:
    """All 2^n stabilizer elements as keys (x << n) | z with their signs."""
    n = state.n
    if n > SPARSE_CAP:
        raise ResourceCapError(f"stabilizer group enumeration for n = {n} exceeds the cap of {SPARSE_CAP}")
    x, z, ph = ordered_products(_all_bit_rows(n), state.x, state.z, state.phases)
    keys = (bit_matrix_to_ints(x) << n) | bit_matrix_to_ints(z)
    return keys, 1 - ph


@cache
def _all_bit_rows(n: int) -> np.ndarray:
    return ints_to_bit_matrix(np.arange(1 << n), n).astype(np.int64)


def xi_sparse(pair: StatePair) -> tuple[np.ndarray, np.ndarray]:
    """Support keys and values of Xi for two stabilizer states (the unsigned common stabilizers)."""
    ka, sa = stabilizer_group(pair.rho)
    kb, sb = stabilizer_group(pair.sigma)
    common, ia, ib = np.intersect1d(ka, kb, assume_unique=True, return_indices=True)
    return common, (sa[ia] * sb[ib]).astype(float)


def _both_stabilizer(pair: StatePair) -> bool:
    return isinstance(pair.rho, StabilizerState) and isinstance(pair.sigma, StabilizerState)


def xi_norm_sq(pair: StatePair, cap: int = PAULI_SUM_CAP) -> float:
    """sum_P tr^2[P rho] tr^2[P sigma]."""
    if _both_stabilizer(pair):
        _, vals = xi_sparse(pair)
        return float(np.sum(vals**2))
    return float(np.sum(xi_dense(pair, cap) ** 2))


def xi_tilde_dot_xi(pair: StatePair, cap: int = PAULI_SUM_CAP) -> float:
    """sum_P tr[rho P sigma P] tr[P rho] tr[P sigma]."""
    if _both_stabilizer(pair):
        # every common stabilizer P satisfies P sigma P = sigma
        _, vals = xi_sparse(pair)
        return float(inner_product(pair) * np.sum(vals))
    psi, phi = _dense_vectors(pair, cap)
    cross = np.abs(pauli_cross_vector(psi, phi)) ** 2
    return float(np.sum(cross * xi_dense(pair, cap)))


def nonstab_report(pair: StatePair, m2: float | None = None, cap: int = PAULI_SUM_CAP) -> NonstabReport:
    a = xi_norm_sq(pair, cap)
    b = xi_tilde_dot_xi(pair, cap)
    return NonstabReport(a, b, m2, {"n": pair.n, "overlap": inner_product(pair), "sparse": _both_stabilizer(pair)})


# ---------------------------------------------------------------------------
# global Clifford


def global_clifford_fourth_moment(pair: StatePair, cap: int = PAULI_SUM_CAP) -> float:
    """E_U (sum_a p_a q_a)^2 over Cl_n for pure rho, sigma."""
    d = 2.0**pair.n
    tr = inner_product(pair)
    return ((1 + tr) ** 2 + (xi_norm_sq(pair, cap) + xi_tilde_dot_xi(pair, cap)) / d) / ((d + 1) * (d + 2))


def global_clifford_breakdown(pair: StatePair, m: int, cap: int = PAULI_SUM_CAP) -> VarianceBreakdown:
    """Exact V1..V4 under the global Clifford ensemble for pure states.

    V2 uses the 2-design identity, V3 the 3-design one and V4 the fourth
    moment above.
    """
    if m < 1:
        raise ConfigError("m must be at least 1")
    d = 2.0**pair.n
    tr = inner_product(pair)
    v2 = (d + (d - 1) * tr) / m**2
    # E sum_a p_a q_a^2 = (2 + 4 tr) / ((d + 1)(d + 2)) for pure states
    s = (d + 1) * (2 + 4 * tr) / (d + 2) - 1 - 2 * tr
    v3 = 2 * (m - 1) * s / m**2
    mu2 = (d + 1) ** 2 * global_clifford_fourth_moment(pair, cap) - 2 * tr - 1
    v4 = ((m - 1) / m) ** 2 * mu2
    return VarianceBreakdown(-(tr**2), v2, v3, v4)


def global_clifford_variance_bound(pair: StatePair, m: int, cap: int = PAULI_SUM_CAP) -> float:
    """V1 + V2 + V4 with exact constants; V3 is O(1/m) and left out."""
    b = global_clifford_breakdown(pair, m, cap)
    return b.v1 + b.v2 + b.v4


# ---------------------------------------------------------------------------
# local Clifford


def _site_tensor(xi: np.ndarray, n: int) -> np.ndarray:
    """Reshape Xi[x, z] into a (4,)*n tensor with per-site code x_i + 2 z_i."""
    t = xi.reshape((2,) * (2 * n))
    order = [ax for i in range(n) for ax in (n + i, i)]  # (z_i, x_i) per site
    return t.transpose(order).reshape((4,) * n)


_SITE_KERNEL = np.array([[1, 1, 1, 1], [1, 3, 0, 0], [1, 0, 3, 0], [1, 0, 0, 3]], dtype=float)


def _apply_per_site(t: np.ndarray, mat: np.ndarray) -> np.ndarray:
    for ax in range(t.ndim):
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [ax])), 0, ax)
    return t


def _sparse_codes(keys: np.ndarray, n: int) -> np.ndarray:
    x = ints_to_bit_matrix(keys >> n, n)
    z = ints_to_bit_matrix(keys & ((1 << n) - 1), n)
    return x + 2 * z


def local_clifford_v2(pair: StatePair, m: int, cap: int = PAULI_SUM_CAP) -> float:
    """(2.5^n / m^2) sum_P Xi(P) / 5^{|P|}."""
    n = pair.n
    if _both_stabilizer(pair):
        keys, vals = xi_sparse(pair)
        weight = popcount((keys >> n) | (keys & ((1 << n) - 1)))
        total = float(np.sum(vals * 5.0**-weight))
    else:
        xi = xi_dense(pair, cap)
        idx = np.arange(1 << n)
        weight = popcount(idx[:, None] | idx[None, :])
        total = float(np.sum(xi * 5.0**-weight))
    return 2.5**n * total / m**2


def local_clifford_v4(pair: StatePair, m: int, cap: int = PAULI_SUM_CAP) -> float:
    """((m-1)^2 / (4^n m^2)) sum_{P, Q compatible} Xi(P) Xi(Q) 3^{#sites with P_i = Q_i != I}.

    P and Q are compatible when on every site one of them is I or both agree,
    so the double sum is the quadratic form of Xi with a per-site 4x4 kernel.
    """
    n = pair.n
    if _both_stabilizer(pair):
        keys, vals = xi_sparse(pair)
        codes = _sparse_codes(keys, n)
        total = 0.0
        for start in range(0, len(keys), 64):
            block = codes[start : start + 64]
            k = np.prod(_SITE_KERNEL[block[:, None, :], codes[None, :, :]], axis=2)
            total += float(vals[start : start + 64] @ k @ vals)
    else:
        t = _site_tensor(xi_dense(pair, cap), n)
        total = float(np.sum(t * _apply_per_site(t, _SITE_KERNEL)))
    return (m - 1) ** 2 / (4.0**n * m**2) * total


def local_clifford_breakdown(pair: StatePair, m: int, cap: int = PAULI_SUM_CAP) -> VarianceBreakdown:
    """V1, V2 and V4 under the local Clifford ensemble; V3 is reported as NaN."""
    tr = inner_product(pair)
    return VarianceBreakdown(-(tr**2), local_clifford_v2(pair, m, cap), float("nan"), local_clifford_v4(pair, m, cap))


# ---------------------------------------------------------------------------
# nonstabilizerness


def m2_sre(n: int, k: int, theta: float) -> float:
    """2^{n-k} (1 + cos^4 theta + sin^4 theta)^k for the product state S_{n,k}(theta)."""
    if not 0 <= k <= n:
        raise ConfigError(f"k = {k} is outside [0, {n}]")
    return 2.0 ** (n - k) * (1 + math.cos(theta) ** 4 + math.sin(theta) ** 4) ** k


def xi_theta(theta: float) -> float:
    """E_U [sum_ab f(a,b) p_U(a) p_U(b)]^2 over the 24 single-qubit Cliffords, |psi> = S_{1,1}(theta)."""
    psi = make_s_state(1, 1, theta).amplitudes
    f = ClassicalFn(FnKind.LOCAL, 1).table()[np.bitwise_xor.outer(range(2), range(2))].astype(float)
    p = np.abs(cl1_table().matrices @ psi) ** 2
    mu = np.einsum("ga,ab,gb->g", p, f, p)
    return float(np.mean(mu**2))


def local_product_reference(n: int, k: int, theta: float) -> float:
    """Large-m local Clifford variance 1.5^{n-k} xi(theta)^k - 1 of S_{n,k}(theta) with itself."""
    if not 0 <= k <= n:
        raise ConfigError(f"k = {k} is outside [0, {n}]")
    return 1.5 ** (n - k) * xi_theta(theta) ** k - 1


# ---------------------------------------------------------------------------
# brickwork


def xi_block_classes(pair: StatePair, cap: int = PAULI_SUM_CAP) -> dict[tuple[int, ...], float]:
    """sum of Xi(P) over the Paulis of each first-layer block pattern x(P)."""
    n = pair.n
    if n % 2:
        raise ConfigError(f"brickwork circuits need even n, got {n}")
    blocks = n // 2
    if _both_stabilizer(pair):
        keys, vals = xi_sparse(pair)
        codes = _sparse_codes(keys, n)
        flags = (codes[:, 0::2] + codes[:, 1::2]) > 0
        out: dict[tuple[int, ...], float] = {}
        for row, v in zip(flags, vals):
            key = tuple(int(b) for b in row)
            out[key] = out.get(key, 0.0) + float(v)
        return out
    t = _site_tensor(xi_dense(pair, cap), n).reshape((16,) * blocks)
    fold = np.zeros((2, 16))
    fold[0, 0] = 1.0
    fold[1, 1:] = 1.0
    t = _apply_per_site(t, fold)
    return {tuple((v >> (blocks - 1 - c)) & 1 for c in range(blocks)): float(val) for v, val in enumerate(t.reshape(-1))}


def brickwork_v2_exact(pair: StatePair, d: int, m: int, cap: int = PAULI_SUM_CAP) -> float:
    """(1 / (2^n m^2)) sum_P Xi(P) Upsilon_d(P)."""
    from .tensornet import upsilon_from_pattern

    n = pair.n
    classes = xi_block_classes(pair, cap)
    total = sum(val * upsilon_from_pattern(pat, d) for pat, val in sorted(classes.items()))
    return total / (2.0**n * m**2)


# ---------------------------------------------------------------------------
# conditional-moment Monte Carlo


def conditional_moments(p: np.ndarray, q: np.ndarray, fn: ClassicalFn) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact shot averages for fixed outcome distributions (columns of p and q).

    Returns (E f^2, S_a + S_b, mu) per column with mu = p^T F q,
    S_a = sum_a p_a (F q)_a^2 and S_b = sum_b q_b (F^T p)_b^2.
    F is a function of a ^ b, so every product with it is an XOR convolution.
    """
    n = fn.n
    g = fn.table().astype(float)
    size = 1 << n
    hg, hg2 = wht(g), wht(g**2)
    hp, hq = wht(p), wht(q)
    if p.ndim == 2:
        hg, hg2 = hg[:, None], hg2[:, None]
    fq = wht(hg * hq) / size
    fp = wht(hg * hp) / size
    f2q = wht(hg2 * hq) / size
    mu = np.sum(p * fq, axis=0)
    ef2 = np.sum(p * f2q, axis=0)
    s = np.sum(p * fq**2, axis=0) + np.sum(q * fp**2, axis=0)
    return ef2, s, mu


def breakdown_from_moments(ef2, s, mu, overlap, m: int) -> VarianceBreakdown:
    """Average the conditional moments into V1..V4 at shot count m."""
    return VarianceBreakdown(
        -float(np.mean(np.asarray(overlap) ** 2)),
        float(np.mean(ef2)) / m**2,
        (m - 1) * float(np.mean(s)) / m**2,
        ((m - 1) / m) ** 2 * float(np.mean(mu**2)),
    )


@dataclass(frozen=True, eq=False)
class HaarVarianceSample:
    """Conditional moments on a (unitary, state pair) grid, reusable for any m."""

    ef2: np.ndarray
    s: np.ndarray
    mu: np.ndarray
    overlap: np.ndarray

    def breakdown(self, m: int) -> VarianceBreakdown:
        return breakdown_from_moments(self.ef2, self.s, self.mu, self.overlap, m)

    def total_stderr(self, m: int) -> float:
        """Standard error over unitaries of the per-unitary variance averages."""
        x = (self.ef2 + (m - 1) * self.s + (m - 1) ** 2 * self.mu**2) / m**2 - self.overlap[None, :] ** 2
        per_u = x.mean(axis=1)
        return float(per_u.std(ddof=1) / math.sqrt(len(per_u))) if len(per_u) > 1 else float("nan")


def haar_variance_sample(
    spec: EnsembleSpec, case: int, n_states: int, n_unitaries: int, seed: int
) -> HaarVarianceSample:
    """Monte Carlo over Haar states and ensemble unitaries with shots averaged exactly.

    Case 1 uses rho = sigma = |psi> for ``n_states`` states, case 2 uses
    ``n_states`` independent pairs. Every unitary acts on the whole batch.
    """
    if case not in (1, 2):
        raise ConfigError("case must be 1 or 2")
    n = spec.n
    fn = ClassicalFn.for_ensemble(spec)
    root = np.random.SeedSequence(seed)
    state_seq, unitary_seq = root.spawn(2)
    count = n_states * case
    seeds = np.random.default_rng(state_seq).integers(0, 2**63 - 1, size=count)
    psi = np.stack([make_haar_random(n, int(s)).amplitudes for s in seeds], axis=1)
    if case == 1:
        overlap = np.ones(n_states)
    else:
        overlap = np.abs(np.einsum("ij,ij->j", psi[:, 0::2].conj(), psi[:, 1::2])) ** 2
    urng = np.random.default_rng(unitary_seq)
    shape = (n_unitaries, n_states)
    ef2, s, mu = np.empty(shape), np.empty(shape), np.empty(shape)
    for u in range(n_unitaries):
        circuit = sample_unitary(spec, urng)
        probs = np.abs(apply_circuit_vector(psi, circuit)) ** 2
        p, q = (probs, probs) if case == 1 else (probs[:, 0::2], probs[:, 1::2])
        ef2[u], s[u], mu[u] = conditional_moments(p, q, fn)
    return HaarVarianceSample(ef2, s, mu, overlap)


def variance_monte_carlo(pair: StatePair, spec: EnsembleSpec, n_unitaries: int, seed: int) -> HaarVarianceSample:
    """Conditional-moment Monte Carlo for one fixed pair of dense states."""
    n = pair.n
    if n > PAULI_SUM_CAP + 4:
        raise ResourceCapError(f"dense Monte Carlo for n = {n} exceeds the cap of {PAULI_SUM_CAP + 4}")
    fn = ClassicalFn.for_ensemble(spec)
    psi = np.stack([to_statevector(pair.rho).amplitudes, to_statevector(pair.sigma).amplitudes], axis=1)
    rng = np.random.default_rng(seed)
    shape = (n_unitaries, 1)
    ef2, s, mu = np.empty(shape), np.empty(shape), np.empty(shape)
    for u in range(n_unitaries):
        probs = np.abs(apply_circuit_vector(psi, sample_unitary(spec, rng))) ** 2
        ef2[u], s[u], mu[u] = conditional_moments(probs[:, :1], probs[:, 1:], fn)
    return HaarVarianceSample(ef2, s, mu, np.array([inner_product(pair)]))


def fit_log_base(ns, values) -> float:
    """Base b of the least-squares fit log(value) = n log(b) + c."""
    ns = np.asarray(ns, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(ns) < 2 or np.any(vals <= 0):
        raise ValueError("need at least two positive values")
    slope = np.polyfit(ns, np.log(vals), 1)[0]
    return float(math.exp(slope))


__all__ = [
    "AvgVarianceInputs",
    "HaarVarianceSample",
    "NonstabReport",
    "VarianceBreakdown",
    "avg_variance_case1",
    "avg_variance_case2",
    "breakdown_from_moments",
    "brickwork_v2_exact",
    "conditional_moments",
    "fit_log_base",
    "global_clifford_breakdown",
    "global_clifford_fourth_moment",
    "global_clifford_variance_bound",
    "haar_variance_sample",
    "leading_v2_base",
    "local_clifford_breakdown",
    "local_clifford_v2",
    "local_clifford_v4",
    "local_product_reference",
    "m2_sre",
    "nonstab_report",
    "pauli_spectrum",
    "stabilizer_group",
    "variance_monte_carlo",
    "xi_block_classes",
    "xi_dense",
    "xi_norm_sq",
    "xi_sparse",
    "xi_tilde_dot_xi",
    "xi_theta",
]
