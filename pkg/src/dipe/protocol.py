"""Randomized-measurement rounds, the collision statistic and the mean estimator."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._wht import wht
from .classical import ClassicalFn, FnKind
from .ensembles import EnsembleSpec, sample_unitary
from .errors import ConfigError
from .states import (
    BornDistribution,
    StatePair,
    StatevectorState,
    apply_circuit_vector,
    evolve_for_measurement,
    sample_measurements,
)

_INT64_BUDGET = 1 << 62


def _total_direct(a, b, fn: ClassicalFn) -> int:
    return sum(fn.value_int(int(x) ^ int(y)) for x in a for y in b)


def _total_pairs(a, b, fn: ClassicalFn) -> int:
    ua, ca = np.unique(np.asarray(a), return_counts=True)
    ub, cb = np.unique(np.asarray(b), return_counts=True)
    if not fn.exact_int64 or ua.dtype == object:
        vals = fn.values(np.bitwise_xor.outer(ua.astype(object), ub.astype(object)))
        weights = np.multiply.outer(ca.astype(object), cb.astype(object))
        return int((vals * weights).sum())
    vals = fn.values(np.bitwise_xor.outer(ua, ub))
    return int((vals * np.multiply.outer(ca, cb)).sum())


def _total_wht(a, b, fn: ClassicalFn) -> int:
    size = 1 << fn.n
    ca = np.bincount(np.asarray(a, dtype=np.int64), minlength=size)
    cb = np.bincount(np.asarray(b, dtype=np.int64), minlength=size)
    conv = wht(wht(ca) * wht(cb)) >> fn.n  # counts of a ^ b
    return int((fn.table() * conv).sum())


def _total_global(a, b, fn: ClassicalFn) -> int:
    ua, ca = np.unique(np.asarray(a), return_counts=True)
    ub, cb = np.unique(np.asarray(b), return_counts=True)
    _, ia, ib = np.intersect1d(ua, ub, assume_unique=True, return_indices=True)
    coll = int(sum(int(x) * int(y) for x, y in zip(ca[ia], cb[ib])))
    m2 = len(a) * len(b)
    return ((1 << fn.n) + 1) * coll - m2


def collision_total(a, b, fn: ClassicalFn, method: str = "auto") -> int:
    """Exact integer sum_{i,j} f(a_i, b_j)."""
    if method == "direct":
        return _total_direct(a, b, fn)
    if method == "pairs":
        return _total_pairs(a, b, fn)
    if method == "wht":
        return _total_wht(a, b, fn)
    if method == "global":
        if fn.kind is not FnKind.GLOBAL:
            raise ValueError("collision counting applies to the global function only")
        return _total_global(a, b, fn)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if fn.kind is FnKind.GLOBAL:
        return _total_global(a, b, fn)
    m2 = len(a) * len(b)
    fits = fn.exact_int64 and (m2 << fn.n) < _INT64_BUDGET
    # three transforms of length 2^n against an m x m outer product
    if fits and fn.n <= 20 and 3 * fn.n << fn.n <= m2:
        return _total_wht(a, b, fn)
    return _total_pairs(a, b, fn)


def collision_statistic(a, b, fn: ClassicalFn, method: str = "auto") -> float:
    """X_m = (1/m^2) sum_{i,j} f(a_i, b_j) for integer-encoded outcomes."""
    if len(a) == 0 or len(a) != len(b):
        raise ValueError("A and B must be non-empty and of equal size")
    return collision_total(a, b, fn, method) / (len(a) * len(b))


@dataclass(frozen=True, eq=False)
class RoundOutcome:
    unitary_seed: int
    a_samples: np.ndarray
    b_samples: np.ndarray
    x_m: float


def _evolve(pair: StatePair, circuit):
    rho, sigma = pair.rho, pair.sigma
    if sigma is rho:
        out = evolve_for_measurement(rho, circuit)
        return out, out
    dense = isinstance(rho, StatevectorState) and isinstance(sigma, StatevectorState)
    if dense and circuit.has_gates:
        both = np.abs(apply_circuit_vector(np.stack([rho.amplitudes, sigma.amplitudes], axis=1), circuit)) ** 2
        return BornDistribution(rho.n, both[:, 0] / both[:, 0].sum()), BornDistribution(rho.n, both[:, 1] / both[:, 1].sum())
    return evolve_for_measurement(rho, circuit), evolve_for_measurement(sigma, circuit)


def run_round(
    spec: EnsembleSpec,
    pair: StatePair,
    m: int,
    rng: np.random.Generator,
    fn: ClassicalFn | None = None,
) -> RoundOutcome:
    """One round: shared random U, m shots on each side, collision statistic."""
    if spec.n != pair.n:
        raise ConfigError(f"ensemble is on {spec.n} qubits but the states have {pair.n}")
    if m < 1:
        raise ConfigError("m must be at least 1")
    fn = fn or ClassicalFn.for_ensemble(spec)
    unitary_seed = int(rng.integers(0, 2**63 - 1))
    circuit = sample_unitary(spec, np.random.default_rng(unitary_seed))
    rho_u, sigma_u = _evolve(pair, circuit)
    a = sample_measurements(rho_u, m, rng)
    b = sample_measurements(sigma_u, m, rng)
    return RoundOutcome(unitary_seed, a, b, collision_statistic(a, b, fn))


def round_rng(master_seed: int, round_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(round_index,)))


def _run_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    spec, pair, m, master_seed, start, stop = args
    fn = ClassicalFn.for_ensemble(spec)
    xs = np.empty(stop - start)
    seeds = np.empty(stop - start, dtype=np.int64)
    for j, i in enumerate(range(start, stop)):
        out = run_round(spec, pair, m, round_rng(master_seed, i), fn)
        xs[j] = out.x_m
        seeds[j] = out.unitary_seed
    return xs, seeds


@dataclass(frozen=True, eq=False)
class EstimateReport:
    omega_hat: float
    empirical_variance: float
    stderr: float
    N: int
    m: int
    ensemble: EnsembleSpec
    x_values: np.ndarray = field(repr=False)
    unitary_seeds: np.ndarray = field(repr=False)


def summarize(x: np.ndarray) -> tuple[float, float, float]:
    """Mean, unbiased variance and standard error of the mean."""
    x = np.asarray(x, dtype=float)
    mean = float(x.mean())
    var = float(x.var(ddof=1)) if len(x) > 1 else float("nan")
    return mean, var, math.sqrt(var / len(x)) if len(x) > 1 else float("nan")


def variance_stderr(x: np.ndarray) -> float:
    """Jackknife standard error of the unbiased sample variance."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 3:
        return float("nan")
    dev2 = (x - x.mean()) ** 2
    s2 = dev2.sum() / (n - 1)
    loo = ((n - 1) * s2 - n / (n - 1) * dev2) / (n - 2)
    return float(math.sqrt((n - 1) / n * ((loo - loo.mean()) ** 2).sum()))


def run_protocol(
    spec: EnsembleSpec,
    pair: StatePair,
    N: int,
    m: int,
    master_seed: int,
    workers: int = 1,
) -> EstimateReport:
    """N independent rounds; round i draws from SeedSequence(master_seed, spawn_key=(i,))."""
    if N < 1 or m < 1:
        raise ConfigError("N and m must be at least 1")
    if spec.n != pair.n:
        raise ConfigError(f"ensemble is on {spec.n} qubits but the states have {pair.n}")
    if workers <= 1 or N < 2 * workers:
        xs, seeds = _run_chunk((spec, pair, m, master_seed, 0, N))
    else:
        bounds = np.linspace(0, N, 4 * workers + 1).astype(int)
        jobs = [(spec, pair, m, master_seed, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
        xs = np.concatenate([p[0] for p in parts])
        seeds = np.concatenate([p[1] for p in parts])
    mean, var, se = summarize(xs)
    return EstimateReport(mean, var, se, N, m, spec, xs, seeds)


def plan_rounds(variance_estimate: float, epsilon: float, delta: float) -> int:
    """Rounds sufficient for |omega_hat - tr| <= epsilon w.p. 1 - delta (Chebyshev)."""
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ConfigError("epsilon and delta must lie in (0, 1)")
    if variance_estimate < 0:
        raise ConfigError("variance must be non-negative")
    exact = Fraction(repr(float(variance_estimate))) / (Fraction(repr(float(delta))) * Fraction(repr(float(epsilon))) ** 2)
    return math.ceil(exact)
