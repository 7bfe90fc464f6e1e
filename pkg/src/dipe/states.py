"""Pure states on two backends: dense statevectors and stabilizer generators.

Statevector amplitudes are indexed big-endian (qubit 1 is the most
significant bit), which is also the integer encoding of measurement
outcomes returned by :func:`sample_measurements`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cache, cached_property

import numpy as np

from . import _gf2
from ._wht import wht
from .clifford import CliffordCircuit, Gate, apply_gates_rows, ordered_products
from .errors import ConfigError, ResourceCapError
from .pauli import (
    PauliString,
    bit_matrix_to_ints,
    bits_to_int,
    int_to_bits,
    ints_to_bit_matrix,
    popcount,
    product_phase,
)

STATEVECTOR_CAP = 24
SPECTRUM_CAP = 10


def _check_cap(n: int, cap: int | None) -> None:
    limit = STATEVECTOR_CAP if cap is None else cap
    if n > limit:
        raise ResourceCapError(f"{n} qubits exceeds the statevector cap of {limit}")


class QuantumState:
    """Common interface of the two backends."""

    n: int

    @property
    def backend(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class StatevectorState(QuantumState):
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.n:
            raise ValueError("amplitude count does not match n")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def backend(self) -> str:
        return "statevector"

    @cached_property
    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        return p / p.sum()

    @cached_property
    def _cdf(self) -> np.ndarray:
        return _cdf(self.probabilities)

    @cached_property
    def pauli_spectrum(self) -> np.ndarray:
        """E[x, z] = <psi| sigma(x, z) |psi> for all 4^n Paulis (integer masks)."""
        _check_cap(self.n, SPECTRUM_CAP)
        return pauli_spectrum_vector(self.amplitudes)


def _cdf(p: np.ndarray) -> np.ndarray:
    c = np.cumsum(p)
    c[-1] = 1.0
    return c


@dataclass(frozen=True, eq=False)
class BornDistribution:
    """Computational-basis outcome distribution of an evolved dense state."""

    n: int
    probabilities: np.ndarray

    @cached_property
    def _cdf(self) -> np.ndarray:
        return _cdf(self.probabilities)


@dataclass(frozen=True, eq=False)
class StabilizerState(QuantumState):
    """Stabilizer state given by n commuting, independent, Hermitian generators."""

    n: int
    x: np.ndarray
    z: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=np.uint8) & 1
        z = np.array(self.z, dtype=np.uint8) & 1
        ph = np.array(self.phases, dtype=np.int64) % 4
        if x.shape != (self.n, self.n) or z.shape != (self.n, self.n) or ph.shape != (self.n,):
            raise ValueError("generator arrays do not match n")
        if np.any(ph % 2):
            raise ValueError("generator phases must be +1 or -1")
        for a in (x, z, ph):
            a.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phases", ph)

    @property
    def backend(self) -> str:
        return "stabilizer"

    @classmethod
    def from_labels(cls, labels: list[str]) -> "StabilizerState":
        from .pauli import SignedPauli

        ps = [SignedPauli.from_label(s) for s in labels]
        n = ps[0].n
        state = cls(
            n,
            np.array([p.pauli.x_bits for p in ps]),
            np.array([p.pauli.z_bits for p in ps]),
            np.array([p.phase for p in ps]),
        )
        state.validate()
        return state

    def validate(self) -> None:
        sx = self.x.astype(np.int64)
        sz = self.z.astype(np.int64)
        comm = (sx @ sz.T + sz @ sx.T) % 2
        if comm.any():
            raise ValueError("stabilizer generators do not commute")
        if _gf2.rank(np.hstack([self.x, self.z])) != self.n:
            raise ValueError("stabilizer generators are not independent")

    @cached_property
    def _support_ints(self) -> tuple[int, np.ndarray]:
        """Measurement support as integers: offset b0 and a basis of directions.

        Gaussian elimination on the X parts leaves r generators with
        independent X parts (the directions) and n - r diagonal generators
        whose signs fix the offset.
        """
        n = self.n
        xs = [bits_to_int(row) for row in self.x]
        zs = [bits_to_int(row) for row in self.z]
        ph = [int(v) for v in self.phases]
        r = 0
        for bit in range(n - 1, -1, -1):
            mask = 1 << bit
            p = next((i for i in range(r, n) if xs[i] & mask), None)
            if p is None:
                continue
            xs[r], xs[p] = xs[p], xs[r]
            zs[r], zs[p] = zs[p], zs[r]
            ph[r], ph[p] = ph[p], ph[r]
            for o in range(n):
                if o != r and xs[o] & mask:
                    ph[o] = (ph[o] + ph[r] + product_phase(xs[r], zs[r], xs[o], zs[o])) % 4
                    xs[o] ^= xs[r]
                    zs[o] ^= zs[r]
            r += 1
        # diagonal rows: parity(z & b) = ph / 2; reduce to echelon form and read off b0
        zrows = [[zs[i], ph[i] // 2] for i in range(r, n)]
        b0 = 0
        k = 0
        for bit in range(n - 1, -1, -1):
            mask = 1 << bit
            p = next((i for i in range(k, len(zrows)) if zrows[i][0] & mask), None)
            if p is None:
                continue
            zrows[k], zrows[p] = zrows[p], zrows[k]
            for o in range(len(zrows)):
                if o != k and zrows[o][0] & mask:
                    zrows[o][0] ^= zrows[k][0]
                    zrows[o][1] ^= zrows[k][1]
            if zrows[k][1]:
                b0 |= mask
            k += 1
        if any(row[1] for row in zrows[k:]):
            raise ValueError("inconsistent stabilizer generators")
        dtype = object if n > 63 else np.int64
        return b0, np.array(xs[:r], dtype=dtype)

    @property
    def _support(self) -> tuple[np.ndarray, np.ndarray]:
        b0, dirs = self._support_ints
        n = self.n
        return np.array(int_to_bits(b0, n), dtype=np.uint8), ints_to_bit_matrix(dirs, n).reshape(len(dirs), n)


def make_zero(n: int, backend: str = "stabilizer", cap: int | None = None) -> QuantumState:
    if n < 1:
        raise ConfigError("n must be at least 1")
    if backend == "stabilizer":
        return StabilizerState(n, np.zeros((n, n)), np.eye(n), np.zeros(n))
    _check_cap(n, cap)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StatevectorState(n, amps)


def make_plus(n: int, backend: str = "stabilizer", cap: int | None = None) -> QuantumState:
    if n < 1:
        raise ConfigError("n must be at least 1")
    if backend == "stabilizer":
        return StabilizerState(n, np.eye(n), np.zeros((n, n)), np.zeros(n))
    _check_cap(n, cap)
    return StatevectorState(n, np.full(1 << n, 2 ** (-n / 2), dtype=complex))


def make_basis_state(bits: str, backend: str = "stabilizer", cap: int | None = None) -> QuantumState:
    n = len(bits)
    ph = np.array([2 * int(b) for b in bits])
    if backend == "stabilizer":
        return StabilizerState(n, np.zeros((n, n)), np.eye(n), ph)
    _check_cap(n, cap)
    amps = np.zeros(1 << n, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StatevectorState(n, amps)


def make_ghz(n: int, backend: str = "stabilizer", cap: int | None = None) -> QuantumState:
    """(|0...0> + |1...1>)/sqrt(2)."""
    if n < 1:
        raise ConfigError("n must be at least 1")
    if backend == "stabilizer":
        x = np.zeros((n, n), dtype=np.uint8)
        z = np.zeros((n, n), dtype=np.uint8)
        x[0] = 1
        for i in range(1, n):
            z[i, i - 1] = z[i, i] = 1
        return StabilizerState(n, x, z, np.zeros(n))
    _check_cap(n, cap)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return StatevectorState(n, amps)


def make_s_state(n: int, k: int, theta: float, cap: int | None = None) -> StatevectorState:
    """|0>^{n-k} (x) [(|0> + e^{i theta}|1>)/sqrt(2)]^{k}."""
    if n < 1:
        raise ConfigError("n must be at least 1")
    if not 0 <= k <= n:
        raise ConfigError(f"k = {k} is outside [0, {n}]")
    _check_cap(n, cap)
    zero = np.array([1.0, 0.0], dtype=complex)
    s = np.array([1.0, np.exp(1j * theta)], dtype=complex) / math.sqrt(2)
    amps = np.ones(1, dtype=complex)
    for i in range(n):
        amps = np.kron(amps, zero if i < n - k else s)
    return StatevectorState(n, amps)


def make_haar_random(n: int, seed: int, cap: int | None = None) -> StatevectorState:
    """Haar-random pure state from normalized complex Gaussians."""
    if n < 1:
        raise ConfigError("n must be at least 1")
    _check_cap(n, cap)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return StatevectorState(n, v / np.linalg.norm(v))


@dataclass(frozen=True)
class StatePair:
    rho: QuantumState
    sigma: QuantumState

    def __post_init__(self):
        if self.rho.n != self.sigma.n:
            raise ValueError(f"state sizes differ: {self.rho.n} vs {self.sigma.n}")

    @property
    def n(self) -> int:
        return self.rho.n


# ---------------------------------------------------------------------------
# dense helpers


def apply_pauli_vector(psi: np.ndarray, x: int, z: int, n: int) -> np.ndarray:
    """sigma(x, z) psi for the Hermitian Pauli with masks (x, z); psi may be batched."""
    idx = np.arange(1 << n)
    signs = 1 - 2 * (popcount(idx & z) & 1)
    phase = 1j ** ((x & z).bit_count() % 4)
    out = np.empty_like(psi)
    shaped = signs.reshape((-1,) + (1,) * (psi.ndim - 1))
    out[idx ^ x] = psi * shaped
    return phase * out


def _apply_matrix(psi: np.ndarray, u: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    batch = psi.shape[1:]
    if len(targets) == 1:
        (q,) = targets
        shape = (1 << q, 2, -1)
        t = psi.reshape(shape).transpose(1, 0, 2).reshape(2, -1)
        return (u @ t).reshape(2, 1 << q, -1).transpose(1, 0, 2).reshape(psi.shape)
    q1, q2 = targets
    if q1 > q2:
        q1, q2 = q2, q1
        u = u.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    a, b = 1 << q1, 1 << (q2 - q1 - 1)
    t = psi.reshape(a, 2, b, 2, -1).transpose(1, 3, 0, 2, 4).reshape(4, -1)
    out = (u @ t).reshape(2, 2, a, b, -1).transpose(2, 0, 3, 1, 4)
    return out.reshape((1 << n,) + batch)


def apply_gate_vector(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply one gate to a (possibly batched) statevector of shape (2^n, ...)."""
    return _apply_matrix(psi, gate.matrix, gate.targets, n)


def _kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(4, 4)


def fused_blocks(circuit: CliffordCircuit) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Merge single-qubit gates into neighbouring two-qubit gates.

    Pending single-qubit unitaries are absorbed by the next two-qubit gate on
    their qubit; leftovers are paired into 4x4 Kronecker products.
    """
    pending: dict[int, np.ndarray] = {}
    blocks: list[tuple[tuple[int, ...], np.ndarray]] = []
    eye = np.eye(2, dtype=complex)
    for g in circuit.gates:
        if len(g.targets) == 1:
            q = g.targets[0]
            pending[q] = g.matrix @ pending.get(q, eye)
            continue
        q1, q2 = g.targets
        before = _kron2(pending.pop(q1, eye), pending.pop(q2, eye))
        blocks.append(((q1, q2), g.matrix @ before))
    rest = sorted(pending)
    for i in range(0, len(rest) - 1, 2):
        q1, q2 = rest[i], rest[i + 1]
        blocks.append(((q1, q2), _kron2(pending[q1], pending[q2])))
    if len(rest) % 2:
        blocks.append(((rest[-1],), pending[rest[-1]]))
    return blocks


def apply_circuit_vector(psi: np.ndarray, circuit: CliffordCircuit) -> np.ndarray:
    for targets, u in fused_blocks(circuit):
        psi = _apply_matrix(psi, u, targets, circuit.n)
    return psi


def to_statevector(state: QuantumState, cap: int | None = None) -> StatevectorState:
    if isinstance(state, StatevectorState):
        return state
    n = state.n
    _check_cap(n, cap)
    from .pauli import bits_to_int

    b0, _ = state._support
    v = np.zeros(1 << n, dtype=complex)
    v[bits_to_int(b0)] = 1.0
    for i in range(n):
        g = apply_pauli_vector(v, bits_to_int(state.x[i]), bits_to_int(state.z[i]), n)
        v = (v + (1j ** state.phases[i]) * g) / 2
    v = v / np.linalg.norm(v)
    return StatevectorState(n, v)


def pauli_cross_vector(psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """<psi| sigma(x, z) |phi> as a complex (2^n, 2^n) array indexed [x, z].

    For fixed x, v(b) = conj(psi[b ^ x]) phi[b] and a transform over b gives
    sum_b (-1)^{z.b} v(b) for every z at once.
    """
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    idx = np.arange(psi.shape[0])
    v = psi[idx[:, None] ^ idx[None, :]].conj() * phi[None, :]
    out = wht(v.T).T
    return out * (1j) ** (popcount(idx[:, None] & idx[None, :]) % 4)


def pauli_spectrum_vector(psi: np.ndarray) -> np.ndarray:
    """<psi| sigma(x, z) |psi> as a real (2^n, 2^n) array indexed [x, z]."""
    return pauli_cross_vector(psi, psi).real


@cache
def _all_bit_rows(n: int) -> np.ndarray:
    return ints_to_bit_matrix(np.arange(1 << n), n).astype(np.int64)


def born_from_spectrum(spectrum: np.ndarray, circuit: CliffordCircuit) -> np.ndarray:
    """Born probabilities of U|psi> from the Pauli spectrum of psi.

    p(b) = 2^-n sum_s (-1)^{s.b} <psi| U^dagger Z^s U |psi>; the pulled-back
    Z strings form an abelian group generated by the Z rows of the inverse
    tableau.
    """
    n = circuit.n
    inv = circuit.tableau.inverse()
    gx, gz = inv.matrix[n:, :n], inv.matrix[n:, n:]
    x, z, ph = ordered_products(_all_bit_rows(n), gx, gz, inv.phases[n:])
    t = spectrum[bit_matrix_to_ints(x), bit_matrix_to_ints(z)] * (1 - ph)
    p = np.clip(wht(t) / (1 << n), 0.0, None)
    return p / p.sum()


# ---------------------------------------------------------------------------
# public operations


def apply_clifford(state: QuantumState, circuit: CliffordCircuit) -> QuantumState:
    """U|psi> for the Clifford U given by ``circuit``."""
    if state.n != circuit.n:
        raise ValueError(f"dimension mismatch: state on {state.n} qubits, circuit on {circuit.n}")
    if isinstance(state, StatevectorState):
        return StatevectorState(state.n, apply_circuit_vector(state.amplitudes.copy(), circuit))
    if circuit.has_tableau:
        x, z, ph = circuit.tableau.conjugate_rows(state.x, state.z, state.phases)
    else:
        x, z, ph = state.x.copy(), state.z.copy(), state.phases.copy()
        apply_gates_rows(x, z, ph, circuit.gates)
    return StabilizerState(state.n, x, z, ph)


def evolve_for_measurement(state: QuantumState, circuit: CliffordCircuit):
    """U|psi> in the cheapest form that still supports exact sampling.

    Stabilizer states stay stabilizer states. Dense states become a
    :class:`BornDistribution`; when U is known only as a tableau and n is
    small, the distribution comes from the Pauli spectrum, skipping synthesis.
    """
    if isinstance(state, StabilizerState):
        return apply_clifford(state, circuit)
    if not circuit.has_gates and state.n <= SPECTRUM_CAP:
        return BornDistribution(state.n, born_from_spectrum(state.pauli_spectrum, circuit))
    return BornDistribution(state.n, apply_clifford(state, circuit).probabilities)


def sample_measurements(state: QuantumState, m: int, rng: np.random.Generator) -> np.ndarray:
    """m computational-basis outcomes, integer-encoded (qubit 1 = most significant bit)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if isinstance(state, (StatevectorState, BornDistribution)):
        return np.searchsorted(state._cdf, rng.random(m), side="right").astype(np.int64)
    b0, dirs = state._support_ints
    coeffs = rng.integers(0, 2, size=(m, len(dirs)), dtype=np.uint8)
    if dirs.dtype == object:
        out = np.full(m, b0, dtype=object)
        for k, d in enumerate(dirs):
            out[coeffs[:, k] == 1] ^= d
        return out
    return np.bitwise_xor.reduce(np.where(coeffs == 1, dirs[None, :], 0), axis=1, initial=b0)


def outcome_distribution(state: QuantumState, cap: int | None = None) -> np.ndarray:
    """Exact Born probabilities over all 2^n outcomes."""
    if isinstance(state, (StatevectorState, BornDistribution)):
        return np.array(state.probabilities, copy=True)
    _check_cap(state.n, cap)
    b0, dirs = state._support
    r = dirs.shape[0]
    combos = ((np.arange(1 << r)[:, None] >> np.arange(r - 1, -1, -1)) & 1).astype(np.int64)
    support = bit_matrix_to_ints(((b0[None, :] + combos @ dirs) % 2).astype(np.uint8))
    p = np.zeros(1 << state.n)
    p[support] = 2.0**-r
    return p


def _product_of_rows(x, z, ph, select) -> tuple[np.ndarray, np.ndarray, int]:
    ax, az, k = ordered_products(np.asarray(select, dtype=np.int64)[None, :], x, z, ph)
    return ax[0], az[0], int(k[0])


def pauli_expectation(state: QuantumState, p: PauliString) -> float:
    """tr[P rho] for a Hermitian Pauli string."""
    if state.n != p.n:
        raise ValueError(f"dimension mismatch: state on {state.n} qubits, Pauli on {p.n}")
    if isinstance(state, StatevectorState):
        psi = state.amplitudes
        return float(np.vdot(psi, apply_pauli_vector(psi, p.x, p.z, p.n)).real)
    px, pz = p.x_bits, p.z_bits
    anti = (state.x.astype(np.int64) @ pz + state.z.astype(np.int64) @ px) % 2
    if anti.any():
        return 0.0
    gens = np.hstack([state.x, state.z]).T
    coeffs = _gf2.solve(gens, np.concatenate([px, pz]))
    _, _, k = _product_of_rows(state.x, state.z, state.phases, coeffs)
    return 1.0 if k == 0 else -1.0


def inner_product(pair: StatePair) -> float:
    """tr[rho sigma] = |<psi|phi>|^2."""
    a, b = pair.rho, pair.sigma
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    if isinstance(a, StabilizerState) and isinstance(b, StabilizerState):
        return _stabilizer_overlap(a, b)
    va = to_statevector(a).amplitudes
    vb = to_statevector(b).amplitudes
    return float(abs(np.vdot(va, vb)) ** 2)


def _stabilizer_overlap(a: StabilizerState, b: StabilizerState) -> float:
    # Common unsigned subgroup A; overlap is 2^{dim A - n} if signs agree on A, else 0.
    n = a.n
    stacked = np.vstack([np.hstack([a.x, a.z]), np.hstack([b.x, b.z])])
    combos = _gf2.nullspace(stacked.T)
    for c in combos:
        _, _, ka = _product_of_rows(a.x, a.z, a.phases, c[:n])
        _, _, kb = _product_of_rows(b.x, b.z, b.phases, c[n:])
        if ka != kb:
            return 0.0
    return 2.0 ** (len(combos) - n)


# ---------------------------------------------------------------------------
# CLI grammar


def parse_state(text: str, cap: int | None = None) -> QuantumState:
    """``ghz:n``, ``plus:n``, ``zero:n``, ``sstate:n:k:theta`` or ``haar:n:seed``."""
    parts = text.strip().split(":")
    kind = parts[0].lower()
    try:
        if kind in ("ghz", "plus", "zero") and len(parts) == 2:
            n = int(parts[1])
            return {"ghz": make_ghz, "plus": make_plus, "zero": make_zero}[kind](n)
        if kind == "sstate" and len(parts) == 4:
            return make_s_state(int(parts[1]), int(parts[2]), float(parts[3]), cap=cap)
        if kind == "haar" and len(parts) == 3:
            return make_haar_random(int(parts[1]), int(parts[2]), cap=cap)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad state spec {text!r}: {exc}") from exc
    raise ConfigError(f"bad state spec {text!r}; expected ghz:n, plus:n, zero:n, sstate:n:k:theta or haar:n:seed")
