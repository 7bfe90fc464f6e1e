"""Clifford gates, circuits and tableaus.

A tableau stores the images U X_j U^dagger and U Z_j U^dagger of the 2n
generators as rows ``[x | z]`` of a binary matrix, with a quarter-phase
exponent per row. Rows of Pauli operators are handled as ``(x, z, phase)``
arrays of shape ``(R, n)``, ``(R, n)``, ``(R,)``.

Gate targets are 0-based (qubit 1 is index 0). Every named gate, and each
element of the enumerated groups Cl_1 (24 elements) and Cl_2 (11520
elements), carries a lookup table mapping a local Pauli code to its image.
Local codes are 0=I, 1=X, 2=Z, 3=Y, and ``4 * first + second`` on two qubits.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cache, cached_property

import numpy as np

from .pauli import PAULI_MATRICES, PauliString, SignedPauli, bits_to_int, int_to_bits

_CODE_LABEL = "IXZY"
_ONE_QUBIT = ("H", "S", "SDG", "X", "Y", "Z", "C1")
_TWO_QUBIT = ("CX", "CZ", "SWAP", "C2")

_BASE_MATRICES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
    "X": PAULI_MATRICES["X"],
    "Y": PAULI_MATRICES["Y"],
    "Z": PAULI_MATRICES["Z"],
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def _local_paulis(k: int) -> np.ndarray:
    singles = [PAULI_MATRICES[c] for c in _CODE_LABEL]
    if k == 1:
        return np.array(singles)
    return np.array([np.kron(a, b) for a in singles for b in singles])


_LOCAL_PAULIS = {1: _local_paulis(1), 2: _local_paulis(2)}


def lut_from_matrix(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Conjugation lookup table (image code, phase exponent) of a 1- or 2-qubit unitary."""
    k = 1 if u.shape[0] == 2 else 2
    paulis = _LOCAL_PAULIS[k]
    images = u @ paulis @ u.conj().T
    coeffs = np.einsum("cij,dji->dc", paulis, images) / u.shape[0]
    codes = np.argmax(np.abs(coeffs), axis=1)
    values = coeffs[np.arange(len(codes)), codes]
    if not np.allclose(np.abs(values), 1.0, atol=1e-9):
        raise ValueError("matrix is not a Clifford unitary")
    phases = np.where(values.real > 0, 0, 2)
    if not np.allclose(values, np.where(phases == 0, 1.0, -1.0), atol=1e-9):
        raise ValueError("matrix is not a Clifford unitary")
    return codes.astype(np.uint8), phases.astype(np.uint8)


def _lut_key(codes: np.ndarray, phases: np.ndarray) -> bytes:
    return codes.astype(np.uint8).tobytes() + phases.astype(np.uint8).tobytes()


@dataclass(frozen=True)
class CliffordGroupTable:
    """All elements of Cl_k (modulo global phase) with dense matrices and lookup tables."""

    k: int
    matrices: np.ndarray
    codes: np.ndarray
    phases: np.ndarray
    index_of: dict = field(repr=False)

    def __len__(self) -> int:
        return len(self.codes)

    def find(self, codes: np.ndarray, phases: np.ndarray) -> int:
        return self.index_of[_lut_key(codes, phases)]

    @cached_property
    def inverse_index(self) -> np.ndarray:
        return np.array([self.find(*lut_from_matrix(u.conj().T)) for u in self.matrices])


def _enumerate_group(k: int, generators: list[np.ndarray]) -> CliffordGroupTable:
    dim = 1 << k
    gen_luts = [lut_from_matrix(g) for g in generators]
    start_codes = np.arange(4**k, dtype=np.uint8)
    start_phases = np.zeros(4**k, dtype=np.uint8)
    matrices = [np.eye(dim, dtype=complex)]
    codes = [start_codes]
    phases = [start_phases]
    index_of = {_lut_key(start_codes, start_phases): 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for g, (gc, gp) in zip(generators, gen_luts):
            c = gc[codes[i]]
            p = (phases[i] + gp[codes[i]]) % 4
            key = _lut_key(c, p)
            if key in index_of:
                continue
            index_of[key] = len(codes)
            matrices.append(g @ matrices[i])
            codes.append(c)
            phases.append(p)
            queue.append(len(codes) - 1)
    return CliffordGroupTable(k, np.array(matrices), np.array(codes), np.array(phases), index_of)


@cache
def cl1_table() -> CliffordGroupTable:
    """The 24 single-qubit Cliffords; index 0 is the identity."""
    return _enumerate_group(1, [_BASE_MATRICES["H"], _BASE_MATRICES["S"]])


@cache
def cl2_table() -> CliffordGroupTable:
    """The 11520 two-qubit Cliffords; index 0 is the identity."""
    h, s, i2 = _BASE_MATRICES["H"], _BASE_MATRICES["S"], np.eye(2)
    gens = [np.kron(h, i2), np.kron(i2, h), np.kron(s, i2), np.kron(i2, s), _BASE_MATRICES["CX"]]
    return _enumerate_group(2, gens)


@cache
def _named_lut(name: str) -> tuple[np.ndarray, np.ndarray]:
    return lut_from_matrix(_BASE_MATRICES[name])


@dataclass(frozen=True)
class Gate:
    """A named Clifford gate on 0-based target qubits; ``index`` selects a C1/C2 element."""

    name: str
    targets: tuple[int, ...]
    index: int | None = None

    def __post_init__(self):
        name = self.name.upper()
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if name in _ONE_QUBIT:
            arity = 1
        elif name in _TWO_QUBIT:
            arity = 2
        else:
            raise ValueError(f"unknown gate {self.name!r}")
        if len(self.targets) != arity:
            raise ValueError(f"{name} acts on {arity} qubit(s), got targets {self.targets}")
        if arity == 2 and self.targets[0] == self.targets[1]:
            raise ValueError(f"{name} needs distinct targets")
        if name in ("C1", "C2"):
            size = 24 if name == "C1" else 11520
            if self.index is None or not 0 <= self.index < size:
                raise ValueError(f"{name} needs an index in [0, {size})")

    @property
    def matrix(self) -> np.ndarray:
        if self.name == "C1":
            return cl1_table().matrices[self.index]
        if self.name == "C2":
            return cl2_table().matrices[self.index]
        return _BASE_MATRICES[self.name]

    @property
    def lut(self) -> tuple[np.ndarray, np.ndarray]:
        if self.name == "C1":
            t = cl1_table()
            return t.codes[self.index], t.phases[self.index]
        if self.name == "C2":
            t = cl2_table()
            return t.codes[self.index], t.phases[self.index]
        return _named_lut(self.name)

    def inverse(self) -> "Gate":
        if self.name == "S":
            return Gate("SDG", self.targets)
        if self.name == "SDG":
            return Gate("S", self.targets)
        if self.name == "C1":
            return Gate("C1", self.targets, int(cl1_table().inverse_index[self.index]))
        if self.name == "C2":
            return Gate("C2", self.targets, int(cl2_table().inverse_index[self.index]))
        return self

    def __str__(self) -> str:
        idx = f"[{self.index}]" if self.index is not None else ""
        return f"{self.name}{idx}({','.join(str(t + 1) for t in self.targets)})"


def apply_gate_rows(x: np.ndarray, z: np.ndarray, ph: np.ndarray, gate: Gate) -> None:
    """Conjugate every Pauli row by ``gate`` in place."""
    codes, dph = gate.lut
    if len(gate.targets) == 1:
        q = gate.targets[0]
        c = x[:, q] + 2 * z[:, q]
        nc = codes[c]
        ph += dph[c]
        x[:, q] = nc & 1
        z[:, q] = nc >> 1
    else:
        q1, q2 = gate.targets
        c = 4 * (x[:, q1] + 2 * z[:, q1]) + x[:, q2] + 2 * z[:, q2]
        nc = codes[c]
        ph += dph[c]
        hi, lo = nc >> 2, nc & 3
        x[:, q1], z[:, q1] = hi & 1, hi >> 1
        x[:, q2], z[:, q2] = lo & 1, lo >> 1
    ph %= 4


def row_product_phase(x1, z1, x2, z2) -> np.ndarray:
    """Per-row exponent k with sigma(row1) sigma(row2) = i^k sigma(row1 ^ row2), bit-array form."""
    X1, Y1, Z1 = x1 & (1 - z1), x1 & z1, z1 & (1 - x1)
    X2, Y2, Z2 = x2 & (1 - z2), x2 & z2, z2 & (1 - x2)
    plus = (X1 & Y2) + (Y1 & Z2) + (Z1 & X2)
    minus = (Y1 & X2) + (Z1 & Y2) + (X1 & Z2)
    return (plus.astype(np.int64) - minus).sum(axis=-1) % 4


def ordered_products(coeffs: np.ndarray, gx: np.ndarray, gz: np.ndarray, gph: np.ndarray):
    """Ordered products prod_{k : c_k = 1} g_k for every coefficient row c.

    Each generator g_k = i^{gph_k} sigma(gx_k, gz_k) is rewritten as
    i^{gph_k + |gx_k & gz_k|} X^{gx_k} Z^{gz_k}; moving all X factors left
    costs (-1)^{sum_{k<l} c_k c_l (gz_k . gx_l)}, a quadratic form in c.
    Returns (x, z, phase) with phase in the sigma convention.
    """
    c = np.asarray(coeffs, dtype=np.int64)
    gx = np.asarray(gx, dtype=np.int64)
    gz = np.asarray(gz, dtype=np.int64)
    upper = np.triu(gz @ gx.T, k=1) % 2
    quad = ((c @ upper) * c).sum(axis=1) % 2
    x = (c @ gx) % 2
    z = (c @ gz) % 2
    base = (np.asarray(gph, dtype=np.int64) + (gx & gz).sum(axis=1)) % 4
    ph = (c @ base + 2 * quad - (x & z).sum(axis=1)) % 4
    return x.astype(np.uint8), z.astype(np.uint8), ph


def apply_gates_rows(x: np.ndarray, z: np.ndarray, ph: np.ndarray, gates) -> None:
    """Conjugate Pauli rows by a gate sequence, batching runs of disjoint C1 or C2 gates."""
    i = 0
    gates = list(gates)
    while i < len(gates):
        g = gates[i]
        if g.name not in ("C1", "C2"):
            apply_gate_rows(x, z, ph, g)
            i += 1
            continue
        used = set(g.targets)
        j = i + 1
        while j < len(gates) and gates[j].name == g.name and not used & set(gates[j].targets):
            used.update(gates[j].targets)
            j += 1
        _apply_group_rows(x, z, ph, gates[i:j])
        i = j


def _apply_group_rows(x, z, ph, group) -> None:
    table = cl1_table() if group[0].name == "C1" else cl2_table()
    idx = np.array([g.index for g in group])
    if group[0].name == "C1":
        qs = np.array([g.targets[0] for g in group])
        c = x[:, qs] + 2 * z[:, qs]
        nc = table.codes[idx[None, :], c]
        ph += table.phases[idx[None, :], c].sum(axis=1, dtype=np.int64)
        x[:, qs] = nc & 1
        z[:, qs] = nc >> 1
    else:
        q1 = np.array([g.targets[0] for g in group])
        q2 = np.array([g.targets[1] for g in group])
        c = 4 * (x[:, q1] + 2 * z[:, q1]) + x[:, q2] + 2 * z[:, q2]
        nc = table.codes[idx[None, :], c]
        ph += table.phases[idx[None, :], c].sum(axis=1, dtype=np.int64)
        hi, lo = nc >> 2, nc & 3
        x[:, q1], z[:, q1] = hi & 1, hi >> 1
        x[:, q2], z[:, q2] = lo & 1, lo >> 1
    ph %= 4


@dataclass(frozen=True, eq=False)
class CliffordTableau:
    """Symplectic tableau of an n-qubit Clifford with quarter-phase row exponents."""

    n: int
    matrix: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.uint8) & 1
        p = np.asarray(self.phases, dtype=np.int64) % 4
        if m.shape != (2 * self.n, 2 * self.n) or p.shape != (2 * self.n,):
            raise ValueError("tableau shape does not match n")
        m.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "phases", p)

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        return cls(n, np.eye(2 * n, dtype=np.uint8), np.zeros(2 * n, dtype=np.int64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.matrix, other.matrix)
            and np.array_equal(self.phases, other.phases)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.matrix.tobytes(), self.phases.tobytes()))

    def rows(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Mutable copies of the generator images as (x, z, phase)."""
        n = self.n
        return self.matrix[:, :n].copy(), self.matrix[:, n:].copy(), self.phases.copy()

    def image(self, row: int) -> SignedPauli:
        n = self.n
        p = PauliString.from_bits(self.matrix[row, :n], self.matrix[row, n:])
        return SignedPauli(p, int(self.phases[row]))

    def is_symplectic(self) -> bool:
        return is_symplectic(self.matrix)

    def conjugate_rows(self, px: np.ndarray, pz: np.ndarray, pph: np.ndarray):
        """Images of R Paulis given as bit rows; returns new (x, z, phase) arrays."""
        n = self.n
        px = np.asarray(px, dtype=np.int64)
        pz = np.asarray(pz, dtype=np.int64)
        if px.shape[-1] != n:
            raise ValueError("dimension mismatch")
        # sigma(x, z) = i^{|x & z|} X^x Z^z, and X^x Z^z is the ordered product of
        # the X-generators then the Z-generators selected by (x, z)
        coeffs = np.hstack([px, pz])
        x, z, ph = ordered_products(coeffs, self.matrix[:, :n], self.matrix[:, n:], self.phases)
        ph = (ph + np.asarray(pph, dtype=np.int64) + (px & pz).sum(axis=1)) % 4
        return x, z, ph

    def inverse(self) -> "CliffordTableau":
        n = self.n
        omega = np.zeros((2 * n, 2 * n), dtype=np.int64)
        omega[:n, n:] = np.eye(n, dtype=np.int64)
        omega[n:, :n] = np.eye(n, dtype=np.int64)
        inv = (omega @ self.matrix.T.astype(np.int64) @ omega) % 2
        _, _, ph = self.conjugate_rows(inv[:, :n], inv[:, n:], np.zeros(2 * n, dtype=np.int64))
        return CliffordTableau(n, inv, (-ph) % 4)

    def then(self, gates) -> "CliffordTableau":
        """Tableau of this Clifford followed by ``gates``."""
        x, z, ph = self.rows()
        ph = ph.astype(np.int64)
        apply_gates_rows(x, z, ph, gates)
        return CliffordTableau(self.n, np.hstack([x, z]), ph)


def is_symplectic(matrix: np.ndarray) -> bool:
    m = np.asarray(matrix, dtype=np.int64)
    n = m.shape[0] // 2
    omega = np.zeros((2 * n, 2 * n), dtype=np.int64)
    omega[:n, n:] = np.eye(n, dtype=np.int64)
    omega[n:, :n] = np.eye(n, dtype=np.int64)
    return bool(np.array_equal((m @ omega @ m.T) % 2, omega))


class CliffordCircuit:
    """An ordered gate list on n qubits (first gate acts first).

    A circuit may instead be built from a tableau with :meth:`from_tableau`;
    its gate list is then synthesized only when first requested, so
    tableau-only consumers (the stabilizer backend) skip synthesis.
    """

    __slots__ = ("n", "_gates", "_tableau")

    def __init__(self, n: int, gates=()):
        if n < 1:
            raise ValueError("n must be positive")
        gates = tuple(gates)
        for g in gates:
            if any(not 0 <= t < n for t in g.targets):
                raise ValueError(f"gate {g} targets a qubit outside 1..{n}")
        self.n = n
        self._gates = gates
        self._tableau = None

    @classmethod
    def from_tableau(cls, tableau: CliffordTableau) -> "CliffordCircuit":
        c = cls(tableau.n)
        c._gates = None
        c._tableau = tableau
        return c

    @property
    def gates(self) -> tuple[Gate, ...]:
        if self._gates is None:
            self._gates = synthesize(self._tableau).gates
        return self._gates

    @property
    def tableau(self) -> CliffordTableau:
        if self._tableau is None:
            self._tableau = tableau_from_circuit(self)
        return self._tableau

    @property
    def has_tableau(self) -> bool:
        return self._tableau is not None

    @property
    def has_gates(self) -> bool:
        return self._gates is not None

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordCircuit):
            return NotImplemented
        return self.n == other.n and self.gates == other.gates

    def __hash__(self) -> int:
        return hash((self.n, self.gates))

    def __repr__(self) -> str:
        return f"CliffordCircuit(n={self.n}, gates=[{', '.join(map(str, self.gates))}])"

    def inverse(self) -> "CliffordCircuit":
        return CliffordCircuit(self.n, tuple(g.inverse() for g in reversed(self.gates)))

    def matrix(self) -> np.ndarray:
        """Dense unitary, big-endian qubit order; small n only."""
        from .states import apply_circuit_vector

        return apply_circuit_vector(np.eye(1 << self.n, dtype=complex), self)


def gate_unitary(gate: Gate, n: int) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a single gate."""
    from .states import apply_gate_vector

    return apply_gate_vector(np.eye(1 << n, dtype=complex), gate, n)


def tableau_from_circuit(circuit: CliffordCircuit) -> CliffordTableau:
    return CliffordTableau.identity(circuit.n).then(circuit.gates)


def conjugate(tableau: CliffordTableau, p: SignedPauli) -> SignedPauli:
    """U P U^dagger with exact phase tracking."""
    if tableau.n != p.n:
        raise ValueError(f"dimension mismatch: tableau on {tableau.n} qubits, Pauli on {p.n}")
    q = p.pauli
    x, z, ph = tableau.conjugate_rows(q.x_bits[None, :], q.z_bits[None, :], np.array([p.phase]))
    return SignedPauli(PauliString(q.n, bits_to_int(x[0]), bits_to_int(z[0])), int(ph[0]))


# ---------------------------------------------------------------------------
# Uniform sampling of Cl_n


def _rand_bits(rng: np.random.Generator, nbits: int) -> int:
    if nbits <= 62:
        return int(rng.integers(0, 1 << nbits))
    nbytes = (nbits + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "little") & ((1 << nbits) - 1)


def _sp(u: int, v: int, n: int, mask: int) -> int:
    return ((((u >> n) & v) ^ (u & (v >> n))) & mask).bit_count() & 1


def _combine(vecs: list[int], coeffs: int) -> int:
    out = 0
    j = 0
    while coeffs:
        if coeffs & 1:
            out ^= vecs[j]
        coeffs >>= 1
        j += 1
    return out


def random_symplectic(n: int, rng: np.random.Generator) -> list[int]:
    """Uniformly random symplectic basis (v_1, w_1, ..., v_n, w_n) of Z_2^{2n}.

    Vectors are ints ``(x << n) | z``. Each v_i is uniform over the nonzero
    vectors of the complement C of the earlier pairs and w_i is uniform over
    C subject to <v_i, w_i> = 1, so every symplectic matrix has probability
    1/|Sp(2n)|.

    C is tracked through a plain (not symplectic) basis. The projection
    t -> t + <t, w> v + <t, v> w maps the current basis onto the next
    complement and kills exactly span(v, w); dropping two basis vectors p, q
    whose coefficient minor in (v, w) is invertible leaves a basis again.
    """
    mask = (1 << n) - 1
    basis: list[int] = []
    for j in range(n):
        basis.extend((1 << (2 * n - 1 - j), 1 << (n - 1 - j)))
    out: list[int] = []
    for i in range(n):
        dim = 2 * (n - i)
        cv = 0
        while cv == 0:
            cv = _rand_bits(rng, dim)
        v = _combine(basis, cv)
        while True:
            cw = _rand_bits(rng, dim)
            w = _combine(basis, cw)
            if _sp(v, w, n, mask):
                break
        out.extend((v, w))
        if i == n - 1:
            break
        p = (cv & -cv).bit_length() - 1
        if cw >> p & 1:
            cw ^= cv
        q = (cw & -cw).bit_length() - 1
        nxt = []
        for j, t in enumerate(basis):
            if j == p or j == q:
                continue
            if ((((t >> n) & w) ^ (t & (w >> n))) & mask).bit_count() & 1:
                t ^= v
            if ((((t >> n) & v) ^ (t & (v >> n))) & mask).bit_count() & 1:
                t ^= w
            nxt.append(t)
        basis = nxt
    return out


def random_clifford_tableau(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniformly random element of Cl_n (modulo global phase)."""
    vecs = random_symplectic(n, rng)
    matrix = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    for i in range(n):
        matrix[i] = int_to_bits(vecs[2 * i], 2 * n)
        matrix[n + i] = int_to_bits(vecs[2 * i + 1], 2 * n)
    phases = 2 * rng.integers(0, 2, size=2 * n)
    return CliffordTableau(n, matrix, phases)


# ---------------------------------------------------------------------------
# Synthesis


@cache
def _c1_maps() -> tuple[dict, dict, dict]:
    """C1 indices that map a code to X, to Z, and (X fixed) to Z."""
    t = cl1_table()
    to_x, to_z, keep_x_to_z = {}, {}, {}
    for idx in range(len(t)):
        codes = t.codes[idx]
        for c in (1, 2, 3):
            if codes[c] == 1:
                to_x.setdefault(c, idx)
            if codes[c] == 2:
                to_z.setdefault(c, idx)
                if codes[1] == 1:
                    keep_x_to_z.setdefault(c, idx)
    return to_x, to_z, keep_x_to_z


def synthesize(tableau: CliffordTableau) -> CliffordCircuit:
    """Gate sequence realizing ``tableau`` (up to global phase).

    Gates are applied on the left until the tableau is the identity, column by
    column; the circuit is the reversed list of inverses.
    """
    n = tableau.n
    to_x, to_z, keep_x_to_z = _c1_maps()
    x, z, ph = tableau.rows()
    ph = ph.astype(np.int64)
    applied: list[Gate] = []

    def push(g: Gate):
        apply_gate_rows(x, z, ph, g)
        applied.append(g)

    for i in range(n):
        # image of X_i -> X_i
        for k in range(i, n):
            c = int(x[i, k] + 2 * z[i, k])
            if c in (2, 3):
                push(Gate("C1", (k,), to_x[c]))
        if x[i, i] == 0:
            k = next(k for k in range(i + 1, n) if x[i, k])
            push(Gate("SWAP", (i, k)))
        for k in range(i + 1, n):
            if x[i, k]:
                push(Gate("CX", (i, k)))
        # image of Z_i -> Z_i, keeping X_i
        c = int(x[n + i, i] + 2 * z[n + i, i])
        if c == 3:
            push(Gate("C1", (i,), keep_x_to_z[3]))
        for k in range(i + 1, n):
            c = int(x[n + i, k] + 2 * z[n + i, k])
            if c in (1, 3):
                push(Gate("C1", (k,), to_z[c]))
            if c:
                push(Gate("CX", (k, i)))
        if ph[i] == 2:
            push(Gate("Z", (i,)))
        if ph[n + i] == 2:
            push(Gate("X", (i,)))
    circuit = CliffordCircuit(n, tuple(g.inverse() for g in reversed(applied)))
    circuit._tableau = tableau
    return circuit


def clifford_index(tableau: CliffordTableau) -> int:
    """Index of a 1- or 2-qubit tableau in the enumerated Cl_1 / Cl_2 table."""
    n = tableau.n
    if n not in (1, 2):
        raise ValueError("only n = 1 or 2 are enumerated")
    table = cl1_table() if n == 1 else cl2_table()
    codes = np.arange(4**n)
    if n == 1:
        px, pz = (codes & 1)[:, None], (codes >> 1)[:, None]
    else:
        hi, lo = codes >> 2, codes & 3
        px = np.stack([hi & 1, lo & 1], axis=1)
        pz = np.stack([hi >> 1, lo >> 1], axis=1)
    x, z, ph = tableau.conjugate_rows(px, pz, np.zeros(len(codes), dtype=np.int64))
    if n == 1:
        img = x[:, 0] + 2 * z[:, 0]
    else:
        img = 4 * (x[:, 0] + 2 * z[:, 0]) + x[:, 1] + 2 * z[:, 1]
    return table.find(img.astype(np.uint8), ph.astype(np.uint8))


def tableau_of_group_element(k: int, index: int) -> CliffordTableau:
    return tableau_from_circuit(CliffordCircuit(k, (Gate("C1" if k == 1 else "C2", tuple(range(k)), index),)))
