"""Independent dense reference implementations used by the tests.

Nothing here imports the package: every quantity is rebuilt from explicit
matrices, kron products and brute-force enumeration.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S = np.diag([1, 1j])
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(label: str) -> np.ndarray:
    return kron_all(PAULI[c] for c in label)


def all_labels(n: int):
    return ["".join(t) for t in itertools.product("IXYZ", repeat=n)]


def embed(u: np.ndarray, targets, n: int) -> np.ndarray:
    """Dense operator of a k-qubit gate on ``targets`` (qubit 0 is the leftmost factor)."""
    k = len(targets)
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    others = [q for q in range(n) if q not in targets]
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub = 0
        for t in targets:
            sub = 2 * sub + bits[t]
        for row_sub in range(1 << k):
            amp = u[row_sub, sub]
            if amp == 0:
                continue
            nb = list(bits)
            for j, t in enumerate(targets):
                nb[t] = (row_sub >> (k - 1 - j)) & 1
            row = 0
            for q in range(n):
                row = 2 * row + nb[q]
            out[row, col] += amp
    assert all(q not in targets for q in others)
    return out


def ket(bits: str) -> np.ndarray:
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def ghz(n: int) -> np.ndarray:
    v = np.zeros(1 << n, dtype=complex)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return v


def s_state(n: int, k: int, theta: float) -> np.ndarray:
    one = np.array([1, np.exp(1j * theta)], dtype=complex) / math.sqrt(2)
    return kron_all([np.array([1, 0], dtype=complex)] * (n - k) + [one] * k).reshape(-1)


def state_from_stabilizers(labels) -> np.ndarray:
    """+1 joint eigenvector of signed Pauli labels such as ``-XZ``."""
    n = len(labels[0].lstrip("+-"))
    proj = np.eye(1 << n, dtype=complex)
    for lab in labels:
        sign = -1 if lab.startswith("-") else 1
        proj = proj @ (np.eye(1 << n) + sign * pauli_matrix(lab.lstrip("+-"))) / 2
    vals, vecs = np.linalg.eigh(proj)
    return vecs[:, np.argmax(vals)]


def haar_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def expectation(psi: np.ndarray, label: str) -> float:
    return float(np.vdot(psi, pauli_matrix(label) @ psi).real)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < tol:
        return np.allclose(a, 0, atol=tol)
    phase = a[idx] / b[idx]
    return abs(abs(phase) - 1) < tol and np.allclose(a, phase * b, atol=tol)


# ---------------------------------------------------------------------------
# classical functions by definition


def f_global(a: int, b: int, n: int) -> int:
    return 2**n if a == b else -1


def f_local(a: int, b: int, n: int) -> int:
    out = 1
    for q in range(n):
        out *= 2 if ((a >> q) & 1) == ((b >> q) & 1) else -1
    return out


def last_pairs(n: int, d: int):
    if d % 2:
        return [(2 * c, 2 * c + 1) for c in range(n // 2)]
    return [(2 * c + 1, (2 * c + 2) % n) for c in range(n // 2)]


def f_brickwork(a: int, b: int, n: int, d: int) -> int:
    def bit(v, q):
        return (v >> (n - 1 - q)) & 1

    out = 1
    for p, q in last_pairs(n, d):
        out *= 4 if (bit(a, p), bit(a, q)) == (bit(b, p), bit(b, q)) else -1
    return out


def collision_bruteforce(a, b, f) -> float:
    return sum(f(int(x), int(y)) for x in a for y in b) / (len(a) * len(b))


def exact_xm_moments(p: np.ndarray, q: np.ndarray, fmat: np.ndarray, m: int) -> tuple[float, float]:
    """E[X_m] and E[X_m^2] for fixed distributions by enumerating all outcome lists."""
    size = len(p)
    mean = second = 0.0
    for a in itertools.product(range(size), repeat=m):
        pa = np.prod([p[i] for i in a])
        if pa == 0:
            continue
        for b in itertools.product(range(size), repeat=m):
            qb = np.prod([q[j] for j in b])
            if qb == 0:
                continue
            x = sum(fmat[i, j] for i in a for j in b) / m**2
            mean += pa * qb * x
            second += pa * qb * x * x
    return mean, second


# ---------------------------------------------------------------------------
# Clifford groups by closure


def _canonical(u: np.ndarray) -> bytes:
    flat = u.reshape(-1)
    k = np.flatnonzero(np.abs(flat) > 1e-9)[0]
    v = u * (abs(flat[k]) / flat[k])
    v = np.round(v, 6) + 0.0  # drop negative zeros
    return v.tobytes()


def clifford_group(k: int) -> list[np.ndarray]:
    """All elements of Cl_k modulo phase by breadth-first closure (k <= 2)."""
    if k == 1:
        gens = [H, S]
    else:
        gens = [np.kron(H, I2), np.kron(I2, H), np.kron(S, I2), np.kron(I2, S), CX]
    start = np.eye(1 << k, dtype=complex)
    seen = {_canonical(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                v = g @ u
                key = _canonical(v)
                if key not in seen:
                    seen[key] = v
                    nxt.append(v)
        frontier = nxt
    return list(seen.values())


# ---------------------------------------------------------------------------
# Pauli sums


def xi_oracle(psi: np.ndarray, phi: np.ndarray) -> dict[str, float]:
    n = int(round(math.log2(len(psi))))
    return {lab: expectation(psi, lab) * expectation(phi, lab) for lab in all_labels(n)}


def local_v2_oracle(psi, phi, m: int) -> float:
    n = int(round(math.log2(len(psi))))
    xi = xi_oracle(psi, phi)
    return 2.5**n / m**2 * sum(v / 5 ** sum(c != "I" for c in lab) for lab, v in xi.items())


def m2_oracle(psi: np.ndarray) -> float:
    """sum_P tr[P rho]^4."""
    n = int(round(math.log2(len(psi))))
    return sum(expectation(psi, lab) ** 4 for lab in all_labels(n))


# ---------------------------------------------------------------------------
# brickwork signature chain by explicit Pauli propagation


def brick_signature_transfer() -> np.ndarray:
    """Column-stochastic map of 2-bit supports under a uniform Cl_2 element, by enumeration."""
    group = np.array(clifford_group(2))
    labels = all_labels(2)
    mats = np.array([pauli_matrix(lab) for lab in labels])
    sig = np.array([(lab[0] != "I") * 2 + (lab[1] != "I") for lab in labels])
    out = np.zeros((4, 4))
    for s, src in enumerate(mats):
        img = group @ src @ group.conj().transpose(0, 2, 1)
        overlaps = np.abs(np.einsum("pij,gji->gp", mats, img))
        hit = np.argmax(overlaps, axis=1)
        np.add.at(out[:, sig[s]], sig[hit], 1)
    return out / out.sum(axis=0)
