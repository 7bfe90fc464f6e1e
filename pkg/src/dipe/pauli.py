"""Bitstrings and n-qubit Pauli operators in symplectic form.

Qubit 1 is the leftmost character of every textual label. Internally qubit
``i`` (0-based) is stored at integer bit ``n - 1 - i``, so the integer
encoding of a bitstring coincides with the big-endian statevector index.
Pauli strings use the same encoding for their ``x`` and ``z`` masks.

Site codes: (x, z) = (0, 0) I, (1, 0) X, (0, 1) Z, (1, 1) Y. A Pauli string
denotes the Hermitian tensor product of these single-qubit matrices, with
Y = iXZ.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

_LABEL_TO_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_TO_LABEL = {v: k for k, v in _LABEL_TO_XZ.items()}
_PHASE_LABELS = {0: "+", 1: "+i", 2: "-", 3: "-i"}

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def popcount(v):
    """Number of set bits of an int or of each entry of an integer array."""
    if isinstance(v, (int, np.integer)):
        return int(v).bit_count()
    v = np.asarray(v)
    if v.dtype == object:
        return np.array([int(t).bit_count() for t in v.ravel()], dtype=np.int64).reshape(v.shape)
    return np.bitwise_count(v).astype(np.int64)


def bits_to_int(bits: Iterable[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | (int(b) & 1)
    return value


def int_to_bits(value: int, n: int) -> np.ndarray:
    """Bits of ``value`` as a length-``n`` uint8 array, qubit 1 first."""
    return np.array([(int(value) >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def ints_to_bit_matrix(values: np.ndarray, n: int) -> np.ndarray:
    """Row ``r`` holds the bits of ``values[r]``, qubit 1 first."""
    values = np.asarray(values)
    shifts = np.arange(n - 1, -1, -1)
    if values.dtype == object or n > 63:
        return np.array([[(int(v) >> int(s)) & 1 for s in shifts] for v in values], dtype=np.uint8)
    return ((values.astype(np.uint64)[:, None] >> shifts.astype(np.uint64)) & np.uint64(1)).astype(np.uint8)


def bit_matrix_to_ints(mat: np.ndarray) -> np.ndarray:
    """Inverse of :func:`ints_to_bit_matrix`; object dtype beyond 63 columns."""
    mat = np.asarray(mat, dtype=np.uint8)
    n = mat.shape[1]
    if n > 63:
        return np.array([bits_to_int(row) for row in mat], dtype=object)
    weights = np.left_shift(np.uint64(1), np.arange(n - 1, -1, -1, dtype=np.uint64))
    return (mat.astype(np.uint64) * weights).sum(axis=1).astype(np.int64)


@dataclass(frozen=True)
class BitString:
    """A measurement outcome or signature in Z_2^n."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) == 0:
            raise ValueError("a bitstring needs at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0 or 1, got {self.bits}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        if value < 0 or value >> n:
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls(tuple(int(b) for b in int_to_bits(value, n)))

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls((0,) * n)

    def to_int(self) -> int:
        return bits_to_int(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __xor__(self, other: "BitString") -> "BitString":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitString(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def weight(self) -> int:
        return sum(self.bits)


def hamming_distance(a: BitString, b: BitString) -> int:
    return (a ^ b).weight()


@dataclass(frozen=True)
class PauliString:
    """Phase-free Pauli string, stored as integer x/z masks."""

    n: int
    x: int
    z: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.x < 0 or self.z < 0 or self.x >> self.n or self.z >> self.n:
            raise ValueError("x/z masks do not fit in n bits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        label = label.strip().upper()
        if not label or set(label) - set("IXYZ"):
            raise ValueError(f"not a Pauli label: {label!r}")
        x = bits_to_int(_LABEL_TO_XZ[c][0] for c in label)
        z = bits_to_int(_LABEL_TO_XZ[c][1] for c in label)
        return cls(len(label), x, z)

    @classmethod
    def from_bits(cls, x_bits, z_bits) -> "PauliString":
        x_bits = list(x_bits)
        z_bits = list(z_bits)
        if len(x_bits) != len(z_bits):
            raise ValueError("x and z parts must have equal length")
        return cls(len(x_bits), bits_to_int(x_bits), bits_to_int(z_bits))

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliString":
        """Pauli ``kind`` on 0-based ``qubit``, identity elsewhere."""
        xb, zb = _LABEL_TO_XZ[kind.upper()]
        shift = n - 1 - qubit
        return cls(n, xb << shift, zb << shift)

    @property
    def label(self) -> str:
        return "".join(_XZ_TO_LABEL[(xb, zb)] for xb, zb in zip(self.x_bits, self.z_bits))

    def __str__(self) -> str:
        return self.label

    @property
    def x_bits(self) -> np.ndarray:
        return int_to_bits(self.x, self.n)

    @property
    def z_bits(self) -> np.ndarray:
        return int_to_bits(self.z, self.n)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> int:
        """Signature as an integer mask."""
        return self.x | self.z

    def commutes(self, other: "PauliString") -> bool:
        return symplectic_product(self.x, self.z, other.x, other.z) == 0

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; only sensible for small n."""
        out = np.ones((1, 1), dtype=complex)
        for c in self.label:
            out = np.kron(out, PAULI_MATRICES[c])
        return out


def symplectic_product(x1, z1, x2, z2):
    """0 if the Paulis commute, 1 if they anticommute (ints or arrays)."""
    return popcount((x1 & z2) ^ (z1 & x2)) & 1


def product_phase(x1, z1, x2, z2):
    """Exponent k (mod 4) with sigma(x1,z1) sigma(x2,z2) = i^k sigma(x1^x2, z1^z2).

    Works on ints or on integer arrays. Cyclic products (XY, YZ, ZX) add +1
    per site and anticyclic ones add -1.
    """
    X1, Y1, Z1 = x1 & ~z1, x1 & z1, z1 & ~x1
    X2, Y2, Z2 = x2 & ~z2, x2 & z2, z2 & ~x2
    plus = popcount(X1 & Y2) + popcount(Y1 & Z2) + popcount(Z1 & X2)
    minus = popcount(Y1 & X2) + popcount(Z1 & Y2) + popcount(X1 & Z2)
    return (plus - minus) % 4


def pauli_weight(p: PauliString) -> int:
    return p.weight


def signature(p: PauliString) -> BitString:
    return BitString.from_int(p.support, p.n)


@dataclass(frozen=True)
class SignedPauli:
    """A Pauli string times i^phase."""

    pauli: PauliString
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def from_label(cls, label: str) -> "SignedPauli":
        text = label.strip()
        phase = 0
        if text.startswith("-"):
            phase, text = 2, text[1:]
        elif text.startswith("+"):
            text = text[1:]
        if text.startswith("i"):
            phase, text = (phase + 1) % 4, text[1:]
        return cls(PauliString.from_label(text), phase)

    @property
    def n(self) -> int:
        return self.pauli.n

    @property
    def label(self) -> str:
        return _PHASE_LABELS[self.phase] + self.pauli.label

    def __str__(self) -> str:
        return self.label

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        if not self.is_hermitian:
            raise ValueError(f"{self.label} is not Hermitian")
        return 1 if self.phase == 0 else -1

    def __mul__(self, other: "SignedPauli") -> "SignedPauli":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        a, b = self.pauli, other.pauli
        k = product_phase(a.x, a.z, b.x, b.z)
        return SignedPauli(PauliString(a.n, a.x ^ b.x, a.z ^ b.z), self.phase + other.phase + k)

    def matrix(self) -> np.ndarray:
        return (1j ** self.phase) * self.pauli.matrix()


def all_paulis(n: int):
    """Every Pauli string on n qubits, ordered by (x, z) masks."""
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliString(n, x, z)
