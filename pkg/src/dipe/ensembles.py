"""Measurement ensembles: local Clifford, global Clifford, brickwork circuits."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .clifford import CliffordCircuit, Gate, random_clifford_tableau
from .errors import ConfigError


class EnsembleKind(enum.Enum):
    LOCAL_CLIFFORD = "local-clifford"
    GLOBAL_CLIFFORD = "global-clifford"
    BRICKWORK = "brickwork"


@dataclass(frozen=True)
class EnsembleSpec:
    kind: EnsembleKind
    n: int
    depth: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.kind is EnsembleKind.BRICKWORK:
            if self.n % 2:
                raise ConfigError(f"brickwork circuits need even n, got {self.n}")
            if self.depth < 1:
                raise ConfigError("brickwork depth must be >= 1 (depth 0 is the local Clifford ensemble)")
        elif self.depth != 0:
            raise ConfigError(f"{self.kind.value} takes no depth")

    @property
    def label(self) -> str:
        if self.kind is EnsembleKind.BRICKWORK:
            return f"brickwork:{self.depth}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str, n: int) -> "EnsembleSpec":
        """``local-clifford``, ``global-clifford`` or ``brickwork:<d>``."""
        t = text.strip().lower()
        if t == "local-clifford":
            return cls(EnsembleKind.LOCAL_CLIFFORD, n)
        if t == "global-clifford":
            return cls(EnsembleKind.GLOBAL_CLIFFORD, n)
        if t.startswith("brickwork:"):
            try:
                d = int(t.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad brickwork depth in {text!r}") from None
            if d == 0:
                return cls(EnsembleKind.LOCAL_CLIFFORD, n)
            return cls(EnsembleKind.BRICKWORK, n, d)
        raise ConfigError(f"unknown ensemble {text!r}; expected local-clifford, global-clifford or brickwork:<d>")


@dataclass(frozen=True)
class BrickLayout:
    """Per-layer qubit pairs (0-based)."""

    n: int
    layers: tuple[tuple[tuple[int, int], ...], ...]

    def last_layer_pairs(self) -> tuple[tuple[int, int], ...]:
        return self.layers[-1]


def layer_pairs(n: int, layer: int) -> tuple[tuple[int, int], ...]:
    """Pairs of the 1-based ``layer``: odd layers (1,2),(3,4),...; even layers (2,3),...,(n,1)."""
    if n % 2:
        raise ConfigError(f"brickwork circuits need even n, got {n}")
    offset = 0 if layer % 2 else 1
    pairs = []
    for start in range(offset, n, 2):
        a, b = start, (start + 1) % n
        pairs.append((a, b) if n > 2 else (0, 1))
    return tuple(pairs)


def brick_layout(n: int, d: int) -> BrickLayout:
    if n % 2:
        raise ConfigError(f"brickwork circuits need even n, got {n}")
    if d < 1:
        raise ConfigError("depth must be >= 1")
    return BrickLayout(n, tuple(layer_pairs(n, ell) for ell in range(1, d + 1)))


def last_layer_pairs(n: int, d: int) -> tuple[tuple[int, int], ...]:
    return layer_pairs(n, d)


def sample_unitary(spec: EnsembleSpec, rng: np.random.Generator) -> CliffordCircuit:
    n = spec.n
    if spec.kind is EnsembleKind.GLOBAL_CLIFFORD:
        return CliffordCircuit.from_tableau(random_clifford_tableau(n, rng))
    singles = rng.integers(0, 24, size=n)
    gates = [Gate("C1", (q,), int(i)) for q, i in enumerate(singles)]
    if spec.kind is EnsembleKind.BRICKWORK:
        for pairs in brick_layout(n, spec.depth).layers:
            idx = rng.integers(0, 11520, size=len(pairs))
            gates.extend(Gate("C2", pair, int(i)) for pair, i in zip(pairs, idx))
    return CliffordCircuit(n, tuple(gates))
