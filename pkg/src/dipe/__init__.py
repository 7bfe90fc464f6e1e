"""Distributed inner product estimation with random Clifford measurements."""

from __future__ import annotations

from .classical import ClassicalFn, FnKind
from .ensembles import EnsembleKind, EnsembleSpec, sample_unitary
from .errors import ConfigError, DipeError, ResourceCapError
from .pauli import BitString, PauliString, SignedPauli
from .protocol import EstimateReport, collision_statistic, plan_rounds, run_protocol, run_round
from .states import (
    StabilizerState,
    StatePair,
    StatevectorState,
    inner_product,
    make_ghz,
    make_haar_random,
    make_plus,
    make_s_state,
    make_zero,
    parse_state,
)

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "ClassicalFn",
    "ConfigError",
    "DipeError",
    "EnsembleKind",
    "EnsembleSpec",
    "EstimateReport",
    "FnKind",
    "PauliString",
    "ResourceCapError",
    "SignedPauli",
    "StabilizerState",
    "StatePair",
    "StatevectorState",
    "collision_statistic",
    "inner_product",
    "make_ghz",
    "make_haar_random",
    "make_plus",
    "make_s_state",
    "make_zero",
    "parse_state",
    "plan_rounds",
    "run_protocol",
    "run_round",
    "sample_unitary",
]
