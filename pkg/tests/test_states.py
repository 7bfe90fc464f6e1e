from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dipe.clifford import CliffordCircuit, random_clifford_tableau
from dipe.ensembles import EnsembleKind, EnsembleSpec, sample_unitary
from dipe.errors import ConfigError, ResourceCapError
from dipe.pauli import PauliString
from dipe.states import (
    StabilizerState,
    StatePair,
    StatevectorState,
    apply_clifford,
    born_from_spectrum,
    evolve_for_measurement,
    inner_product,
    make_ghz,
    make_haar_random,
    make_plus,
    make_s_state,
    make_zero,
    outcome_distribution,
    parse_state,
    pauli_expectation,
    sample_measurements,
    to_statevector,
)

import oracles


@pytest.mark.parametrize("n", [1, 2, 4])
def test_constructors_match_dense(n):
    assert oracles.equal_up_to_phase(to_statevector(make_ghz(n)).amplitudes, oracles.ghz(n))
    assert oracles.equal_up_to_phase(to_statevector(make_zero(n)).amplitudes, oracles.ket("0" * n))
    plus = np.full(1 << n, 2 ** (-n / 2), dtype=complex)
    assert oracles.equal_up_to_phase(to_statevector(make_plus(n)).amplitudes, plus)
    assert np.allclose(make_ghz(n, backend="statevector").amplitudes, oracles.ghz(n))


def test_s_state_matches_dense():
    assert np.allclose(make_s_state(3, 2, 0.3).amplitudes, oracles.s_state(3, 2, 0.3))


def test_from_labels_matches_projector():
    labels = ["-XZI", "ZXZ", "IZX"]
    st_ = StabilizerState.from_labels(labels)
    assert oracles.equal_up_to_phase(to_statevector(st_).amplitudes, oracles.state_from_stabilizers(labels))


@pytest.mark.parametrize("labels", [["XX", "ZI"], ["XI", "XI"]])
def test_from_labels_validates(labels):
    with pytest.raises(ValueError):
        StabilizerState.from_labels(labels)


@pytest.mark.parametrize("seed", range(4))
def test_pauli_expectation_both_backends(seed):
    rng = np.random.default_rng(seed)
    t = random_clifford_tableau(3, rng)
    st_ = apply_clifford(make_zero(3), CliffordCircuit.from_tableau(t))
    psi = to_statevector(st_).amplitudes
    for label in oracles.all_labels(3):
        p = PauliString.from_label(label)
        ref = oracles.expectation(psi, label)
        assert pauli_expectation(st_, p) == pytest.approx(ref, abs=1e-10)
        assert pauli_expectation(StatevectorState(3, psi), p) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_stabilizer_outcome_distribution(seed):
    rng = np.random.default_rng(seed)
    c = sample_unitary(EnsembleSpec(EnsembleKind.GLOBAL_CLIFFORD, 4), rng)
    stab = apply_clifford(make_ghz(4), c)
    dense = np.abs(c.matrix() @ oracles.ghz(4)) ** 2
    assert np.allclose(outcome_distribution(stab), dense)


@pytest.mark.parametrize("spec", ["global-clifford", "local-clifford", "brickwork:3"])
def test_heisenberg_born_matches_dense(spec):
    rng = np.random.default_rng(5)
    psi = oracles.haar_state(4, rng)
    state = StatevectorState(4, psi)
    for _ in range(4):
        c = sample_unitary(EnsembleSpec.parse(spec, 4), rng)
        born = evolve_for_measurement(state, c)
        assert np.allclose(born.probabilities, np.abs(c.matrix() @ psi) ** 2, atol=1e-12)


def test_born_from_spectrum_directly():
    rng = np.random.default_rng(2)
    psi = make_haar_random(3, 4)
    c = CliffordCircuit.from_tableau(random_clifford_tableau(3, rng))
    p = born_from_spectrum(psi.pauli_spectrum, c)
    assert np.allclose(p, np.abs(c.matrix() @ psi.amplitudes) ** 2, atol=1e-12)


def test_sampling_frequencies():
    rng = np.random.default_rng(0)
    st_ = make_ghz(5)
    out = sample_measurements(st_, 20_000, rng)
    assert set(np.unique(out)) == {0, 31}
    assert abs(np.mean(out == 0) - 0.5) < 0.02
    dense = make_s_state(3, 2, math.pi / 3)
    out = sample_measurements(dense, 40_000, rng)
    freq = np.bincount(out, minlength=8) / 40_000
    assert np.allclose(freq, dense.probabilities, atol=0.01)


def test_large_stabilizer_sampling_uses_python_ints():
    st_ = make_ghz(80)
    out = sample_measurements(st_, 50, np.random.default_rng(1))
    assert set(int(v) for v in out) <= {0, (1 << 80) - 1}


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_sampled_outcomes_lie_in_support(n, seed):
    rng = np.random.default_rng(seed)
    st_ = apply_clifford(make_zero(n), CliffordCircuit.from_tableau(random_clifford_tableau(n, rng)))
    p = outcome_distribution(st_)
    assert abs(p.sum() - 1) < 1e-12
    assert np.all(p[sample_measurements(st_, 30, rng)] > 0)


@pytest.mark.parametrize("seed", range(5))
def test_inner_product_backends_agree(seed):
    rng = np.random.default_rng(seed)
    a = apply_clifford(make_zero(3), CliffordCircuit.from_tableau(random_clifford_tableau(3, rng)))
    b = apply_clifford(make_zero(3), CliffordCircuit.from_tableau(random_clifford_tableau(3, rng)))
    dense = abs(np.vdot(to_statevector(a).amplitudes, to_statevector(b).amplitudes)) ** 2
    assert inner_product(StatePair(a, b)) == pytest.approx(dense, abs=1e-12)


def test_inner_product_examples():
    assert inner_product(StatePair(make_zero(1), make_plus(1))) == pytest.approx(0.5)
    assert inner_product(StatePair(make_ghz(4), make_ghz(4))) == 1.0
    assert inner_product(StatePair(make_zero(3), make_plus(3))) == pytest.approx(1 / 8)


@pytest.mark.parametrize(
    "text,backend,n",
    [("ghz:3", "stabilizer", 3), ("plus:2", "stabilizer", 2), ("sstate:4:2:0.5", "statevector", 4), ("haar:3:7", "statevector", 3)],
)
def test_parse_state(text, backend, n):
    s = parse_state(text)
    assert s.backend == backend and s.n == n


@pytest.mark.parametrize("text", ["ghz", "sstate:4:5:0.1", "haar:x:1", "bell:2"])
def test_parse_state_rejects(text):
    with pytest.raises(ConfigError):
        parse_state(text)


def test_statevector_cap():
    with pytest.raises(ResourceCapError):
        make_haar_random(30, 0)
    with pytest.raises(ResourceCapError):
        to_statevector(make_ghz(5), cap=4)


def test_unnormalized_rejected():
    with pytest.raises(ValueError):
        StatevectorState(1, np.array([1.0, 1.0]))
