from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dipe.analytics import (
    AvgVarianceInputs,
    avg_variance_case1,
    avg_variance_case2,
    brickwork_v2_exact,
    fit_log_base,
    global_clifford_breakdown,
    global_clifford_fourth_moment,
    global_clifford_variance_bound,
    haar_variance_sample,
    leading_v2_base,
    local_clifford_breakdown,
    local_clifford_v2,
    local_clifford_v4,
    local_product_reference,
    m2_sre,
    variance_monte_carlo,
    xi_block_classes,
    xi_dense,
    xi_norm_sq,
    xi_sparse,
    xi_theta,
    xi_tilde_dot_xi,
)
from dipe.classical import ClassicalFn, FnKind
from dipe.clifford import CliffordCircuit, random_clifford_tableau
from dipe.ensembles import EnsembleKind, EnsembleSpec
from dipe.errors import ConfigError, ResourceCapError
from dipe.pauli import PauliString
from dipe.states import (
    StatePair,
    StatevectorState,
    apply_clifford,
    make_ghz,
    make_plus,
    make_s_state,
    make_zero,
    to_statevector,
)

import oracles


def dense_pair(psi, phi):
    n = int(round(math.log2(len(psi))))
    return StatePair(StatevectorState(n, psi), StatevectorState(n, phi))


def random_stabilizer(n, rng):
    return apply_clifford(make_zero(n), CliffordCircuit.from_tableau(random_clifford_tableau(n, rng)))


# ---------------------------------------------------------------------------
# Pauli spectra


@pytest.mark.parametrize("seed", range(3))
def test_xi_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    psi, phi = oracles.haar_state(3, rng), oracles.haar_state(3, rng)
    ref = oracles.xi_oracle(psi, phi)
    xi = xi_dense(dense_pair(psi, phi))
    for label, val in ref.items():
        p = PauliString.from_label(label)
        assert xi[p.x, p.z] == pytest.approx(val, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_sparse_and_dense_xi_agree(seed):
    rng = np.random.default_rng(seed)
    a, b = random_stabilizer(4, rng), random_stabilizer(4, rng)
    pair = StatePair(a, b)
    keys, vals = xi_sparse(pair)
    dense = xi_dense(pair)
    rebuilt = np.zeros_like(dense)
    rebuilt[keys >> 4, keys & 15] = vals
    assert np.allclose(rebuilt, dense, atol=1e-12)
    assert xi_norm_sq(pair) == pytest.approx(float(np.sum(dense**2)))


def test_ghz_xi_norm():
    assert xi_norm_sq(StatePair(make_ghz(5), make_ghz(5))) == 32.0
    g = make_ghz(5, backend="statevector")
    assert xi_norm_sq(StatePair(g, g)) == pytest.approx(32.0)


def test_xi_tilde_dense_vs_sparse():
    rng = np.random.default_rng(11)
    a, b = random_stabilizer(3, rng), random_stabilizer(3, rng)
    dense = StatePair(to_statevector(a), to_statevector(b))
    assert xi_tilde_dot_xi(StatePair(a, b)) == pytest.approx(xi_tilde_dot_xi(dense), abs=1e-12)


# ---------------------------------------------------------------------------
# global Clifford


@pytest.mark.parametrize("n", [1, 2])
def test_fourth_moment_by_enumeration(n):
    rng = np.random.default_rng(n)
    group = oracles.clifford_group(n)
    for psi, phi in [(oracles.ket("0" * n), oracles.ket("0" * n)), (oracles.haar_state(n, rng), oracles.haar_state(n, rng))]:
        vals = [np.sum(np.abs(u @ psi) ** 2 * np.abs(u @ phi) ** 2) ** 2 for u in group]
        assert global_clifford_fourth_moment(dense_pair(psi, phi)) == pytest.approx(np.mean(vals), rel=1e-10)


def test_fourth_moment_zero_state_n1():
    assert global_clifford_fourth_moment(StatePair(make_zero(1), make_zero(1))) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("m", [1, 3, 50])
def test_global_breakdown_by_enumeration(m):
    # every V term averaged exactly over the 11520 elements of Cl_2
    n = 2
    rng = np.random.default_rng(4)
    psi, phi = oracles.haar_state(n, rng), oracles.haar_state(n, rng)
    fmat = np.array([[oracles.f_global(a, b, n) for b in range(4)] for a in range(4)], dtype=float)
    v2 = v3 = v4 = 0.0
    group = oracles.clifford_group(n)
    for u in group:
        p, q = np.abs(u @ psi) ** 2, np.abs(u @ phi) ** 2
        v2 += p @ (fmat**2) @ q
        v3 += p @ (fmat @ q) ** 2 + q @ (fmat.T @ p) ** 2
        v4 += (p @ fmat @ q) ** 2
    k = len(group)
    got = global_clifford_breakdown(dense_pair(psi, phi), m)
    assert got.v2 == pytest.approx(v2 / k / m**2, rel=1e-10)
    assert got.v3 == pytest.approx((m - 1) * v3 / k / m**2, rel=1e-10, abs=1e-14)
    assert got.v4 == pytest.approx(((m - 1) / m) ** 2 * v4 / k, rel=1e-10, abs=1e-14)
    assert global_clifford_variance_bound(dense_pair(psi, phi), m) == pytest.approx(got.v1 + got.v2 + got.v4)


# ---------------------------------------------------------------------------
# local Clifford


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_local_v2_matches_oracle(n, seed):
    rng = np.random.default_rng(seed)
    psi, phi = oracles.haar_state(n, rng), oracles.haar_state(n, rng)
    assert local_clifford_v2(dense_pair(psi, phi), 7) == pytest.approx(oracles.local_v2_oracle(psi, phi, 7), rel=1e-10)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_local_v2_plus_state(n):
    pair = StatePair(make_plus(n), make_plus(n))
    assert local_clifford_v2(pair, 4) == pytest.approx(3**n / 16, rel=1e-12)


def test_local_v2_ghz_examples():
    assert local_clifford_v2(StatePair(make_ghz(1), make_ghz(1)), 1) == pytest.approx(3.0)
    assert local_clifford_v2(StatePair(make_plus(4), make_plus(4)), 1) == pytest.approx(81.0)


def test_local_v4_by_enumeration():
    # per-site Cl_1 enumeration for n = 2 over 24^2 products
    rng = np.random.default_rng(8)
    psi, phi = oracles.haar_state(2, rng), oracles.haar_state(2, rng)
    g1 = oracles.clifford_group(1)
    fmat = np.array([[oracles.f_local(a, b, 2) for b in range(4)] for a in range(4)], dtype=float)
    vals = []
    for a in g1:
        for b in g1:
            u = np.kron(a, b)
            p, q = np.abs(u @ psi) ** 2, np.abs(u @ phi) ** 2
            vals.append((p @ fmat @ q) ** 2)
    m = 10
    assert local_clifford_v4(dense_pair(psi, phi), m) == pytest.approx(((m - 1) / m) ** 2 * np.mean(vals), rel=1e-10)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_local_v4_stabilizer_products(n):
    big = 10**9
    scale = ((big - 1) / big) ** 2
    for pair in [StatePair(make_zero(n), make_zero(n)), StatePair(make_plus(n), make_plus(n))]:
        assert local_clifford_v4(pair, big) / scale == pytest.approx(1.5**n, rel=1e-10)
    assert local_clifford_v4(StatePair(make_zero(n), make_zero(n)), 1) == 0.0


@pytest.mark.parametrize("k,theta", [(0, 0.4), (2, math.pi / 4), (3, 0.3), (4, 1.0)])
def test_local_v4_s_states(k, theta):
    s = make_s_state(4, k, theta)
    big = 10**9
    v4 = local_clifford_v4(StatePair(s, s), big) / ((big - 1) / big) ** 2
    assert v4 == pytest.approx(local_product_reference(4, k, theta) + 1, rel=1e-10)


def test_local_breakdown_has_no_v3():
    b = local_clifford_breakdown(StatePair(make_ghz(3), make_ghz(3)), 10)
    assert math.isnan(b.v3) and b.v1 == -1.0


# ---------------------------------------------------------------------------
# nonstabilizerness


@pytest.mark.parametrize("theta,expected", [(0.0, 1.5), (math.pi / 2, 1.5), (math.pi / 4, 1.125)])
def test_xi_theta_values(theta, expected):
    assert xi_theta(theta) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, math.pi / 2))
def test_xi_theta_symmetric(theta):
    assert xi_theta(theta) == pytest.approx(xi_theta(math.pi / 2 - theta), abs=1e-12)


@pytest.mark.parametrize("n,k,theta,expected", [(8, 0, 0.7, 256.0), (1, 1, math.pi / 4, 1.5), (1, 1, 0.0, 2.0)])
def test_m2_examples(n, k, theta, expected):
    assert m2_sre(n, k, theta) == pytest.approx(expected)


@pytest.mark.parametrize("k,theta", [(1, 0.3), (2, math.pi / 4), (3, 1.2)])
def test_m2_matches_pauli_sum(k, theta):
    assert m2_sre(3, k, theta) == pytest.approx(oracles.m2_oracle(oracles.s_state(3, k, theta)), rel=1e-10)


def test_local_product_reference_stabilizer_column():
    for k in range(9):
        assert local_product_reference(8, k, 0.0) == pytest.approx(1.5**8 - 1)


def test_m2_rejects_bad_k():
    with pytest.raises(ConfigError):
        m2_sre(3, 4, 0.1)


# ---------------------------------------------------------------------------
# Haar averages


def test_case1_two_design_value():
    b = avg_variance_case1(AvgVarianceInputs.for_fn(ClassicalFn(FnKind.GLOBAL, 2), 1), exact=True)
    assert b.v2 == Fraction(7) and b.v3 == 0 and b.v4 == 0


@pytest.mark.parametrize(
    "kind,fn_kind,base",
    [
        (EnsembleKind.GLOBAL_CLIFFORD, FnKind.GLOBAL, Fraction(2)),
        (EnsembleKind.LOCAL_CLIFFORD, FnKind.LOCAL, Fraction(5, 2)),
    ],
)
def test_leading_bases_exact(kind, fn_kind, base):
    for n in (2, 4, 6):
        inp = AvgVarianceInputs.for_fn(ClassicalFn(fn_kind, n), 1)
        v2 = avg_variance_case2(inp, exact=True).v2
        if fn_kind is FnKind.LOCAL:
            assert v2 == base**n
        else:
            assert v2 == (Fraction(4) ** n + 2**n - 1) / 2**n
    assert leading_v2_base(kind) == float(base)


def test_brickwork_base_exact():
    for n in (2, 4, 6):
        v2 = avg_variance_case2(AvgVarianceInputs.for_fn(ClassicalFn(FnKind.BRICKWORK, n, 3), 1), exact=True).v2
        assert v2**2 == Fraction(19, 4) ** n
    assert leading_v2_base(EnsembleKind.BRICKWORK) ** 2 == pytest.approx(19 / 4)


@pytest.mark.parametrize("spec", ["global-clifford", "local-clifford", "brickwork:1"])
@pytest.mark.parametrize("case", [1, 2])
def test_haar_sample_matches_formulas_small(spec, case):
    es = EnsembleSpec.parse(spec, 2)
    sample = haar_variance_sample(es, case, 150, 150, seed=3)
    formula = avg_variance_case1 if case == 1 else avg_variance_case2
    for m in (1, 10):
        ref = formula(AvgVarianceInputs.for_ensemble(es, m)).total
        assert sample.breakdown(m).total == pytest.approx(ref, rel=0.1)


def test_haar_sample_reproducible():
    es = EnsembleSpec.parse("local-clifford", 2)
    a = haar_variance_sample(es, 2, 5, 5, seed=1)
    b = haar_variance_sample(es, 2, 5, 5, seed=1)
    assert np.array_equal(a.mu, b.mu)


def test_fit_log_base():
    ns = np.arange(2, 10)
    assert fit_log_base(ns, 3.0 * 2.5**ns) == pytest.approx(2.5)
    with pytest.raises(ValueError):
        fit_log_base([1], [2.0])


# ---------------------------------------------------------------------------
# brickwork


def test_block_classes_sum_to_total():
    rng = np.random.default_rng(0)
    psi, phi = oracles.haar_state(4, rng), oracles.haar_state(4, rng)
    pair = dense_pair(psi, phi)
    classes = xi_block_classes(pair)
    assert sum(classes.values()) == pytest.approx(float(xi_dense(pair).sum()))
    ghz = StatePair(make_ghz(4), make_ghz(4))
    sparse = xi_block_classes(ghz)
    dense = xi_block_classes(StatePair(make_ghz(4, backend="statevector"), make_ghz(4, backend="statevector")))
    for key, val in dense.items():
        assert sparse.get(key, 0.0) == pytest.approx(val, abs=1e-12)


@pytest.mark.parametrize("d", [1, 2, 4])
def test_brickwork_v2_two_qubits(d):
    # on two qubits every depth is a Cl_2 two-design: V2 m^2 = 4 + 3 tr
    rng = np.random.default_rng(d)
    psi, phi = oracles.haar_state(2, rng), oracles.haar_state(2, rng)
    tr = abs(np.vdot(psi, phi)) ** 2
    assert brickwork_v2_exact(dense_pair(psi, phi), d, 1) == pytest.approx(4 + 3 * tr, rel=1e-10)


@pytest.mark.parametrize("d", [1, 3])
def test_brickwork_v2_against_monte_carlo(d):
    g = make_ghz(4, backend="statevector")
    pair = StatePair(g, g)
    spec = EnsembleSpec.parse(f"brickwork:{d}", 4)
    sample = variance_monte_carlo(pair, spec, 4000, seed=d)
    v2_samples = sample.ef2[:, 0]
    se = v2_samples.std(ddof=1) / math.sqrt(len(v2_samples))
    assert abs(brickwork_v2_exact(pair, d, 1) - v2_samples.mean()) < 4 * se


def test_caps():
    with pytest.raises(ResourceCapError):
        xi_dense(StatePair(make_ghz(9, backend="statevector"), make_ghz(9, backend="statevector")))
    with pytest.raises(ConfigError):
        AvgVarianceInputs(1, 1, 0, 1)
