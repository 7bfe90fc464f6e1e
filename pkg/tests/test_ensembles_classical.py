from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dipe.classical import ClassicalFn, FnKind, block_table, eval_fn, twirl_residual, verify_unbiasedness
from dipe.ensembles import EnsembleKind, EnsembleSpec, brick_layout, last_layer_pairs, sample_unitary
from dipe.errors import ConfigError, ResourceCapError
from dipe.pauli import BitString

import oracles


@pytest.mark.parametrize(
    "text,kind,depth",
    [
        ("local-clifford", EnsembleKind.LOCAL_CLIFFORD, 0),
        ("global-clifford", EnsembleKind.GLOBAL_CLIFFORD, 0),
        ("brickwork:3", EnsembleKind.BRICKWORK, 3),
        ("brickwork:0", EnsembleKind.LOCAL_CLIFFORD, 0),
    ],
)
def test_parse(text, kind, depth):
    spec = EnsembleSpec.parse(text, 4)
    assert (spec.kind, spec.depth) == (kind, depth)


@pytest.mark.parametrize("text,n", [("brickwork:2", 3), ("brickwork:x", 4), ("haar", 4), ("local-clifford", 0)])
def test_parse_rejects(text, n):
    with pytest.raises(ConfigError):
        EnsembleSpec.parse(text, n)


def test_layout_is_periodic_brickwork():
    layout = brick_layout(6, 3)
    assert layout.layers[0] == ((0, 1), (2, 3), (4, 5))
    assert layout.layers[1] == ((1, 2), (3, 4), (5, 0))
    assert layout.layers[2] == layout.layers[0]
    for d in range(1, 6):
        assert list(last_layer_pairs(6, d)) == oracles.last_pairs(6, d)


def test_sampled_circuits_have_expected_shape():
    rng = np.random.default_rng(0)
    c = sample_unitary(EnsembleSpec(EnsembleKind.BRICKWORK, 6, 2), rng)
    names = [g.name for g in c.gates]
    assert names == ["C1"] * 6 + ["C2"] * 6
    local = sample_unitary(EnsembleSpec(EnsembleKind.LOCAL_CLIFFORD, 3), rng)
    assert [g.targets for g in local.gates] == [(0,), (1,), (2,)]
    glob = sample_unitary(EnsembleSpec(EnsembleKind.GLOBAL_CLIFFORD, 3), rng)
    assert glob.has_tableau and not glob.has_gates


def test_sampling_is_seed_deterministic():
    spec = EnsembleSpec(EnsembleKind.BRICKWORK, 4, 3)
    a = sample_unitary(spec, np.random.default_rng(9))
    b = sample_unitary(spec, np.random.default_rng(9))
    assert a == b


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_global_and_local_tables_match_definition(n):
    for kind, ref in [(FnKind.GLOBAL, oracles.f_global), (FnKind.LOCAL, oracles.f_local)]:
        fn = ClassicalFn(kind, n)
        table = fn.table()
        for x in range(1 << n):
            assert table[x] == ref(x, 0, n)


@pytest.mark.parametrize("n,d", [(2, 1), (4, 1), (4, 2), (6, 3), (6, 4)])
def test_brickwork_table_matches_definition(n, d):
    fn = ClassicalFn(FnKind.BRICKWORK, n, d)
    for a in range(1 << n):
        for b in range(0, 1 << n, 3):
            assert fn.value_int(a ^ b) == oracles.f_brickwork(a, b, n, d)


@pytest.mark.parametrize(
    "kind,n,d,expected",
    [(FnKind.GLOBAL, 3, 1, 4**3 + 2**3 - 1), (FnKind.LOCAL, 3, 1, 125), (FnKind.BRICKWORK, 6, 2, 19**3)],
)
def test_norm_sq_matches_table(kind, n, d, expected):
    fn = ClassicalFn(kind, n, d)
    assert fn.norm_sq() == expected == int((fn.table().astype(np.int64) ** 2).sum())


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(FnKind)), st.integers(1, 5).map(lambda k: 2 * k), st.data())
def test_pauli_invariance(kind, n, data):
    fn = ClassicalFn(kind, n, 1 + data.draw(st.integers(0, 3)))
    a, b, s = (data.draw(st.integers(0, (1 << n) - 1)) for _ in range(3))
    assert fn.value_int(a ^ b) == fn.value_int((a ^ s) ^ (b ^ s))
    assert eval_fn(fn, BitString.from_int(a, n), BitString.from_int(b, n)) == fn.value_int(a ^ b)


def test_wide_functions_use_exact_ints():
    fn = ClassicalFn(FnKind.LOCAL, 70)
    assert not fn.exact_int64
    assert fn.values(np.array([0], dtype=object))[0] == 2**70
    with pytest.raises(ResourceCapError):
        fn.table()


def test_unbiasedness_local_and_brickwork():
    assert verify_unbiasedness(ClassicalFn(FnKind.LOCAL, 5))[0]
    assert verify_unbiasedness(ClassicalFn(FnKind.BRICKWORK, 4, 2))[0]
    assert verify_unbiasedness(ClassicalFn(FnKind.GLOBAL, 2))[0]


def test_wrong_block_function_is_biased():
    assert twirl_residual(block_table(3.0, -1.0), 2) > 0.1


def test_global_enumeration_cap():
    with pytest.raises(ResourceCapError):
        verify_unbiasedness(ClassicalFn(FnKind.GLOBAL, 3))
