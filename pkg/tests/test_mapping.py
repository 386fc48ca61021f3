import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_number_conserving
from ferm2q import oracle
from ferm2q.errors import SymmetryViolationError, ValidationError
from ferm2q.fermion import FermionOperator, build_hamiltonian
from ferm2q.mapping import (
    LadderTable,
    MappingScheme,
    beta_matrix,
    bk_sets,
    decode_state,
    encode_state,
    gf2_inverse,
    map_ladder,
    map_operator,
    parity_matrix,
    parity_reduce,
    parity_reduce_reference,
)
from ferm2q.pauli import PauliSum

SCHEMES = list(MappingScheme)


def test_scheme_parse():
    assert MappingScheme.parse("BK") is MappingScheme.BK
    assert MappingScheme.parse("jordan_wigner") is MappingScheme.JW
    with pytest.raises(ValidationError):
        MappingScheme.parse("ternary")


def test_beta_matrix_m4():
    expected = np.array([[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 1]])
    assert np.array_equal(beta_matrix(4), expected)


def test_beta_is_invertible():
    for m in range(1, 20):
        inv = gf2_inverse(beta_matrix(m))
        assert np.array_equal(inv.astype(int) @ beta_matrix(m) % 2, np.eye(m, dtype=int))


def test_bk_sets_m8():
    # tabulated update / parity / flip / remainder sets for eight modes
    sets = bk_sets(8)
    update = [{1, 3, 7}, {3, 7}, {3, 7}, {7}, {5, 7}, {7}, {7}, set()]
    parity = [set(), {0}, {1}, {1, 2}, {3}, {3, 4}, {3, 5}, {3, 5, 6}]
    flip = [set(), {0}, set(), {1, 2}, set(), {4}, set(), {3, 5, 6}]
    remainder = [set(), set(), {1}, set(), {3}, {3}, {3, 5}, set()]
    assert [set(s) for s in sets.update] == update
    assert [set(s) for s in sets.parity] == parity
    assert [set(s) for s in sets.flip] == flip
    assert [set(s) for s in sets.remainder] == remainder


def test_jw_ladder():
    a = map_ladder(2, False, "jw", 4)
    assert a.allclose(PauliSum.from_labels({"IXZZ": 0.5, "IYZZ": 0.5j}))
    with pytest.raises(ValidationError):
        map_ladder(4, True, "jw", 4)


def test_h2_jw_strings(h2_spin):
    q = map_operator(build_hamiltonian(h2_spin), "jw")
    assert q.n_qubits == 4
    assert len(q) == 15
    assert q.is_hermitian()


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("m", [1, 3, 5, 6])
def test_ladder_matrices_match_oracle(scheme, m):
    table = LadderTable(scheme, m)
    for j in range(m):
        for dagger in (0, 1):
            f = FermionOperator(m, {((j, dagger),): 1.0})
            q = map_operator(f, scheme, table)
            enc = _encoding_permutation(scheme, m)
            assert np.allclose(oracle.dense_pauli(q), enc @ oracle.dense_fermion(f) @ enc.T)


def _encoding_permutation(scheme, m):
    dim = 1 << m
    perm = np.zeros((dim, dim))
    for b in range(dim):
        occ = [(b >> k) & 1 for k in range(m)]
        q = encode_state(occ, scheme)
        perm[sum(v << k for k, v in enumerate(q)), b] = 1
    return perm


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 6]))
def test_jw_equals_dense_fermion(seed, m):
    f = random_number_conserving(m, np.random.default_rng(seed), hermitian=False)
    assert np.allclose(oracle.dense_pauli(map_operator(f, "jw")), oracle.dense_fermion(f), atol=1e-12)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_encode_decode(scheme):
    rng = np.random.default_rng(3)
    for _ in range(20):
        occ = list(rng.integers(0, 2, 9))
        assert decode_state(encode_state(occ, scheme), scheme) == occ


def test_parity_encoding():
    assert np.array_equal(parity_matrix(3), np.tril(np.ones((3, 3))))
    assert encode_state([1, 0, 1, 1], "parity") == [1, 1, 0, 1]


def test_parity_reduction_h2(h2_spin):
    q = map_operator(build_hamiltonian(h2_spin), "parity")
    r = parity_reduce(q, 1, 1)
    assert r.n_qubits == 2
    full = oracle.dense_pauli(q)
    # reduced spectrum is the (n_alpha odd, total even) block of the full one
    ref = parity_reduce_reference(encode_state(h2_spin.hf_occupation(), "parity"))
    assert ref == [1, 0]
    e_full = oracle.spectrum(full)
    e_red = oracle.spectrum(oracle.dense_pauli(r))
    assert all(np.isclose(e_full, e).any() for e in e_red)
    assert e_red[0] == pytest.approx(-1.1373060357534, abs=1e-10)


def test_parity_reduce_rejects_breaking_terms():
    s = PauliSum.from_labels({"XIII": 1.0})
    with pytest.raises(SymmetryViolationError):
        parity_reduce(s, 1, 1)
    with pytest.raises(ValidationError):
        parity_reduce(PauliSum.from_labels({"ZZZ": 1.0}), 1, 1)
