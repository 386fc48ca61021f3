import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_number_conserving
from ferm2q import oracle
from ferm2q.errors import ValidationError
from ferm2q.fermion import (
    Excitation,
    FermionOperator,
    build_hamiltonian,
    closed_shell_param_count,
    excitation_generator,
    format_term,
    hamiltonian_literal,
    normal_order,
    number_operator,
    parse_term,
    uccsd_excitations,
)


def test_parse_and_format():
    key = parse_term("3^ 1^ 2 0")
    assert key == ((3, 1), (1, 1), (2, 0), (0, 0))
    assert format_term(key) == "3^ 1^ 2 0"
    with pytest.raises(ValidationError):
        parse_term("3* 1")


def test_mode_range_checked():
    with pytest.raises(ValidationError):
        FermionOperator.from_string(2, "2^ 0")


def test_anticommutator_normal_order():
    f = FermionOperator.from_string(3, "1 1^")
    g = normal_order(f)
    assert g.terms == {(): 1, ((1, 1), (1, 0)): -1}


def test_pauli_exclusion():
    assert len(normal_order(FermionOperator.from_string(3, "1^ 1^"))) == 0
    assert len(normal_order(FermionOperator.from_string(3, "2 0 2"))) == 0


def test_descending_order_sign():
    g = normal_order(FermionOperator.from_string(4, "0^ 2^ 1 3"))
    assert g.terms == {((2, 1), (0, 1), (3, 0), (1, 0)): 1}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_normal_order_preserves_matrix(seed):
    rng = np.random.default_rng(seed)
    m = 4
    terms = {}
    for _ in range(6):
        length = int(rng.integers(1, 5))
        key = tuple((int(rng.integers(0, m)), int(rng.integers(0, 2))) for _ in range(length))
        terms[key] = complex(rng.normal())
    f = FermionOperator(m, terms)
    g = normal_order(f)
    assert g.is_normal_ordered()
    assert np.allclose(oracle.dense_fermion(f), oracle.dense_fermion(g), atol=1e-12)


def test_h2_hamiltonian_term_count(h2_spin):
    h = build_hamiltonian(h2_spin)
    assert h.is_normal_ordered()
    # 1 constant + 4 one-body + 10 two-body strings survive for H2/STO-3G
    assert len(h) == 15
    assert h.allclose(hamiltonian_literal(h2_spin))


def test_vectorized_matches_literal(data_dir):
    from ferm2q.integrals import read_fcidump, spatial_to_spin

    s = spatial_to_spin(read_fcidump(data_dir / "LiH.FCIDUMP"))
    fast = build_hamiltonian(s)
    slow = normal_order(hamiltonian_literal(s))
    assert set(fast.terms) == set(slow.terms)
    assert fast.allclose(slow)


def test_hamiltonian_ground_state_matches_fci(h2_spin, reference):
    d = oracle.dense_fermion(build_hamiltonian(h2_spin))
    idx = oracle.number_sector_indices(4, 1, 1)
    e0 = oracle.sector_spectrum(d, idx)[0]
    assert e0 == pytest.approx(reference["H2"]["e_fci"], abs=1e-10)
    assert e0 == pytest.approx(-1.137, abs=0.01)


def test_hamiltonian_hermitian(h2_spin):
    h = build_hamiltonian(h2_spin)
    assert h.allclose(h.adjoint())


@pytest.mark.parametrize(
    "o,v,expected",
    [(1, 1, 3), (5, 4, 560), (9, 4, 1800), (2, 4, 2 * 8 + 2 * 1 * 6 + 64)],
)
def test_closed_shell_count(o, v, expected):
    assert closed_shell_param_count(o, v) == expected
    assert uccsd_excitations(o, o, 2 * (o + v)).n_params == expected


def test_excitation_order_h2():
    exc = uccsd_excitations(1, 1, 4)
    assert [(e.occ, e.virt, e.slot) for e in exc] == [
        ((0,), (1,), 0),
        ((2,), (3,), 1),
        ((0, 2), (1, 3), 2),
    ]


def test_excitations_conserve_spin():
    n = 5
    for e in uccsd_excitations(3, 2, 2 * n):
        assert sorted(i >= n for i in e.occ) == sorted(a >= n for a in e.virt)


def test_open_shell_count():
    # 2 alpha, 1 beta in 3 orbitals: singles 2*1 + 1*2, aa doubles 0, mixed 2*1*1*2
    assert uccsd_excitations(2, 1, 6).n_params == 4 + 4


def test_generator_is_anti_hermitian():
    g = excitation_generator(Excitation((0, 2), (1, 3), 0), 4)
    assert g.allclose(g.adjoint() * -1)
    d = oracle.dense_fermion(g)
    assert np.allclose(d, -d.conj().T)


def test_generator_rejects_collisions():
    with pytest.raises(ValidationError):
        excitation_generator(Excitation((0, 1), (1, 3), 0), 4)


def test_generator_conserves_number(rng):
    g = excitation_generator(Excitation((0,), (2,), 0), 4)
    n = oracle.dense_fermion(number_operator(4))
    d = oracle.dense_fermion(g)
    assert np.allclose(n @ d - d @ n, 0)


def test_random_operators_are_normal_ordered(rng):
    f = random_number_conserving(4, rng)
    assert f.is_normal_ordered()
