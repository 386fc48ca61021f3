import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ferm2q import oracle
from ferm2q.circuit import (
    Circuit,
    Gate,
    Param,
    cx,
    depth,
    dump_circuit,
    expected_cx_count,
    h,
    load_circuit,
    metrics,
    peephole,
    prepare_reference,
    rz,
    sx,
    sxdg,
    synth_pauli_evolution,
    transpile,
    x,
)
from ferm2q.errors import ValidationError
from ferm2q.pauli import PauliTerm


def test_prepare_reference():
    c = prepare_reference([1, 0, 1, 0])
    assert c.gates == [x(0), x(2)]
    assert depth(c) == 1
    assert len(prepare_reference([0, 0, 0])) == 0


def test_gate_validation():
    with pytest.raises(ValidationError):
        Circuit(2, [cx(0, 0)])
    with pytest.raises(ValidationError):
        Circuit(2, [x(2)])
    with pytest.raises(ValidationError):
        Circuit(2, [rz(0, Param(0))], n_params=0)
    with pytest.raises(ValidationError):
        Circuit(1, [Gate("U2", (0,))])


def test_single_z_term():
    c = synth_pauli_evolution([(PauliTerm.from_label("Z"), 0.4)])
    assert c.gates == [rz(0, 0.8)]


def test_zz_staircase():
    c = synth_pauli_evolution([(PauliTerm.from_label("ZZ"), 0.4)])
    m = metrics(c)
    assert m.gate_counts == {"CX": 2, "RZ": 1}
    assert m.depth == 3


def test_identity_term_noted():
    c = synth_pauli_evolution([(PauliTerm.identity(2), 0.4)])
    assert len(c) == 0
    assert c.notes


@pytest.mark.parametrize("label", ["XYZZ", "YIXI", "ZXYI", "YYYY", "IIIX"])
@pytest.mark.parametrize("theta", [0.3, -1.1])
def test_evolution_matches_expm(label, theta):
    t = PauliTerm.from_label(label)
    c = synth_pauli_evolution([(t, theta)])
    assert np.allclose(oracle.circuit_unitary(c), oracle.pauli_exponential(t, theta), atol=1e-8)
    assert metrics(c).gate_counts.get("CX", 0) == 2 * (t.weight - 1)


def test_symbolic_binding():
    t = PauliTerm.from_label("XY")
    c = synth_pauli_evolution([(t, Param(0, -0.5))])
    assert c.n_params == 1
    bound = c.bind([0.8])
    assert np.allclose(oracle.circuit_unitary(bound), oracle.pauli_exponential(t, -0.4))
    with pytest.raises(ValidationError):
        oracle.simulate(c)


def test_h_h_vanishes():
    assert len(transpile(Circuit(1, [h(0), h(0)]))) == 0


def test_cx_cx_vanishes():
    assert len(transpile(Circuit(2, [cx(0, 1), cx(0, 1)]))) == 0
    assert len(transpile(Circuit(2, [cx(0, 1), cx(1, 0)]))) == 2


def test_rz_merge_and_drop():
    c = peephole(Circuit(1, [rz(0, 0.3), rz(0, -0.3), x(0), x(0), rz(0, 2 * math.pi)]))
    assert len(c) == 0
    c = peephole(Circuit(1, [rz(0, 0.3), rz(0, 0.4)]))
    assert c.gates[0].angle == pytest.approx(0.7)


def test_symbolic_never_merged():
    c = Circuit(1, [rz(0, Param(0)), rz(0, Param(0))], n_params=1)
    assert len(transpile(c)) == 2
    c = Circuit(1, [rz(0, 0.5), rz(0, Param(0)), rz(0, 0.5)], n_params=1)
    assert len(transpile(c)) == 3


def test_transpile_basis():
    c = Circuit(2, [h(0), sxdg(1), cx(0, 1), sx(0), rz(1, 0.2)])
    t = transpile(c)
    assert {g.kind for g in t.gates} <= {"CX", "RZ", "SX", "X"}
    assert oracle.equal_up_to_phase(oracle.circuit_unitary(t), oracle.circuit_unitary(c))


_gates = st.lists(
    st.one_of(
        st.builds(lambda k, q: Gate(k, (q,)), st.sampled_from(["X", "SX", "SXdg", "H"]), st.integers(0, 2)),
        st.builds(lambda q, a: rz(q, a), st.integers(0, 2), st.sampled_from([0.0, 0.3, math.pi / 2, math.pi, -0.3])),
        st.builds(lambda c, d: cx(c, (c + d) % 3), st.integers(0, 2), st.integers(1, 2)),
    ),
    max_size=25,
)


@settings(max_examples=60, deadline=None)
@given(_gates)
def test_transpile_preserves_unitary(gates):
    c = Circuit(3, gates)
    t = transpile(c)
    assert {g.kind for g in t.gates} <= {"CX", "RZ", "SX", "X"}
    assert oracle.equal_up_to_phase(oracle.circuit_unitary(t), oracle.circuit_unitary(c))


def test_metrics():
    c = Circuit(2, [x(0), x(1), cx(0, 1)])
    m = metrics(c)
    assert (m.depth, m.total_gates, m.single_qubit_gates, m.two_qubit_gates) == (2, 3, 2, 1)
    assert metrics(Circuit(3)).depth == 0


@settings(max_examples=30, deadline=None)
@given(_gates)
def test_metric_invariants(gates):
    m = metrics(Circuit(3, gates))
    assert m.depth <= m.total_gates
    assert sum(m.gate_counts.values()) == m.total_gates == m.single_qubit_gates + m.two_qubit_gates


def test_cx_count_formula():
    items = [(PauliTerm.from_label(l), 0.1) for l in ["XXYZ", "ZIIZ", "IIIY", "YXIX"]]
    c = synth_pauli_evolution(items)
    assert metrics(c).gate_counts["CX"] == expected_cx_count(items) == 6 + 2 + 0 + 4


def test_dump_round_trip():
    c = Circuit(2, [x(0), rz(1, Param(0, -0.5)), cx(0, 1), rz(0, 0.25), sx(1)], n_params=1)
    text = dump_circuit(c)
    assert text.splitlines()[0] == "qubits 2 params 1"
    assert "RZ 1 -0.5*p0" in text
    back = load_circuit(text)
    assert back.gates == c.gates and back.n_params == 1


def test_simulate_conventions():
    v = oracle.simulate(Circuit(2, [x(0)]))
    assert v[1] == 1
    v = oracle.simulate(Circuit(2, [cx(0, 1)]), oracle.basis_state([1, 0]))
    assert v[3] == 1
