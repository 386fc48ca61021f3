"""Dense brute-force reference engine for small systems.

Everything here is built straight from definitions: ladder operators as
matrices with explicit sign strings, Pauli strings as Kronecker products and
circuits as gate-by-gate statevector updates.  Mode/qubit 0 is the
least-significant bit of a basis index.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

from .circuit import Circuit, Gate
from .errors import ResourceLimitError, ValidationError
from .fermion import FermionOperator
from .integrals import SpatialIntegralSet, SpinIntegralSet
from .pauli import PauliSum, PauliTerm

MAX_QUBITS = 12

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|: removes a particle
_PAULI = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def _check_size(n: int) -> None:
    if n > MAX_QUBITS:
        raise ResourceLimitError(f"dense oracle limited to {MAX_QUBITS} qubits/modes, got {n}")


def kron_lsb(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product with ``factors[0]`` acting on the least-significant bit."""
    return reduce(np.kron, list(factors)[::-1], np.eye(1, dtype=complex))


def _sparse_kron_lsb(factors):
    out = scipy.sparse.identity(1, dtype=complex, format="csr")
    for f in factors[::-1]:
        out = scipy.sparse.kron(out, scipy.sparse.csr_matrix(f), format="csr")
    return out


def annihilator(j: int, m: int, sparse: bool = False):
    """``a_j`` on ``m`` modes: Z on modes below ``j``, the lowering matrix on ``j``."""
    _check_size(m)
    if not 0 <= j < m:
        raise ValidationError(f"mode {j} out of range for {m} modes")
    factors = [Z2] * j + [LOWER] + [I2] * (m - j - 1)
    return _sparse_kron_lsb(factors) if sparse else kron_lsb(factors)


def dense_fermion(f: FermionOperator) -> np.ndarray:
    m = f.n_modes
    _check_size(m)
    dim = 1 << m
    lowers = [annihilator(j, m, sparse=True) for j in range(m)]
    raises = [a.conj().T.tocsr() for a in lowers]
    out = scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    eye = scipy.sparse.identity(dim, dtype=complex, format="csr")
    for key, coeff in f.terms.items():
        mat = eye
        for j, dagger in key:
            mat = mat @ (raises[j] if dagger else lowers[j])
        out = out + coeff * mat
    return out.toarray()


def pauli_matrix(t: PauliTerm) -> np.ndarray:
    _check_size(t.n_qubits)
    return kron_lsb([_PAULI[t.letter(q)] for q in range(t.n_qubits)])


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    count = np.zeros_like(a)
    while a.any():
        count += a & 1
        a >>= 1
    return count


def dense_pauli(s: PauliSum) -> np.ndarray:
    """Matrix of a Pauli sum; equal to the sum of :func:`pauli_matrix` terms.

    Uses the basis action ``P|b> = i^|x&z| (-1)^|z&b| |b^x>`` so each string
    costs one pass over the basis instead of a full Kronecker product.
    """
    n = s.n_qubits
    _check_size(n)
    dim = 1 << n
    b = np.arange(dim, dtype=np.int64)
    out = np.zeros((dim, dim), dtype=complex)
    for (x, z), c in s.terms.items():
        sign = 1 - 2 * (_popcount(b & z) & 1)
        phase = 1j ** ((x & z).bit_count() % 4)
        out[b ^ x, b] += c * phase * sign
    return out


def spectrum(d: np.ndarray, atol: float = 1e-8) -> np.ndarray:
    d = np.asarray(d)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValidationError("spectrum needs a square matrix")
    if not np.allclose(d, d.conj().T, atol=atol, rtol=0):
        raise ValidationError("matrix is not Hermitian")
    return scipy.linalg.eigvalsh(0.5 * (d + d.conj().T))


def number_sector_indices(m: int, n_alpha: int, n_beta: int) -> np.ndarray:
    """Occupation basis indices with the given alpha (modes < m/2) and beta counts."""
    half = m // 2
    idx = np.arange(1 << m)
    lo = idx & ((1 << half) - 1)
    hi = idx >> half
    pop = np.vectorize(lambda v: bin(v).count("1"))
    return idx[(pop(lo) == n_alpha) & (pop(hi) == n_beta)]


def sector_spectrum(d: np.ndarray, indices: Sequence[int]) -> np.ndarray:
    idx = np.asarray(indices)
    return spectrum(d[np.ix_(idx, idx)])


# statevector simulation --------------------------------------------------------

SX2 = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
H2 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 (or 4x4 for CX, control on the low bit) matrix of a bound gate."""
    if g.kind == "X":
        return X2
    if g.kind == "SX":
        return SX2
    if g.kind == "SXdg":
        return SX2.conj().T
    if g.kind == "H":
        return H2
    if g.kind == "RZ":
        if g.is_symbolic:
            raise ValidationError("unbound parameter slot in RZ")
        phi = float(g.angle)
        return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])
    if g.kind == "CX":
        # basis |t c>: index = 2*t + c
        return np.array(
            [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
        )
    raise ValidationError(f"unknown gate {g.kind}")


def _apply(state: np.ndarray, g: Gate, n: int) -> np.ndarray:
    psi = state.reshape([2] * n)  # axis k is qubit n-1-k
    if g.kind == "CX":
        c, t = g.qubits
        ac, at = n - 1 - c, n - 1 - t
        psi = psi.copy()
        sel = [slice(None)] * n
        sel[ac] = 1
        sub = psi[tuple(sel)]
        # axis index of the target within the sliced array
        at2 = at if at < ac else at - 1
        psi[tuple(sel)] = np.flip(sub, axis=at2)
        return psi.reshape(-1)
    q = g.qubits[0]
    ax = n - 1 - q
    mat = gate_matrix(g)
    psi = np.tensordot(mat, psi, axes=([1], [ax]))
    psi = np.moveaxis(psi, 0, ax)
    return psi.reshape(-1)


def basis_state(bits: Sequence[int]) -> np.ndarray:
    n = len(bits)
    _check_size(n)
    v = np.zeros(1 << n, dtype=complex)
    v[sum(1 << k for k, b in enumerate(bits) if b)] = 1.0
    return v


def simulate(c: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Apply the gates of ``c`` in order; parameters must already be bound."""
    n = c.n_qubits
    _check_size(n)
    if initial is None:
        state = np.zeros(1 << n, dtype=complex)
        state[0] = 1.0
    else:
        state = np.asarray(initial, dtype=complex).copy()
        if state.shape != (1 << n,):
            raise ValidationError(f"state has shape {state.shape}, expected ({1 << n},)")
        if abs(np.vdot(state, state) - 1.0) > 1e-10:
            raise ValidationError("initial state is not normalized")
    for g in c.gates:
        if g.is_symbolic:
            raise ValidationError(f"unbound parameter slot {g.angle.slot}")
        state = _apply(state, g, n)
    return state


def circuit_unitary(c: Circuit) -> np.ndarray:
    n = c.n_qubits
    _check_size(n)
    dim = 1 << n
    cols = [simulate(c, np.eye(dim, dtype=complex)[:, k]) for k in range(dim)]
    return np.stack(cols, axis=1)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-8) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < 1e-12:
        return False
    phase = b[idx] / a[idx]
    return np.allclose(a * phase, b, atol=atol, rtol=0)


def pauli_exponential(term: PauliTerm, angle: float) -> np.ndarray:
    """``exp(-i angle P)`` by dense matrix exponential."""
    return scipy.linalg.expm(-1j * angle * pauli_matrix(term))


# Hartree-Fock energies ------------------------------------------------------------


def hf_energy_spatial(s: SpatialIntegralSet) -> float:
    """Closed/open-shell determinant energy from chemist-notation spatial integrals."""
    occ_a = range(s.n_alpha)
    occ_b = range(s.n_beta)
    h1, g = s.h1, s.h2
    e = s.e_const
    e += sum(h1[i, i] for i in occ_a) + sum(h1[i, i] for i in occ_b)
    for occ in (occ_a, occ_b):
        for i in occ:
            for j in occ:
                e += 0.5 * (g[i, i, j, j] - g[i, j, j, i])
    for i in occ_a:
        for j in occ_b:
            e += g[i, i, j, j]
    return float(e)


def hf_energy_spin(s: SpinIntegralSet) -> float:
    """Determinant energy from spin integrals (``h2[p,q,r,s] / 2`` multiplies a+p a+q a_r a_s)."""
    occ = [p for p, b in enumerate(s.hf_occupation()) if b]
    e = s.e_const + sum(s.h1[p, p] for p in occ)
    for p in occ:
        for q in occ:
            if p != q:
                e += 0.5 * (s.h2[p, q, q, p] - s.h2[p, q, p, q])
    return float(e)


def hf_expectation(f: FermionOperator, occupation: Sequence[int]) -> float:
    """``<HF|f|HF>`` through the dense oracle (small systems only)."""
    v = basis_state(occupation)
    return float(np.real(np.vdot(v, dense_fermion(f) @ v)))
