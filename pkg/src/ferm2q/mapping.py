"""Fermion-to-qubit encodings: Jordan-Wigner, Bravyi-Kitaev and parity.

Each encoding is a GF(2) matrix ``E`` taking an occupation vector ``f`` (mode 0
first) to a qubit vector ``q = E f mod 2``.  Ladder operators become two-term
Pauli sums; products are multiplied out in the symplectic representation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SymmetryViolationError, ValidationError
from .fermion import FermionOperator
from .pauli import CUTOFF, PauliSum, PauliSumBuilder, phase_exponent

_PHASES = (1, 1j, -1, -1j)


class MappingScheme(str, enum.Enum):
    JW = "jw"
    BK = "bk"
    PARITY = "parity"

    @classmethod
    def parse(cls, value) -> MappingScheme:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"jordan_wigner": "jw", "bravyi_kitaev": "bk", "pa": "parity", "p": "parity"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValidationError(f"unknown mapping {value!r}; expected jw, bk or parity") from None


# GF(2) helpers ---------------------------------------------------------------


def gf2_inverse(mat: np.ndarray) -> np.ndarray:
    """Inverse of a square 0/1 matrix over GF(2); raises if singular."""
    n = mat.shape[0]
    aug = np.concatenate([mat.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        pivots = np.nonzero(aug[col:, col])[0]
        if len(pivots) == 0:
            raise ValidationError("matrix is singular over GF(2)")
        piv = col + pivots[0]
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        rows = np.nonzero(aug[:, col])[0]
        for r in rows:
            if r != col:
                aug[r] ^= aug[col]
    return aug[:, n:].copy()


def beta_matrix(m: int) -> np.ndarray:
    """Bravyi-Kitaev encoding matrix, truncated from the next power of two."""
    if m < 1:
        raise ValidationError("beta matrix needs m >= 1")
    beta = np.ones((1, 1), dtype=np.uint8)
    while beta.shape[0] < m:
        size = beta.shape[0]
        alpha1 = np.zeros((size, size), dtype=np.uint8)
        alpha1[-1, :] = 1
        top = np.concatenate([beta, np.zeros((size, size), dtype=np.uint8)], axis=1)
        bottom = np.concatenate([alpha1, beta], axis=1)
        beta = np.concatenate([top, bottom], axis=0)
    return beta[:m, :m].copy()


def parity_matrix(m: int) -> np.ndarray:
    """Lower-triangular all-ones matrix: qubit j holds the parity of modes 0..j."""
    if m < 1:
        raise ValidationError("parity matrix needs m >= 1")
    return np.tril(np.ones((m, m), dtype=np.uint8))


def encoding_matrix(scheme: MappingScheme | str, m: int) -> np.ndarray:
    scheme = MappingScheme.parse(scheme)
    if scheme is MappingScheme.JW:
        if m < 1:
            raise ValidationError("encoding needs m >= 1")
        return np.eye(m, dtype=np.uint8)
    if scheme is MappingScheme.BK:
        return beta_matrix(m)
    return parity_matrix(m)


@dataclass(frozen=True)
class BKSets:
    update: tuple[frozenset, ...]
    parity: tuple[frozenset, ...]
    flip: tuple[frozenset, ...]
    remainder: tuple[frozenset, ...]
    rho: tuple[frozenset, ...]

    @property
    def m(self) -> int:
        return len(self.update)


def bk_sets(m: int) -> BKSets:
    """Update, parity, flip, remainder and rho sets of every mode."""
    beta = beta_matrix(m)
    inv = gf2_inverse(beta)
    update, parity, flip, remainder, rho = [], [], [], [], []
    for j in range(m):
        u = frozenset(k for k in range(j + 1, m) if beta[k, j])
        # parity of modes < j, expressed in qubits: columns of inv summed over rows < j
        col_parity = inv[:j].sum(axis=0) % 2 if j else np.zeros(m, dtype=np.uint8)
        p = frozenset(int(k) for k in np.nonzero(col_parity)[0])
        f = frozenset(k for k in range(j) if inv[j, k])
        r = p - f
        update.append(u)
        parity.append(p)
        flip.append(f)
        remainder.append(r)
        rho.append(p if j % 2 == 0 else r)
    return BKSets(tuple(update), tuple(parity), tuple(flip), tuple(remainder), tuple(rho))


def _mask(indices) -> int:
    out = 0
    for k in indices:
        out |= 1 << k
    return out


class LadderTable:
    """Pauli images of every ladder operator for one scheme and mode count.

    ``table[(j, dagger)]`` is a pair of ``(x, z, coeff)`` triples.
    """

    def __init__(self, scheme: MappingScheme | str, m: int):
        self.scheme = MappingScheme.parse(scheme)
        self.m = m
        if m < 1:
            raise ValidationError("need at least one mode")
        self._table = {}
        sets = bk_sets(m) if self.scheme is MappingScheme.BK else None
        for j in range(m):
            bit = 1 << j
            if self.scheme is MappingScheme.JW:
                zx = zy = bit - 1  # Z on 0..j-1 for both halves
                upd = 0
            elif self.scheme is MappingScheme.BK:
                upd = _mask(sets.update[j])
                zx = _mask(sets.parity[j])
                zy = _mask(sets.rho[j])
            else:
                upd = ((1 << m) - 1) ^ ((bit << 1) - 1)
                zx = (bit >> 1) if j else 0
                zy = 0
            x_term = (upd | bit, zx)
            y_term = (upd | bit, zy | bit)
            for dagger in (0, 1):
                sign = -1 if dagger else 1
                self._table[(j, dagger)] = (
                    (x_term[0], x_term[1], 0.5),
                    (y_term[0], y_term[1], sign * 0.5j),
                )
        self._pairs: dict = {}

    def __getitem__(self, op: tuple[int, int]):
        return self._table[op]

    def pair(self, op1: tuple[int, int], op2: tuple[int, int]) -> list:
        """Merged image of the product ``op1 op2``."""
        key = (op1, op2)
        hit = self._pairs.get(key)
        if hit is None:
            acc: dict = {}
            for x1, z1, c1 in self._table[op1]:
                for x2, z2, c2 in self._table[op2]:
                    k = phase_exponent(x1, z1, x2, z2)
                    kk = (x1 ^ x2, z1 ^ z2)
                    acc[kk] = acc.get(kk, 0) + _PHASES[k] * c1 * c2
            hit = [(x, z, c) for (x, z), c in acc.items() if c != 0]
            self._pairs[key] = hit
        return hit


def map_ladder(j: int, dagger: bool, scheme: MappingScheme | str, m: int) -> PauliSum:
    """Pauli image of ``a+_j`` (``dagger=True``) or ``a_j``."""
    if not 0 <= j < m:
        raise ValidationError(f"mode {j} out of range for {m} modes")
    table = LadderTable(scheme, m)
    return PauliSum(m, {(x, z): c for x, z, c in table[(j, int(bool(dagger)))]})


def _accumulate(acc: dict, left: list, right: list, scale: complex) -> None:
    for x1, z1, c1 in left:
        for x2, z2, c2 in right:
            x3 = x1 ^ x2
            z3 = z1 ^ z2
            k = (
                (x1 & z1).bit_count() + (x2 & z2).bit_count() - (x3 & z3).bit_count()
                + 2 * (z1 & x2).bit_count()
            ) & 3
            key = (x3, z3)
            acc[key] = acc.get(key, 0) + _PHASES[k] * c1 * c2 * scale


def map_operator(
    f: FermionOperator,
    scheme: MappingScheme | str,
    table: LadderTable | None = None,
    cutoff: float = CUTOFF,
) -> PauliSum:
    """Substitute every ladder operator by its Pauli image and simplify."""
    m = f.n_modes
    if table is None:
        table = LadderTable(scheme, m)
    elif table.m != m or table.scheme is not MappingScheme.parse(scheme):
        raise ValidationError("ladder table does not match operator/scheme")
    builder = PauliSumBuilder(m)
    acc = builder.acc
    unit = [(0, 0, 1.0)]
    for key, coeff in f.terms.items():
        n = len(key)
        if n == 0:
            acc[(0, 0)] = acc.get((0, 0), 0) + coeff
            continue
        if n == 2:
            for x, z, c in table.pair(key[0], key[1]):
                k2 = (x, z)
                acc[k2] = acc.get(k2, 0) + c * coeff
            continue
        if n == 4:
            _accumulate(acc, table.pair(key[0], key[1]), table.pair(key[2], key[3]), coeff)
            continue
        # generic length: fold pairwise
        cur = unit
        i = 0
        while i < n:
            if i + 1 < n:
                nxt = table.pair(key[i], key[i + 1])
                i += 2
            else:
                nxt = list(table[key[i]])
                i += 1
            tmp: dict = {}
            _accumulate(tmp, cur, nxt, 1.0)
            cur = [(x, z, c) for (x, z), c in tmp.items() if c != 0]
        for x, z, c in cur:
            acc[(x, z)] = acc.get((x, z), 0) + c * coeff
    return builder.build(cutoff=cutoff)


def encode_state(f: Sequence[int], scheme: MappingScheme | str) -> list[int]:
    """Occupation vector (mode 0 first) to qubit vector (qubit 0 first)."""
    occ = np.asarray(f, dtype=np.uint8) % 2
    mat = encoding_matrix(scheme, len(occ))
    return [int(v) for v in (mat.astype(np.int64) @ occ) % 2]


def decode_state(q: Sequence[int], scheme: MappingScheme | str) -> list[int]:
    bits = np.asarray(q, dtype=np.uint8) % 2
    inv = gf2_inverse(encoding_matrix(scheme, len(bits)))
    return [int(v) for v in (inv.astype(np.int64) @ bits) % 2]


def bits_to_int(bits: Sequence[int]) -> int:
    """Qubit/mode 0 is the least-significant bit."""
    out = 0
    for k, b in enumerate(bits):
        if b:
            out |= 1 << k
    return out


def _delete_bit(v: int, q: int) -> int:
    low = v & ((1 << q) - 1)
    return low | ((v >> (q + 1)) << q)


def delete_qubits(x: int, z: int, qubits: Sequence[int]) -> tuple[int, int]:
    for q in sorted(qubits, reverse=True):
        x = _delete_bit(x, q)
        z = _delete_bit(z, q)
    return x, z


def parity_reduced_qubits(m: int) -> tuple[int, int]:
    return (m // 2 - 1, m - 1)


def parity_reduce(s: PauliSum, n_alpha: int, n_beta: int, cutoff: float = CUTOFF) -> PauliSum:
    """Remove the alpha-parity and total-parity qubits of a parity-encoded sum.

    Z on qubit ``m/2 - 1`` becomes ``(-1)**n_alpha`` and Z on qubit ``m - 1``
    becomes ``(-1)**(n_alpha + n_beta)``.  X or Y support on either qubit means
    the operator does not conserve those parities.
    """
    m = s.n_qubits
    if m < 2 or m % 2:
        raise ValidationError("parity reduction needs an even qubit count >= 2")
    qa, qt = parity_reduced_qubits(m)
    eig = {qa: -1 if n_alpha % 2 else 1, qt: -1 if (n_alpha + n_beta) % 2 else 1}
    out = PauliSumBuilder(m - 2)
    for (x, z), c in s.terms.items():
        for q in (qa, qt):
            if (x >> q) & 1:
                raise SymmetryViolationError(
                    f"term has X/Y on reduced qubit {q}; operator breaks spin-sector parity"
                )
            if (z >> q) & 1:
                c = c * eig[q]
        x2, z2 = delete_qubits(x, z, (qa, qt))
        out.add(x2, z2, c)
    return out.build(cutoff=cutoff)


def parity_reduce_reference(bits: Sequence[int]) -> list[int]:
    m = len(bits)
    drop = set(parity_reduced_qubits(m))
    return [b for k, b in enumerate(bits) if k not in drop]
