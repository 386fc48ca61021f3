"""Second-quantized fermionic operators, the molecular Hamiltonian and UCCSD generators.

A term key is a tuple of ``(mode, dagger)`` pairs read left to right, so
``((3, 1), (0, 0))`` is ``a+_3 a_0``.  Canonical (normal-ordered) keys put every
creation operator left of every annihilation operator, each group sorted by
strictly decreasing mode.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError
from .integrals import SpinIntegralSet

CUTOFF = 1e-12

Key = tuple[tuple[int, int], ...]

_TOKEN_RE = re.compile(r"^(\d+)(\^?)$")


@dataclass(frozen=True)
class LadderOp:
    mode: int
    dagger: bool

    def as_pair(self) -> tuple[int, int]:
        return (self.mode, int(self.dagger))


def parse_term(text: str) -> Key:
    """Parse ``"3^ 1^ 2 0"`` style notation (``^`` marks a creation operator)."""
    ops = []
    for tok in text.split():
        match = _TOKEN_RE.match(tok)
        if match is None:
            raise ValidationError(f"bad ladder-operator token {tok!r}")
        ops.append((int(match.group(1)), 1 if match.group(2) else 0))
    return tuple(ops)


def format_term(key: Key) -> str:
    return " ".join(f"{p}^" if d else f"{p}" for p, d in key)


class FermionOperator:
    """Weighted sum of ladder-operator strings on ``n_modes`` spin orbitals."""

    __slots__ = ("n_modes", "terms")

    def __init__(self, n_modes: int, terms: Mapping[Key, complex] | None = None):
        self.n_modes = n_modes
        self.terms: dict[Key, complex] = {}
        for key, c in (terms or {}).items():
            key = tuple((int(p), int(d)) for p, d in key)
            for p, _ in key:
                if not 0 <= p < n_modes:
                    raise ValidationError(f"mode {p} out of range for {n_modes} modes")
            self.terms[key] = self.terms.get(key, 0) + complex(c)

    @classmethod
    def from_string(cls, n_modes: int, text: str, coeff: complex = 1.0) -> FermionOperator:
        return cls(n_modes, {parse_term(text): coeff})

    @classmethod
    def identity(cls, n_modes: int, coeff: complex = 1.0) -> FermionOperator:
        return cls(n_modes, {(): coeff})

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def n_body_terms(self) -> int:
        """Number of terms excluding the scalar (identity) term."""
        return sum(1 for k in self.terms if k)

    def constant(self) -> complex:
        return self.terms.get((), 0j)

    def _check(self, other: FermionOperator) -> None:
        if self.n_modes != other.n_modes:
            raise ValidationError(f"mode count mismatch: {self.n_modes} vs {other.n_modes}")

    def __add__(self, other: FermionOperator) -> FermionOperator:
        self._check(other)
        out = FermionOperator(self.n_modes, self.terms)
        for k, c in other.terms.items():
            out.terms[k] = out.terms.get(k, 0) + c
        return out

    def __sub__(self, other: FermionOperator) -> FermionOperator:
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            self._check(other)
            out: dict[Key, complex] = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    key = k1 + k2
                    out[key] = out.get(key, 0) + c1 * c2
            return FermionOperator(self.n_modes, out)
        c = complex(other)
        return FermionOperator(self.n_modes, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def adjoint(self) -> FermionOperator:
        out = {}
        for key, c in self.terms.items():
            adj = tuple((p, 1 - d) for p, d in reversed(key))
            out[adj] = out.get(adj, 0) + c.conjugate()
        return FermionOperator(self.n_modes, out)

    def is_normal_ordered(self) -> bool:
        return all(_is_canonical(k) for k in self.terms)

    def allclose(self, other: FermionOperator, atol: float = 1e-10) -> bool:
        a = normal_order(self).terms
        b = normal_order(other).terms
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= atol for k in set(a) | set(b))

    def __repr__(self) -> str:
        items = list(self.terms.items())[:5]
        body = " + ".join(f"({c:.6g}) [{format_term(k)}]" for k, c in items)
        more = "" if len(self) <= 5 else f" + ... ({len(self)} terms)"
        return f"FermionOperator({self.n_modes}, {body}{more})"


def _is_canonical(key: Key) -> bool:
    k = 0
    while k < len(key) and key[k][1]:
        k += 1
    if any(d for _, d in key[k:]):
        return False
    cre = [p for p, _ in key[:k]]
    ann = [p for p, _ in key[k:]]
    return all(a > b for a, b in zip(cre, cre[1:])) and all(a > b for a, b in zip(ann, ann[1:]))


def _normal_order_term(ops: list, coeff: complex, out: dict) -> None:
    ops = list(ops)
    for i in range(1, len(ops)):
        for j in range(i, 0, -1):
            right = ops[j]
            left = ops[j - 1]
            if right[1] and not left[1]:
                ops[j - 1], ops[j] = right, left
                coeff = -coeff
                if right[0] == left[0]:
                    # a_p a+_p = 1 - a+_p a_p
                    _normal_order_term(ops[: j - 1] + ops[j + 1 :], -coeff, out)
            elif right[1] == left[1]:
                if right[0] == left[0]:
                    return
                if right[0] > left[0]:
                    ops[j - 1], ops[j] = right, left
                    coeff = -coeff
    key = tuple(ops)
    out[key] = out.get(key, 0) + coeff


def normal_order(f: FermionOperator, cutoff: float = CUTOFF) -> FermionOperator:
    """Rewrite ``f`` with creations left of annihilations using the CAR.

    Like terms are merged and coefficients below ``cutoff`` dropped.
    """
    out: dict[Key, complex] = {}
    for key, c in f.terms.items():
        if _is_canonical(key):
            out[key] = out.get(key, 0) + c
        else:
            _normal_order_term(list(key), c, out)
    result = FermionOperator(f.n_modes)
    result.terms = {k: c for k, c in out.items() if abs(c) >= cutoff}
    return result


def hamiltonian_literal(s: SpinIntegralSet) -> FermionOperator:
    """The unsimplified sum of one- and two-body strings, before normal ordering.

    Intended for small systems (it enumerates every nonzero tensor entry).
    """
    terms: dict[Key, complex] = {}
    if s.e_const:
        terms[()] = s.e_const
    for p, q in zip(*np.nonzero(s.h1)):
        terms[((int(p), 1), (int(q), 0))] = s.h1[p, q]
    for p, q, r, t in zip(*np.nonzero(s.h2)):
        key = ((int(p), 1), (int(q), 1), (int(r), 0), (int(t), 0))
        terms[key] = terms.get(key, 0) + 0.5 * s.h2[p, q, r, t]
    return FermionOperator(s.m, terms)


def build_hamiltonian(s: SpinIntegralSet, cutoff: float = CUTOFF) -> FermionOperator:
    """Normal-ordered molecular Hamiltonian from spin-orbital integrals.

    Equivalent to ``normal_order(hamiltonian_literal(s))`` but vectorized: the
    four orderings of each index pair are merged by antisymmetrizing the tensor.
    """
    m = s.m
    terms: dict[Key, complex] = {}
    if abs(s.e_const) >= cutoff:
        terms[()] = complex(s.e_const)
    h1 = s.h1
    for p, q in zip(*np.nonzero(np.abs(h1) >= cutoff)):
        terms[((int(p), 1), (int(q), 0))] = complex(h1[p, q])

    h2 = s.h2
    anti = h2 - h2.transpose(1, 0, 2, 3) - h2.transpose(0, 1, 3, 2) + h2.transpose(1, 0, 3, 2)
    anti *= 0.5
    upper = np.tril(np.ones((m, m), dtype=bool), k=-1)
    mask = upper[:, :, None, None] & upper[None, None, :, :] & (np.abs(anti) >= cutoff)
    idx = np.nonzero(mask)
    vals = anti[idx]
    for p, q, r, t, v in zip(*(a.tolist() for a in idx), vals.tolist()):
        terms[((p, 1), (q, 1), (r, 0), (t, 0))] = complex(v)
    op = FermionOperator(m)
    op.terms = terms
    return op


@dataclass(frozen=True)
class Excitation:
    """``occ -> virt`` excitation with its amplitude slot; singles have one index each."""

    occ: tuple[int, ...]
    virt: tuple[int, ...]
    slot: int

    @property
    def rank(self) -> int:
        return len(self.occ)


@dataclass(frozen=True)
class ExcitationList:
    singles: tuple[Excitation, ...]
    doubles: tuple[Excitation, ...]
    n_modes: int

    @property
    def n_params(self) -> int:
        return len(self.singles) + len(self.doubles)

    def __iter__(self):
        yield from self.singles
        yield from self.doubles

    def __len__(self) -> int:
        return self.n_params


def uccsd_excitations(n_alpha: int, n_beta: int, m: int) -> ExcitationList:
    """Spin-conserving singles and doubles relative to the blocked HF determinant.

    Order: alpha singles, beta singles, alpha-alpha doubles, beta-beta doubles,
    then mixed alpha-beta doubles.  Slots are assigned in that order.
    """
    if m % 2:
        raise ValidationError("blocked spin ordering needs an even mode count")
    n = m // 2
    if n_alpha + n_beta > m or n_alpha > n or n_beta > n or min(n_alpha, n_beta) < 0:
        raise ValidationError(f"cannot place {n_alpha}+{n_beta} electrons in {m} modes")
    occ_a = list(range(n_alpha))
    vir_a = list(range(n_alpha, n))
    occ_b = list(range(n, n + n_beta))
    vir_b = list(range(n + n_beta, m))

    singles_idx = [(i, a) for i in occ_a for a in vir_a]
    singles_idx += [(i, a) for i in occ_b for a in vir_b]
    doubles_idx = []
    for occ, vir in ((occ_a, vir_a), (occ_b, vir_b)):
        for i, j in combinations(occ, 2):
            for a, b in combinations(vir, 2):
                doubles_idx.append((i, j, a, b))
    for i in occ_a:
        for a in vir_a:
            for j in occ_b:
                for b in vir_b:
                    doubles_idx.append((i, j, a, b))

    singles = tuple(Excitation((i,), (a,), k) for k, (i, a) in enumerate(singles_idx))
    off = len(singles)
    doubles = tuple(
        Excitation((i, j), (a, b), off + k) for k, (i, j, a, b) in enumerate(doubles_idx)
    )
    return ExcitationList(singles, doubles, m)


def closed_shell_param_count(n_occ: int, n_virt: int) -> int:
    """Closed-form UCCSD parameter count for ``n_occ`` occupied / ``n_virt`` virtual spatial orbitals."""
    ov = n_occ * n_virt
    return 2 * ov + 2 * comb(n_occ, 2) * comb(n_virt, 2) + ov * ov


def excitation_generator(e: Excitation | Iterable, n_modes: int) -> FermionOperator:
    """Anti-Hermitian generator ``T - T+`` of one excitation, normal ordered."""
    if not isinstance(e, Excitation):
        idx = tuple(e)
        half = len(idx) // 2
        e = Excitation(idx[:half], idx[half:], 0)
    idx = e.occ + e.virt
    if e.rank not in (1, 2) or len(e.virt) != e.rank:
        raise ValidationError(f"unsupported excitation {e}")
    if len(set(idx)) != len(idx):
        raise ValidationError(f"excitation indices collide: {idx}")
    if any(not 0 <= p < n_modes for p in idx):
        raise ValidationError(f"excitation {idx} out of range for {n_modes} modes")
    if e.rank == 1:
        (i,), (a,) = e.occ, e.virt
        t = ((a, 1), (i, 0))
    else:
        (i, j), (a, b) = e.occ, e.virt
        t = ((a, 1), (b, 1), (j, 0), (i, 0))
    op = FermionOperator(n_modes, {t: 1.0})
    return normal_order(op - op.adjoint())


def number_operator(n_modes: int, modes: Iterable[int] | None = None) -> FermionOperator:
    modes = range(n_modes) if modes is None else modes
    return FermionOperator(n_modes, {((p, 1), (p, 0)): 1.0 for p in modes})
