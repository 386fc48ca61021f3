"""Z2 symmetry discovery and qubit tapering.

Symmetries are found as the GF(2) kernel of the symplectic check matrix of a
Hamiltonian.  Only the Z-type part of that kernel is used: such generators are
diagonal on computational states, so the physical sector follows directly from
the encoded reference.  Each generator ``S`` with pivot ``p`` is rotated onto
``X_p`` by the Clifford ``U = (X_p + S)/sqrt(2)``; ``X_p`` is then replaced by
its eigenvalue and qubit ``p`` is deleted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import SymmetryViolationError, ValidationError
from .mapping import bits_to_int, delete_qubits
from .pauli import CUTOFF, PauliSum, PauliSumBuilder, PauliTerm, phase_exponent

_PHASES = (1, 1j, -1, -1j)


def _rref(rows: Iterable[int], n_cols: int, col_order: Sequence[int] | None = None) -> list[int]:
    """Reduced row echelon form of GF(2) row bitsets; pivots taken in ``col_order``."""
    rows = [r for r in rows if r]
    order = range(n_cols) if col_order is None else col_order
    out: list[int] = []
    for col in order:
        bit = 1 << col
        piv = next((i for i, r in enumerate(rows) if r & bit), None)
        if piv is None:
            continue
        prow = rows.pop(piv)
        rows = [r ^ prow if r & bit else r for r in rows]
        out = [r ^ prow if r & bit else r for r in out]
        out.append(prow)
        rows = [r for r in rows if r]
    return out


def _kernel(rows: list[int], n_cols: int) -> list[int]:
    """Basis of ``{v : popcount(r & v) even for every row r}``."""
    reduced = _rref(rows, n_cols)
    pivots = {}
    for r in reduced:
        lead = (r & -r).bit_length() - 1
        pivots[lead] = r
    basis = []
    for free in range(n_cols):
        if free in pivots:
            continue
        v = 1 << free
        for lead, r in pivots.items():
            if (r >> free) & 1:
                v |= 1 << lead
        basis.append(v)
    return basis


def symmetry_kernel(h: PauliSum) -> list[PauliTerm]:
    """Full symplectic kernel (X/Y-containing elements included), in reduced row-echelon form.

    Bits ``0..n-1`` of a kernel vector are its x part and ``n..2n-1`` its z part;
    a term ``(x_t, z_t)`` therefore enters the check matrix as ``z_t | x_t << n``.
    Columns are eliminated x part first, so the Z-type elements sit in the
    trailing rows.
    """
    n = h.n_qubits
    rows = [z | (x << n) for (x, z) in h.terms if x or z]
    basis = _kernel(rows, 2 * n)
    order = list(range(n)) + list(range(n, 2 * n))
    reduced = _rref(basis, 2 * n, order)
    mask = (1 << n) - 1
    return [PauliTerm(v & mask, v >> n, n) for v in reduced]


def find_symmetries(h: PauliSum) -> list[PauliTerm]:
    """Z-type generators commuting with every term, in reduced row-echelon form.

    The returned list is ordered by pivot (lowest Z-support qubit) and each
    pivot qubit appears in exactly one generator.
    """
    n = h.n_qubits
    # a Z-type s commutes with (x_t, z_t) iff popcount(x_t & s) is even
    rows = list({x for (x, _z) in h.terms if x})
    basis = _rref(_kernel(rows, n), n)
    basis.sort(key=lambda v: (v & -v))
    return [PauliTerm(0, z, n) for z in basis]


@dataclass(frozen=True)
class SymmetryBasis:
    generators: tuple[PauliTerm, ...]
    pivots: tuple[int, ...]
    sector: tuple[int, ...]
    n_qubits: int

    def __post_init__(self):
        k = len(self.generators)
        if len(self.pivots) != k or len(self.sector) != k:
            raise ValidationError("generators, pivots and sector must have equal length")
        if len(set(self.pivots)) != k:
            raise ValidationError("pivot qubits must be distinct")
        for v in self.sector:
            if v not in (1, -1):
                raise ValidationError(f"sector eigenvalues must be +1 or -1, got {v}")
        for j, (g, p) in enumerate(zip(self.generators, self.pivots)):
            if g.x:
                raise ValidationError("generators must be Z-type")
            for i, q in enumerate(self.pivots):
                hit = (g.z >> q) & 1
                if hit != (i == j):
                    raise ValidationError(
                        f"generator {j} must act on its own pivot {p} and on no other pivot"
                    )

    @property
    def k(self) -> int:
        return len(self.generators)

    def with_sector(self, sector: Sequence[int]) -> SymmetryBasis:
        return SymmetryBasis(self.generators, self.pivots, tuple(int(v) for v in sector), self.n_qubits)


def pivot_qubits(gens: Sequence[PauliTerm]) -> tuple[int, ...]:
    """Lowest Z-support qubit of each generator; generators must be in reduced row-echelon form."""
    pivots = []
    for g in gens:
        if g.x or not g.z:
            raise ValidationError("pivot selection needs nonidentity Z-type generators")
        pivots.append((g.z & -g.z).bit_length() - 1)
    return tuple(pivots)


def select_sector(gens: Sequence[PauliTerm], reference: Sequence[int]) -> tuple[int, ...]:
    """Eigenvalue of each generator on a computational reference state."""
    ref = bits_to_int(reference)
    out = []
    for g in gens:
        if g.x:
            raise ValidationError(
                "generator has X/Y support; sectors are read from Z-type generators only"
            )
        if g.n_qubits != len(reference):
            raise ValidationError("reference length differs from generator width")
        out.append(-1 if (g.z & ref).bit_count() % 2 else 1)
    return tuple(out)


def parse_sector(text: str) -> tuple[int, ...]:
    """``"+1,-1,1"`` -> ``(1, -1, 1)``."""
    vals = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            v = int(tok)
        except ValueError:
            raise ValidationError(f"bad sector entry {tok!r}") from None
        if v not in (1, -1):
            raise ValidationError(f"sector entries must be +1 or -1, got {tok!r}")
        vals.append(v)
    return tuple(vals)


def build_basis(
    h: PauliSum, reference: Sequence[int] | None = None, sector: Sequence[int] | None = None
) -> SymmetryBasis:
    """Discover symmetries of ``h`` and fix the sector from ``reference`` or an explicit list."""
    gens = find_symmetries(h)
    pivots = pivot_qubits(gens)
    if sector is None:
        sector = select_sector(gens, reference) if reference is not None else (1,) * len(gens)
    elif len(sector) != len(gens):
        raise ValidationError(f"sector has {len(sector)} entries but {len(gens)} symmetries were found")
    return SymmetryBasis(tuple(gens), pivots, tuple(sector), h.n_qubits)


def commutes_with_basis(s: PauliSum, basis: SymmetryBasis) -> bool:
    for x, _z in s.terms:
        for g in basis.generators:
            if (x & g.z).bit_count() % 2:
                return False
    return True


def classify(s: PauliSum, basis: SymmetryBasis) -> str:
    """``"commutes"``, ``"anticommutes"`` (every term flips some generator) or ``"mixed"``."""
    flags = set()
    for g in basis.generators:
        anti = [(x & g.z).bit_count() % 2 for x, _z in s.terms]
        if any(anti):
            flags.add("mixed" if not all(anti) else "anticommutes")
    if "mixed" in flags:
        return "mixed"
    return "anticommutes" if flags else "commutes"


def taper_transform(h: PauliSum, basis: SymmetryBasis, cutoff: float = CUTOFF) -> PauliSum:
    """Rotate each generator onto its pivot X, fix the eigenvalue and delete the pivots."""
    if basis.n_qubits != h.n_qubits:
        raise ValidationError("symmetry basis width differs from operator width")
    if not basis.k:
        return h
    gens = [(g.z, p, s) for g, p, s in zip(basis.generators, basis.pivots, basis.sector)]
    out = PauliSumBuilder(h.n_qubits - basis.k)
    for (x, z), c in h.terms.items():
        for gz, p, sval in gens:
            if (x & gz).bit_count() % 2:
                raise SymmetryViolationError("term anticommutes with a symmetry generator")
            if (z >> p) & 1:
                # U P U = P S X_p
                k = phase_exponent(x, z, 0, gz)
                x, z = x, z ^ gz
                c = c * _PHASES[k]
                k = phase_exponent(x, z, 1 << p, 0)
                x ^= 1 << p
                c = c * _PHASES[k]
            if (z >> p) & 1:
                raise SymmetryViolationError(f"rotated term has Y/Z on pivot {p}")
            if (x >> p) & 1:
                c = c * sval
        x, z = delete_qubits(x, z, basis.pivots)
        out.add(x, z, c)
    return out.build(cutoff=cutoff)


def taper_reference(reference: Sequence[int], basis: SymmetryBasis) -> list[int]:
    drop = set(basis.pivots)
    return [b for q, b in enumerate(reference) if q not in drop]


def all_sectors(basis: SymmetryBasis):
    for sector in itertools.product((1, -1), repeat=basis.k):
        yield basis.with_sector(sector)
