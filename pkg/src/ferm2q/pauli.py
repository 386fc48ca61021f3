"""Pauli strings in the symplectic (x, z) bit representation and weighted sums of them.

A qubit carries I/X/Y/Z for (x, z) = (0,0)/(1,0)/(1,1)/(0,1).  The bit sets are
plain Python integers, so products and commutation tests are XOR/AND/popcount on
whole words.  The string ``P(x, z)`` always denotes the Hermitian tensor product
of Pauli matrices (Y itself, not XZ); every phase lives in the coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import ValidationError

CUTOFF = 1e-12

_PHASES = (1, 1j, -1, -1j)
_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Return k such that P(x1,z1) P(x2,z2) = i**k P(x1^x2, z1^z2)."""
    x3 = x1 ^ x2
    z3 = z1 ^ z2
    k = (x1 & z1).bit_count() + (x2 & z2).bit_count() - (x3 & z3).bit_count()
    k += 2 * (z1 & x2).bit_count()
    return k % 4


@dataclass(frozen=True)
class PauliTerm:
    """One Pauli string on ``n_qubits`` qubits."""

    x: int
    z: int
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValidationError("negative qubit count")
        if (self.x | self.z) >> self.n_qubits:
            raise ValidationError(
                f"bits set beyond qubit {self.n_qubits - 1} in Pauli term"
            )

    @classmethod
    def identity(cls, n_qubits: int) -> PauliTerm:
        return cls(0, 0, n_qubits)

    @classmethod
    def from_label(cls, label: str) -> PauliTerm:
        """Parse a string over {I,X,Y,Z}; the rightmost character is qubit 0."""
        x = z = 0
        for k, ch in enumerate(reversed(label.upper())):
            try:
                xb, zb = _BITS[ch]
            except KeyError:
                raise ValidationError(f"invalid Pauli letter {ch!r}") from None
            x |= xb << k
            z |= zb << k
        return cls(x, z, len(label))

    @classmethod
    def from_ops(cls, ops: Mapping[int, str], n_qubits: int) -> PauliTerm:
        """Build from a sparse ``{qubit: letter}`` mapping."""
        x = z = 0
        for q, ch in ops.items():
            if not 0 <= q < n_qubits:
                raise ValidationError(f"qubit {q} out of range for {n_qubits} qubits")
            xb, zb = _BITS[ch.upper()]
            x |= xb << q
            z |= zb << q
        return cls(x, z, n_qubits)

    @property
    def label(self) -> str:
        return "".join(
            _LETTERS[(self.x >> q) & 1, (self.z >> q) & 1]
            for q in reversed(range(self.n_qubits))
        )

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> list[int]:
        bits = self.x | self.z
        return [q for q in range(self.n_qubits) if (bits >> q) & 1]

    def letter(self, q: int) -> str:
        return _LETTERS[(self.x >> q) & 1, (self.z >> q) & 1]

    def is_identity(self) -> bool:
        return not (self.x | self.z)

    def __mul__(self, other: PauliTerm) -> tuple[complex, PauliTerm]:
        return mul(self, other)

    def __str__(self) -> str:
        return self.label


def _check_size(a: int, b: int) -> None:
    if a != b:
        raise ValidationError(f"qubit count mismatch: {a} vs {b}")


def mul(a: PauliTerm, b: PauliTerm) -> tuple[complex, PauliTerm]:
    """Product of two Pauli strings as ``(phase, string)`` with phase in {1, i, -1, -i}."""
    _check_size(a.n_qubits, b.n_qubits)
    k = phase_exponent(a.x, a.z, b.x, b.z)
    return _PHASES[k], PauliTerm(a.x ^ b.x, a.z ^ b.z, a.n_qubits)


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """True iff the symplectic inner product of ``a`` and ``b`` is even."""
    _check_size(a.n_qubits, b.n_qubits)
    return not (((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1)


def sort_key(xz: tuple[int, int]) -> tuple[int, int]:
    x, z = xz
    return (z, x)


class PauliSum:
    """Weighted sum of Pauli strings; immutable once constructed.

    ``terms`` maps ``(x, z)`` bit pairs to complex coefficients.  Use
    :class:`PauliSumBuilder` (or the arithmetic operators) to produce new sums.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping[tuple[int, int], complex] | None = None):
        self.n_qubits = n_qubits
        data = {}
        if terms:
            limit = 1 << n_qubits
            for (x, z), c in terms.items():
                if x >= limit or z >= limit or x < 0 or z < 0:
                    raise ValidationError(
                        f"term bits exceed {n_qubits} qubits"
                    )
                data[(x, z)] = complex(c)
        self._terms = data

    @classmethod
    def from_terms(cls, n_qubits: int, pairs: Iterable[tuple[PauliTerm, complex]]) -> PauliSum:
        b = PauliSumBuilder(n_qubits)
        for t, c in pairs:
            b.add_term(t, c)
        return b.build(simplify=False)

    @classmethod
    def from_labels(cls, pairs: Mapping[str, complex] | Iterable[tuple[str, complex]]) -> PauliSum:
        items = list(pairs.items()) if isinstance(pairs, Mapping) else list(pairs)
        if not items:
            raise ValidationError("cannot infer qubit count from an empty label list")
        n = len(items[0][0])
        return cls.from_terms(n, ((PauliTerm.from_label(s), c) for s, c in items))

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {(0, 0): coeff})

    @property
    def terms(self) -> Mapping[tuple[int, int], complex]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[PauliTerm, complex]]:
        """Iterate ``(PauliTerm, coeff)`` pairs in canonical (z, x) order."""
        for xz in sorted(self._terms, key=sort_key):
            yield PauliTerm(xz[0], xz[1], self.n_qubits), self._terms[xz]

    def coeff(self, term: PauliTerm | str) -> complex:
        if isinstance(term, str):
            term = PauliTerm.from_label(term)
        return self._terms.get((term.x, term.z), 0j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def allclose(self, other: PauliSum, atol: float = 1e-10) -> bool:
        if self.n_qubits != other.n_qubits:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(k, 0) - other._terms.get(k, 0)) <= atol for k in keys
        )

    def __add__(self, other: PauliSum) -> PauliSum:
        _check_size(self.n_qubits, other.n_qubits)
        b = PauliSumBuilder(self.n_qubits)
        b.add_sum(self)
        b.add_sum(other)
        return b.build()

    def __sub__(self, other: PauliSum) -> PauliSum:
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            return product(self, other)
        c = complex(other)
        return PauliSum(self.n_qubits, {k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def adjoint(self) -> PauliSum:
        return PauliSum(self.n_qubits, {k: v.conjugate() for k, v in self._terms.items()})

    def is_hermitian(self, atol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= atol for c in self._terms.values())

    def real(self) -> PauliSum:
        """Drop imaginary parts (for sums known to be Hermitian)."""
        return PauliSum(self.n_qubits, {k: complex(v.real) for k, v in self._terms.items()})

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __repr__(self) -> str:
        body = ", ".join(f"{t.label}: {c:.6g}" for t, c in list(self)[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} terms)"
        return f"PauliSum({self.n_qubits}q, {{{body}{more}}})"


class PauliSumBuilder:
    """Mutable accumulator for :class:`PauliSum`."""

    __slots__ = ("n_qubits", "acc")

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.acc: dict[tuple[int, int], complex] = {}

    def add(self, x: int, z: int, c: complex) -> None:
        key = (x, z)
        self.acc[key] = self.acc.get(key, 0) + c

    def add_term(self, t: PauliTerm, c: complex = 1.0) -> None:
        _check_size(self.n_qubits, t.n_qubits)
        self.add(t.x, t.z, c)

    def add_sum(self, s: PauliSum, scale: complex = 1.0) -> None:
        _check_size(self.n_qubits, s.n_qubits)
        acc = self.acc
        for k, c in s.terms.items():
            acc[k] = acc.get(k, 0) + c * scale

    def build(self, simplify: bool = True, cutoff: float = CUTOFF) -> PauliSum:
        if simplify:
            data = {k: c for k, c in self.acc.items() if abs(c) >= cutoff}
        else:
            data = dict(self.acc)
        out = PauliSum(self.n_qubits)
        out._terms = {k: complex(v) for k, v in data.items()}
        return out


def add_scaled(s: PauliSum, c: complex, t: PauliTerm) -> PauliSum:
    """Return ``s + c * t`` without dropping small coefficients."""
    b = PauliSumBuilder(s.n_qubits)
    b.add_sum(s)
    b.add_term(t, c)
    return b.build(simplify=False)


def simplify(s: PauliSum, cutoff: float = CUTOFF) -> PauliSum:
    """Drop coefficients with magnitude below ``cutoff``."""
    out = PauliSum(s.n_qubits)
    out._terms = {k: c for k, c in s.terms.items() if abs(c) >= cutoff}
    return out


def product(a: PauliSum, b: PauliSum) -> PauliSum:
    """Operator product of two sums."""
    _check_size(a.n_qubits, b.n_qubits)
    out = PauliSumBuilder(a.n_qubits)
    acc = out.acc
    for (x1, z1), c1 in a.terms.items():
        for (x2, z2), c2 in b.terms.items():
            k = phase_exponent(x1, z1, x2, z2)
            key = (x1 ^ x2, z1 ^ z2)
            acc[key] = acc.get(key, 0) + _PHASES[k] * c1 * c2
    return out.build()


@dataclass(frozen=True)
class PauliStats:
    n_strings: int
    n_qubits: int
    n_x: int
    n_y: int
    n_z: int
    n_id: int

    @property
    def total_sites(self) -> int:
        return self.n_strings * self.n_qubits

    def percent(self, which: str) -> float:
        count = getattr(self, f"n_{which}")
        return round(100.0 * count / self.total_sites, 2)

    def as_dict(self) -> dict:
        out = {
            "n_strings": self.n_strings,
            "n_x": self.n_x,
            "n_y": self.n_y,
            "n_z": self.n_z,
            "n_id": self.n_id,
        }
        for k in ("x", "y", "z", "id"):
            out[f"pct_{k}"] = self.percent(k)
        return out


def stats(s: PauliSum) -> PauliStats:
    """Census of single-qubit operators across every string of ``s``."""
    if len(s) == 0:
        raise ValidationError("statistics of an empty Pauli sum are undefined")
    n_x = n_y = n_z = 0
    for x, z in s.terms:
        y = x & z
        n_y += y.bit_count()
        n_x += (x & ~z).bit_count()
        n_z += (z & ~x).bit_count()
    n_id = len(s) * s.n_qubits - n_x - n_y - n_z
    return PauliStats(len(s), s.n_qubits, n_x, n_y, n_z, n_id)


def render(s: PauliSum) -> str:
    """One ``coeff label`` line per term in canonical order."""
    lines = []
    for t, c in s:
        if abs(c.imag) < 1e-15:
            lines.append(f"{c.real:+.16e} {t.label}")
        else:
            lines.append(f"({c.real:+.16e}{c.imag:+.16e}j) {t.label}")
    return "\n".join(lines)
