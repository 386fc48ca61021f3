"""Electronic-structure integrals: FCIDUMP I/O, spin-orbital expansion, frozen core.

Spatial integrals are stored as dense numpy arrays with the two-electron tensor in
chemist notation, ``h2[p, q, r, s] = (pq|rs)``.  Spin-orbital integrals use blocked
ordering (all alpha orbitals, then all beta orbitals) and store the two-electron
tensor as the coefficient of the literal operator string ``a+_p a+_q a_r a_s``::

    H = sum_pq h1[p,q] a+_p a_q + 1/2 sum_pqrs h2[p,q,r,s] a+_p a+_q a_r a_s

which requires ``h2[p,q,r,s] = <pq|sr> = (ps|qr)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConflictError, ParseError, ValidationError

CUTOFF = 1e-12
CONFLICT_TOL = 1e-8

_HEADER_RE = re.compile(r"&FCI\b(.*?)(?:&END|/)", re.IGNORECASE | re.DOTALL)
_KEY_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([^=]*?)(?=,?\s*[A-Za-z_][A-Za-z0-9_]*\s*=|$)", re.DOTALL)


@dataclass(frozen=True, eq=False)
class SpatialIntegralSet:
    """Restricted integrals over spatial orbitals (chemist notation)."""

    n_spatial: int
    n_electrons: int
    spin_z2: int
    e_const: float
    h1: np.ndarray
    h2: np.ndarray
    orbsym: tuple = field(default=())

    def __post_init__(self):
        n = self.n_spatial
        if self.h1.shape != (n, n) or self.h2.shape != (n, n, n, n):
            raise ValidationError(
                f"tensor shapes {self.h1.shape}, {self.h2.shape} do not match n_spatial={n}"
            )
        self.h1.setflags(write=False)
        self.h2.setflags(write=False)

    @property
    def n_alpha(self) -> int:
        return _electron_split(self.n_electrons, self.spin_z2, self.n_spatial)[0]

    @property
    def n_beta(self) -> int:
        return _electron_split(self.n_electrons, self.spin_z2, self.n_spatial)[1]


@dataclass(frozen=True, eq=False)
class SpinIntegralSet:
    """Spin-orbital integrals in blocked ordering; see module docstring for h2 layout."""

    m: int
    n_alpha: int
    n_beta: int
    e_const: float
    h1: np.ndarray
    h2: np.ndarray

    @property
    def n_spatial(self) -> int:
        return self.m // 2

    def hf_occupation(self) -> list[int]:
        """Occupation vector of the lowest-index determinant (mode 0 first)."""
        n = self.n_spatial
        occ = [0] * self.m
        for i in range(self.n_alpha):
            occ[i] = 1
        for i in range(self.n_beta):
            occ[n + i] = 1
        return occ


def _electron_split(n_electrons: int, spin_z2: int, n_spatial: int) -> tuple[int, int]:
    if (n_electrons + spin_z2) % 2:
        raise ValidationError(
            f"NELEC={n_electrons} and MS2={spin_z2} do not give integer spin counts"
        )
    n_alpha = (n_electrons + spin_z2) // 2
    n_beta = n_electrons - n_alpha
    if n_beta < 0 or n_alpha > n_spatial or n_beta > n_spatial:
        raise ValidationError(
            f"{n_alpha} alpha / {n_beta} beta electrons do not fit {n_spatial} orbitals"
        )
    return n_alpha, n_beta


def canonical_pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i >= j else (j, i)


def canonical_quad(p: int, q: int, r: int, s: int) -> tuple[int, int, int, int]:
    """Representative of the 8-fold chemist permutation class of (pq|rs)."""
    a = canonical_pair(p, q)
    b = canonical_pair(r, s)
    return a + b if a >= b else b + a


def chemist_permutations(p: int, q: int, r: int, s: int):
    return {
        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
        (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
    }


def _parse_header(text: str) -> tuple[dict, int]:
    match = _HEADER_RE.search(text)
    if match is None:
        raise ParseError("missing &FCI ... &END namelist header")
    body = match.group(1)
    values = {}
    for key, raw in _KEY_RE.findall(body):
        values[key.upper()] = raw.strip().rstrip(",").strip()
    for key in ("NORB", "NELEC"):
        if key not in values:
            raise ParseError(f"header is missing required key {key}")
    header_lines = text[: match.end()].count("\n") + 1
    return values, header_lines


def _int_field(values: dict, key: str, default=None) -> int:
    if key not in values:
        return default
    try:
        return int(values[key])
    except ValueError:
        raise ParseError(f"header key {key} is not an integer: {values[key]!r}") from None


def parse_fcidump(text: str) -> SpatialIntegralSet:
    """Parse FCIDUMP text into a :class:`SpatialIntegralSet`.

    Indices in the body are 1-based.  An all-zero index line is the scalar
    constant, ``k = l = 0`` marks a one-electron integral, anything else is a
    two-electron integral in chemist notation.  Entries below 1e-12 in magnitude
    are dropped after conflict checking.
    """
    values, first_body_line = _parse_header(text)
    norb = _int_field(values, "NORB")
    nelec = _int_field(values, "NELEC")
    ms2 = _int_field(values, "MS2", 0)
    if norb <= 0:
        raise ParseError(f"NORB must be positive, got {norb}")
    orbsym = ()
    if "ORBSYM" in values:
        orbsym = tuple(int(v) for v in re.split(r"[,\s]+", values["ORBSYM"]) if v)

    match = _HEADER_RE.search(text)
    body = text[match.end():]
    one: dict[tuple[int, int], float] = {}
    two: dict[tuple[int, int, int, int], float] = {}
    e_const = 0.0
    seen_const = False
    for offset, line in enumerate(body.splitlines()):
        lineno = first_body_line + offset
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise ParseError(f"expected 'value i j k l', got {line.strip()!r}", lineno)
        try:
            val = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(x) for x in parts[1:])
        except ValueError:
            raise ParseError(f"cannot parse {line.strip()!r}", lineno) from None
        if any(not 0 <= x <= norb for x in (i, j, k, l)):
            raise ParseError(f"index out of range 0..{norb} in {line.strip()!r}", lineno)
        if i == j == k == l == 0:
            if seen_const and abs(e_const - val) > CONFLICT_TOL:
                raise ConflictError(f"constant redefined ({e_const} vs {val})", lineno)
            e_const = val
            seen_const = True
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                # orbital energies, not used
                continue
            _store(one, canonical_pair(i - 1, j - 1), val, lineno)
        else:
            if 0 in (i, j, k, l):
                raise ParseError(f"zero index inside a two-electron line {line.strip()!r}", lineno)
            _store(two, canonical_quad(i - 1, j - 1, k - 1, l - 1), val, lineno)

    h1 = np.zeros((norb, norb))
    for (p, q), v in one.items():
        if abs(v) >= CUTOFF:
            h1[p, q] = h1[q, p] = v
    h2 = np.zeros((norb,) * 4)
    for key, v in two.items():
        if abs(v) >= CUTOFF:
            for idx in chemist_permutations(*key):
                h2[idx] = v
    return SpatialIntegralSet(norb, nelec, ms2, e_const, h1, h2, orbsym)


def _store(table: dict, key, val: float, lineno: int) -> None:
    old = table.get(key)
    if old is not None and abs(old - val) > CONFLICT_TOL:
        raise ConflictError(f"integral {key} defined twice ({old!r} vs {val!r})", lineno)
    table[key] = val


def read_fcidump(path) -> SpatialIntegralSet:
    with open(path) as fh:
        return parse_fcidump(fh.read())


def dump_fcidump(s: SpatialIntegralSet) -> str:
    """Serialize to FCIDUMP text; every canonical nonzero entry is written once."""
    n = s.n_spatial
    lines = [f"&FCI NORB={n},NELEC={s.n_electrons},MS2={s.spin_z2},"]
    if s.orbsym:
        lines.append("ORBSYM=" + ",".join(str(v) for v in s.orbsym) + ",")
    lines.append("ISYM=1,")
    lines.append("&END")
    for p in range(n):
        for q in range(p + 1):
            for r in range(n):
                for t in range(r + 1):
                    if (p, q) < (r, t):
                        continue
                    v = s.h2[p, q, r, t]
                    if v != 0.0:
                        lines.append(f"{float(v)!r} {p + 1} {q + 1} {r + 1} {t + 1}")
    for p in range(n):
        for q in range(p + 1):
            v = s.h1[p, q]
            if v != 0.0:
                lines.append(f"{float(v)!r} {p + 1} {q + 1} 0 0")
    lines.append(f"{float(s.e_const)!r} 0 0 0 0")
    return "\n".join(lines) + "\n"


def spatial_to_spin(s: SpatialIntegralSet) -> SpinIntegralSet:
    """Expand to spin orbitals in blocked ordering (alpha block first)."""
    n_alpha, n_beta = _electron_split(s.n_electrons, s.spin_z2, s.n_spatial)
    n = s.n_spatial
    m = 2 * n
    h1 = np.zeros((m, m))
    h1[:n, :n] = s.h1
    h1[n:, n:] = s.h1

    # h2[p,q,r,s] = (ps|qr); p,s share electron 1 and q,r electron 2
    phys = s.h2.transpose(0, 2, 3, 1)
    h2 = np.zeros((m, m, m, m))
    for sp1 in (slice(0, n), slice(n, m)):
        for sp2 in (slice(0, n), slice(n, m)):
            h2[sp1, sp2, sp2, sp1] = phys
    return SpinIntegralSet(m, n_alpha, n_beta, float(s.e_const), h1, h2)


def freeze_core(s: SpatialIntegralSet, n_frozen: int) -> SpatialIntegralSet:
    """Fold the ``n_frozen`` lowest spatial orbitals (doubly occupied) into the constant and h1."""
    n_alpha, n_beta = _electron_split(s.n_electrons, s.spin_z2, s.n_spatial)
    if n_frozen < 0:
        raise ValidationError("n_frozen must be non-negative")
    if n_frozen > min(n_alpha, n_beta):
        raise ValidationError(
            f"cannot freeze {n_frozen} orbitals with {n_alpha} alpha / {n_beta} beta electrons"
        )
    if n_frozen == 0:
        return s
    c = slice(0, n_frozen)
    a = slice(n_frozen, s.n_spatial)
    h1, h2 = s.h1, s.h2
    core_j = np.einsum("ccdd->", h2[c, c, c, c])
    core_k = np.einsum("cddc->", h2[c, c, c, c])
    e_core = 2.0 * np.trace(h1[c, c]) + 2.0 * core_j - core_k
    dressed = (
        h1[a, a]
        + 2.0 * np.einsum("pqcc->pq", h2[a, a, c, c])
        - np.einsum("pccq->pq", h2[a, c, c, a])
    )
    dressed = 0.5 * (dressed + dressed.T)
    dressed[np.abs(dressed) < CUTOFF] = 0.0
    orbsym = s.orbsym[n_frozen:] if s.orbsym else ()
    return replace(
        s,
        n_spatial=s.n_spatial - n_frozen,
        n_electrons=s.n_electrons - 2 * n_frozen,
        e_const=float(s.e_const + e_core),
        h1=dressed,
        h2=np.ascontiguousarray(h2[a, a, a, a]),
        orbsym=orbsym,
    )


def spin_blocks(m: int) -> tuple[range, range]:
    n = m // 2
    return range(0, n), range(n, m)


def same_spin(p: int, q: int, m: int) -> bool:
    n = m // 2
    return (p < n) == (q < n)


def iter_nonzero(tensor: np.ndarray):
    """Yield ``(index_tuple, value)`` for nonzero entries in C order."""
    for idx in zip(*np.nonzero(tensor)):
        yield tuple(int(i) for i in idx), float(tensor[idx])


__all__ = [
    "SpatialIntegralSet",
    "SpinIntegralSet",
    "parse_fcidump",
    "read_fcidump",
    "dump_fcidump",
    "spatial_to_spin",
    "freeze_core",
    "canonical_quad",
    "chemist_permutations",
]
