"""Gate-list circuit IR, Pauli-evolution synthesis, transpilation and resource metrics.

Gate kinds: ``X``, ``SX``, ``SXdg``, ``H``, ``RZ`` and ``CX``.  ``RZ(phi)`` is
``exp(-i phi Z / 2)``.  An RZ angle is either a float (bound) or a :class:`Param`
``scale * theta[slot]`` (symbolic).  The transpiled basis is {CX, RZ, SX, X}.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import ValidationError
from .pauli import PauliTerm

ONE_QUBIT = frozenset({"X", "SX", "SXdg", "H", "RZ"})
TWO_QUBIT = frozenset({"CX"})
BASIS = ("CX", "RZ", "SX", "X")
TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12


class Param(NamedTuple):
    """Symbolic angle ``scale * theta[slot]``."""

    slot: int
    scale: float = 1.0

    def bind(self, values: Sequence[float]) -> float:
        return self.scale * values[self.slot]

    def __str__(self) -> str:
        if self.scale == 1.0:
            return f"p{self.slot}"
        return f"{self.scale!r}*p{self.slot}"


class Gate(NamedTuple):
    kind: str
    qubits: tuple[int, ...]
    angle: float | Param | None = None

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.angle, Param)


def x(q):
    return Gate("X", (q,))


def sx(q):
    return Gate("SX", (q,))


def sxdg(q):
    return Gate("SXdg", (q,))


def h(q):
    return Gate("H", (q,))


def rz(q, angle):
    return Gate("RZ", (q,), angle)


def cx(c, t):
    return Gate("CX", (c, t))


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    n_params: int = 0
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            self._validate(g)

    def _validate(self, g: Gate) -> None:
        if g.kind in ONE_QUBIT:
            arity = 1
        elif g.kind in TWO_QUBIT:
            arity = 2
        else:
            raise ValidationError(f"unknown gate kind {g.kind!r}")
        if len(g.qubits) != arity:
            raise ValidationError(f"{g.kind} acts on {arity} qubit(s), got {g.qubits}")
        if len(set(g.qubits)) != arity:
            raise ValidationError(f"repeated qubit in {g}")
        if any(not 0 <= q < self.n_qubits for q in g.qubits):
            raise ValidationError(f"{g} outside a {self.n_qubits}-qubit circuit")
        if g.kind == "RZ":
            if g.angle is None:
                raise ValidationError("RZ needs an angle")
            if isinstance(g.angle, Param) and not 0 <= g.angle.slot < self.n_params:
                raise ValidationError(f"parameter slot {g.angle.slot} >= n_params {self.n_params}")

    def append(self, g: Gate) -> None:
        self._validate(g)
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def compose(self, other: Circuit) -> Circuit:
        if other.n_qubits != self.n_qubits:
            raise ValidationError("cannot compose circuits of different widths")
        out = Circuit(self.n_qubits, list(self.gates), max(self.n_params, other.n_params))
        out.gates.extend(other.gates)
        out.notes = self.notes + other.notes
        return out

    def bind(self, values: Sequence[float]) -> Circuit:
        if len(values) < self.n_params:
            raise ValidationError(f"need {self.n_params} parameter values, got {len(values)}")
        gates = [
            Gate(g.kind, g.qubits, g.angle.bind(values)) if g.is_symbolic else g
            for g in self.gates
        ]
        return Circuit(self.n_qubits, gates, 0, list(self.notes))

    def __len__(self) -> int:
        return len(self.gates)


def prepare_reference(ref: Sequence[int]) -> Circuit:
    """One X per set bit of the reference (qubit 0 first)."""
    c = Circuit(len(ref))
    for q, b in enumerate(ref):
        if b:
            c.append(x(q))
    return c


def pauli_evolution_gates(term: PauliTerm, angle: float | Param) -> list[Gate]:
    """Gates for ``exp(-i angle P)``: basis change, CX staircase, RZ(2 angle), mirror."""
    support = term.support
    if not support:
        return []
    pre, post = [], []
    for q in support:
        letter = term.letter(q)
        if letter == "X":
            pre.append(h(q))
            post.append(h(q))
        elif letter == "Y":
            pre.append(sx(q))
            post.append(sxdg(q))
    ladder = [cx(a, b) for a, b in zip(support, support[1:])]
    target = support[-1]
    if isinstance(angle, Param):
        phi = Param(angle.slot, 2.0 * angle.scale)
    else:
        phi = 2.0 * angle
    return pre + ladder + [rz(target, phi)] + ladder[::-1] + post


def synth_pauli_evolution(
    terms: Iterable[tuple[PauliTerm, float | Param]],
    n_qubits: int | None = None,
    n_params: int = 0,
) -> Circuit:
    """Product of ``exp(-i a_k P_k)`` in the given order (first term applied first)."""
    terms = list(terms)
    if n_qubits is None:
        if not terms:
            raise ValidationError("cannot infer width from an empty term list")
        n_qubits = terms[0][0].n_qubits
    slots = [a.slot for _, a in terms if isinstance(a, Param)]
    n_params = max([n_params] + [s + 1 for s in slots])
    c = Circuit(n_qubits, n_params=n_params)
    for term, angle in terms:
        if term.n_qubits != n_qubits:
            raise ValidationError("term width differs from circuit width")
        if term.is_identity():
            c.notes.append(f"global phase exp(-i*({angle})) from identity term omitted")
            continue
        c.gates.extend(pauli_evolution_gates(term, angle))
    return c


def expected_cx_count(terms: Iterable[tuple[PauliTerm, object]]) -> int:
    return sum(2 * (t.weight - 1) for t, _ in terms if t.weight)


# transpilation ----------------------------------------------------------------

_INVERSE_PAIRS = {("H", "H"), ("X", "X"), ("SX", "SXdg"), ("SXdg", "SX")}


def _norm_angle(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    return a


def _is_zero_angle(a: float) -> bool:
    r = _norm_angle(a)
    return r < ANGLE_TOL or TWO_PI - r < ANGLE_TOL


def _peephole_pass(gates: list[Gate], n_qubits: int) -> tuple[list[Gate], bool]:
    out: list[Gate | None] = []
    stacks: list[list[int]] = [[] for _ in range(n_qubits)]
    changed = False

    def top(q):
        st = stacks[q]
        return st[-1] if st else -1

    def pop_gate(idx):
        g = out[idx]
        for q in g.qubits:
            stacks[q].pop()
        out[idx] = None

    for g in gates:
        if g.kind == "CX":
            c, t = g.qubits
            i = top(c)
            if i >= 0 and i == top(t) and out[i] == g:
                pop_gate(i)
                changed = True
                continue
        elif g.kind == "RZ":
            q = g.qubits[0]
            if not g.is_symbolic and _is_zero_angle(g.angle):
                changed = True
                continue
            i = top(q)
            if i >= 0 and not g.is_symbolic:
                prev = out[i]
                if prev.kind == "RZ" and not prev.is_symbolic:
                    merged = _norm_angle(prev.angle + g.angle)
                    changed = True
                    if _is_zero_angle(merged):
                        pop_gate(i)
                    else:
                        out[i] = Gate("RZ", (q,), merged)
                    continue
        else:
            q = g.qubits[0]
            i = top(q)
            if i >= 0:
                prev = out[i]
                if (prev.kind, g.kind) in _INVERSE_PAIRS:
                    pop_gate(i)
                    changed = True
                    continue
                if prev.kind == "SX" and g.kind == "SX":
                    out[i] = Gate("X", (q,))
                    changed = True
                    continue
        idx = len(out)
        out.append(g)
        for q in g.qubits:
            stacks[q].append(idx)
    return [g for g in out if g is not None], changed


def peephole(c: Circuit) -> Circuit:
    """Cancel adjacent inverse pairs and merge bound RZ rotations until nothing changes."""
    gates = list(c.gates)
    changed = True
    while changed:
        gates, changed = _peephole_pass(gates, c.n_qubits)
    return Circuit(c.n_qubits, gates, c.n_params, list(c.notes))


def _translate(g: Gate) -> list[Gate]:
    q = g.qubits[0] if g.kind != "CX" else None
    if g.kind == "H":
        return [rz(q, math.pi / 2), sx(q), rz(q, math.pi / 2)]
    if g.kind == "SXdg":
        return [rz(q, math.pi), sx(q), rz(q, math.pi)]
    return [g]


def transpile(c: Circuit) -> Circuit:
    """Rewrite into {CX, RZ, SX, X}; equal to the input up to a global phase."""
    pre = peephole(c)
    basis = []
    for g in pre.gates:
        basis.extend(_translate(g))
    return peephole(Circuit(c.n_qubits, basis, c.n_params, list(c.notes)))


# metrics ------------------------------------------------------------------------


@dataclass(frozen=True)
class CircuitMetrics:
    n_qubits: int
    n_params: int
    depth: int
    total_gates: int
    single_qubit_gates: int
    two_qubit_gates: int
    gate_counts: dict

    def as_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_params": self.n_params,
            "depth": self.depth,
            "total_gates": self.total_gates,
            "single_qubit_gates": self.single_qubit_gates,
            "two_qubit_gates": self.two_qubit_gates,
            "gate_counts": dict(sorted(self.gate_counts.items())),
        }


def depth(c: Circuit) -> int:
    level = [0] * c.n_qubits
    best = 0
    for g in c.gates:
        d = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = d
        if d > best:
            best = d
    return best


def metrics(c: Circuit) -> CircuitMetrics:
    counts = Counter(g.kind for g in c.gates)
    two = sum(v for k, v in counts.items() if k in TWO_QUBIT)
    total = len(c.gates)
    return CircuitMetrics(
        n_qubits=c.n_qubits,
        n_params=c.n_params,
        depth=depth(c),
        total_gates=total,
        single_qubit_gates=total - two,
        two_qubit_gates=two,
        gate_counts=dict(counts),
    )


# text dump ------------------------------------------------------------------------


def dump_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits} params {c.n_params}"]
    for g in c.gates:
        parts = [g.kind] + [str(q) for q in g.qubits]
        if g.angle is not None:
            parts.append(str(g.angle) if isinstance(g.angle, Param) else repr(float(g.angle)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _parse_angle(tok: str) -> float | Param:
    if "p" in tok:
        if "*" in tok:
            scale, slot = tok.split("*")
            return Param(int(slot[1:]), float(scale))
        return Param(int(tok[1:]), 1.0)
    return float(tok)


def load_circuit(text: str) -> Circuit:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty circuit text")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "qubits" or head[2] != "params":
        raise ValidationError(f"bad circuit header {lines[0]!r}")
    c = Circuit(int(head[1]), n_params=int(head[3]))
    for ln in lines[1:]:
        parts = ln.split()
        kind = parts[0]
        if kind == "CX":
            c.append(cx(int(parts[1]), int(parts[2])))
        elif kind == "RZ":
            c.append(rz(int(parts[1]), _parse_angle(parts[2])))
        else:
            c.append(Gate(kind, (int(parts[1]),)))
    return c
