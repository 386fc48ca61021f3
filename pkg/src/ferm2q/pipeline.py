"""End-to-end workflow: integrals -> Hamiltonian -> qubit operator -> UCCSD circuit -> report.

:func:`run` executes one configuration; :func:`sweep` executes the cross
product of molecules, mappings and reduction combinations listed in a TOML
manifest and returns one flat row per cell.
"""

from __future__ import annotations

import csv
import io
import json
import os
import pathlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import circuit as circ
from . import mapping as mp
from . import oracle, pauli, taper
from .errors import Ferm2QError, StageError, SymmetryViolationError, ValidationError
from .fermion import build_hamiltonian, excitation_generator, uccsd_excitations
from .integrals import SpatialIntegralSet, freeze_core, read_fcidump, spatial_to_spin

SCHEMA_VERSION = 1
CORE_ORBITAL_ENERGY = -2.0  # Hartree; Fock diagonals below this count as core for "auto"
COMBOS = ("-", "F", "T", "TF")


@dataclass(frozen=True)
class RunConfig:
    fcidump: str
    mapping: mp.MappingScheme = mp.MappingScheme.JW
    frozen_core: int | str = 0
    taper: bool = False
    sector: tuple[int, ...] | None = None
    heavy_atoms: int | None = None
    emit: str = "json"
    dump_circuit: str | None = None
    verify: bool = False
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "mapping", mp.MappingScheme.parse(self.mapping))
        fc = self.frozen_core
        if isinstance(fc, str):
            if fc.strip().lower() == "auto":
                fc = "auto"
            else:
                try:
                    fc = int(fc)
                except ValueError:
                    raise ValidationError(f"frozen core must be an integer or 'auto', got {fc!r}") from None
        if fc != "auto" and (not isinstance(fc, int) or fc < 0):
            raise ValidationError(f"frozen core count must be >= 0, got {fc!r}")
        object.__setattr__(self, "frozen_core", fc)
        if self.emit not in ("json", "csv"):
            raise ValidationError(f"emit must be json or csv, got {self.emit!r}")
        if self.heavy_atoms is not None and self.heavy_atoms < 0:
            raise ValidationError("heavy atom count must be >= 0")

    @property
    def combo(self) -> str:
        f = self.frozen_core == "auto" or self.frozen_core > 0
        tag = ("T" if self.taper else "") + ("F" if f else "")
        return tag or "-"


def auto_core_count(s: SpatialIntegralSet, heavy_atoms: int | None = None) -> int:
    """Core orbitals to freeze: one per heavy atom if given, else Fock diagonals below -2 Ha."""
    n_docc = min(s.n_alpha, s.n_beta)
    if heavy_atoms is not None:
        return min(heavy_atoms, n_docc)
    g = s.h2
    occ_a, occ_b = range(s.n_alpha), range(s.n_beta)
    count = 0
    for p in range(n_docc):
        f = s.h1[p, p]
        f += sum(g[p, p, i, i] - g[p, i, i, p] for i in occ_a)
        f += sum(g[p, p, i, i] for i in occ_b)
        if f < CORE_ORBITAL_ENERGY:
            count += 1
    return count


@dataclass
class ResourceReport:
    label: str
    fcidump: str
    mapping: str
    frozen_core: int
    tapered: bool
    n_spin_orbitals: int
    n_qubits: int
    n_params: int
    n_excitations: int
    n_excitations_discarded: int
    n_symmetries: int
    sector: list
    reference: str
    e_const: float
    e_hf: float
    n_integral_terms: int
    n_fermion_terms: int
    pauli: dict
    circuit: dict
    cx_pre_peephole: int
    verification: dict | None = None
    notes: list = field(default_factory=list)

    @property
    def combo(self) -> str:
        tag = ("T" if self.tapered else "") + ("F" if self.frozen_core else "")
        return tag or "-"

    def as_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        for k, v in self.__dict__.items():
            out[k] = v
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def csv_row(self) -> dict:
        c = self.circuit
        counts = c["gate_counts"]
        p = self.pauli
        return {
            "label": self.label,
            "mapping": self.mapping,
            "combo": self.combo,
            "status": "ok",
            "error": "",
            "frozen_core": self.frozen_core,
            "tapered": int(self.tapered),
            "n_spin_orbitals": self.n_spin_orbitals,
            "n_qubits": self.n_qubits,
            "n_params": self.n_params,
            "n_excitations_discarded": self.n_excitations_discarded,
            "n_symmetries": self.n_symmetries,
            "n_pauli_strings": p["n_strings"],
            "pct_x": p["pct_x"],
            "pct_y": p["pct_y"],
            "pct_z": p["pct_z"],
            "pct_id": p["pct_id"],
            "depth": c["depth"],
            "total_gates": c["total_gates"],
            "single_qubit_gates": c["single_qubit_gates"],
            "two_qubit_gates": c["two_qubit_gates"],
            "cx": counts.get("CX", 0),
            "rz": counts.get("RZ", 0),
            "sx": counts.get("SX", 0),
            "x": counts.get("X", 0),
            "e_const": repr(self.e_const),
        }


CSV_FIELDS = list(
    ResourceReport(
        "", "", "", 0, False, 0, 0, 0, 0, 0, 0, [], "", 0.0, 0.0, 0, 0,
        {"n_strings": 0, "pct_x": 0, "pct_y": 0, "pct_z": 0, "pct_id": 0},
        {"gate_counts": {}, "depth": 0, "total_gates": 0, "single_qubit_gates": 0, "two_qubit_gates": 0},
        0,
    ).csv_row()
)


def error_row(label: str, mapping: str, combo: str, err: Exception) -> dict:
    row = {k: "" for k in CSV_FIELDS}
    row.update(label=label, mapping=mapping, combo=combo, status="error", error=str(err))
    return row


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (Ferm2QError, ValueError, OSError) as exc:
        raise StageError(name, exc) from exc


# ansatz --------------------------------------------------------------------------


@dataclass
class Ansatz:
    circuit: circ.Circuit
    n_excitations: int
    n_discarded: int
    cx_pre_peephole: int


def _generator_terms(g: pauli.PauliSum, slot: int) -> list:
    """``exp(theta G)`` with ``G = sum i b_k P_k`` is ``prod exp(-i (-b_k theta) P_k)``."""
    items = []
    for term, c in g:
        if abs(c.real) > 1e-10:
            raise SymmetryViolationError("mapped excitation generator is not anti-Hermitian")
        items.append((term, circ.Param(slot, -c.imag)))
    return items


def build_ansatz(
    n_alpha: int,
    n_beta: int,
    m: int,
    scheme: mp.MappingScheme,
    table: mp.LadderTable,
    reference: Sequence[int],
    basis: taper.SymmetryBasis | None = None,
) -> Ansatz:
    """Reference preparation followed by one Trotter step of every UCCSD generator.

    Generators are emitted in excitation order with their Pauli terms in
    canonical order.  With a symmetry basis, generators that anticommute with a
    symmetry are dropped (their amplitudes vanish in the reference sector).
    """
    excitations = uccsd_excitations(n_alpha, n_beta, m)
    items = []
    discarded = 0
    slot = 0
    for exc in excitations:
        g = mp.map_operator(excitation_generator(exc, m), scheme, table)
        if scheme is mp.MappingScheme.PARITY:
            g = mp.parity_reduce(g, n_alpha, n_beta)
        if basis is not None and basis.k:
            kind = taper.classify(g, basis)
            if kind == "anticommutes":
                discarded += 1
                continue
            if kind == "mixed":
                raise SymmetryViolationError(
                    f"excitation {exc.occ}->{exc.virt} partially breaks a Z2 symmetry"
                )
            g = taper.taper_transform(g, basis)
        if not len(g):
            discarded += 1
            continue
        items.extend(_generator_terms(g, slot))
        slot += 1
    body = circ.synth_pauli_evolution(items, n_qubits=len(reference), n_params=slot)
    full = circ.prepare_reference(reference).compose(body)
    full.n_params = slot
    return Ansatz(full, len(excitations), discarded, circ.expected_cx_count(items))


# single run ----------------------------------------------------------------------


@dataclass
class RunResult:
    report: ResourceReport
    hamiltonian: pauli.PauliSum
    circuit: circ.Circuit
    transpiled: circ.Circuit
    reference: list


def _load(config: RunConfig) -> SpatialIntegralSet:
    return _stage("parse", read_fcidump, config.fcidump)


def run_full(config: RunConfig, spatial: SpatialIntegralSet | None = None, tables: dict | None = None) -> RunResult:
    """Run every stage and keep the intermediate objects."""
    s = spatial if spatial is not None else _load(config)
    tables = {} if tables is None else tables
    n_frozen = config.frozen_core
    if n_frozen == "auto":
        n_frozen = _stage("freeze", auto_core_count, s, config.heavy_atoms)
    active = _stage("freeze", freeze_core, s, n_frozen)
    spin = _stage("hamiltonian", spatial_to_spin, active)
    e_hf = oracle.hf_energy_spin(spin)
    ferm = _stage("hamiltonian", build_hamiltonian, spin)
    n_integrals = int(np.count_nonzero(spin.h1) + np.count_nonzero(spin.h2))

    scheme = config.mapping
    m = spin.m
    key = (scheme, m)
    if key not in tables:
        tables[key] = _stage("map", mp.LadderTable, scheme, m)
    table = tables[key]
    qubit_h = _stage("map", mp.map_operator, ferm, scheme, table)
    ref = mp.encode_state(spin.hf_occupation(), scheme)
    if scheme is mp.MappingScheme.PARITY:
        qubit_h = _stage("map", mp.parity_reduce, qubit_h, spin.n_alpha, spin.n_beta)
        ref = mp.parity_reduce_reference(ref)

    basis = None
    if config.taper:
        basis = _stage("taper", taper.build_basis, qubit_h, ref, config.sector)
        qubit_h = _stage("taper", taper.taper_transform, qubit_h, basis)
        ref = taper.taper_reference(ref, basis)

    ans = _stage(
        "ansatz", build_ansatz, spin.n_alpha, spin.n_beta, m, scheme, table, ref, basis
    )
    transpiled = _stage("transpile", circ.transpile, ans.circuit)
    metrics = circ.metrics(transpiled)
    stats = _stage("census", pauli.stats, qubit_h)

    report = ResourceReport(
        label=config.label or pathlib.Path(config.fcidump).stem,
        fcidump=str(config.fcidump),
        mapping=scheme.value,
        frozen_core=int(n_frozen),
        tapered=bool(config.taper),
        n_spin_orbitals=m,
        n_qubits=qubit_h.n_qubits,
        n_params=ans.circuit.n_params,
        n_excitations=ans.n_excitations,
        n_excitations_discarded=ans.n_discarded,
        n_symmetries=basis.k if basis else 0,
        sector=list(basis.sector) if basis else [],
        reference="".join(str(b) for b in ref),
        e_const=float(qubit_h.coeff(pauli.PauliTerm.identity(qubit_h.n_qubits)).real),
        e_hf=e_hf,
        n_integral_terms=n_integrals,
        n_fermion_terms=len(ferm),
        pauli=stats.as_dict(),
        circuit=metrics.as_dict(),
        cx_pre_peephole=ans.cx_pre_peephole,
        notes=list(transpiled.notes),
    )
    if config.verify:
        report.verification = _stage("verify", verify, ferm, qubit_h, ref, e_hf, spin)
    if config.dump_circuit:
        pathlib.Path(config.dump_circuit).write_text(circ.dump_circuit(transpiled))
    return RunResult(report, qubit_h, ans.circuit, transpiled, ref)


def run(config: RunConfig) -> ResourceReport:
    return run_full(config).report


def verify(ferm, qubit_h: pauli.PauliSum, ref: Sequence[int], e_hf: float, spin) -> dict:
    """Dense cross-checks for small systems; skipped above the oracle size limit."""
    out: dict = {}
    if qubit_h.n_qubits > 10 or spin.m > 10:
        return {"status": "skipped", "reason": "system too large for the dense oracle"}
    d = oracle.dense_pauli(qubit_h)
    v = oracle.basis_state(ref)
    e_ref = float(np.real(np.vdot(v, d @ v)))
    out["reference_energy"] = e_ref
    out["reference_energy_matches_hf"] = bool(abs(e_ref - e_hf) < 1e-8)
    full = oracle.dense_fermion(ferm)
    sector = oracle.number_sector_indices(spin.m, spin.n_alpha, spin.n_beta)
    e_fermion = float(oracle.sector_spectrum(full, sector)[0])
    e_qubit = float(oracle.spectrum(d)[0])
    out["ground_energy_fermion_sector"] = e_fermion
    out["ground_energy_qubit"] = e_qubit
    out["ground_energy_matches"] = bool(abs(e_fermion - e_qubit) < 1e-8)
    out["status"] = "ok" if out["reference_energy_matches_hf"] and out["ground_energy_matches"] else "failed"
    return out


# sweeps --------------------------------------------------------------------------


@dataclass(frozen=True)
class Molecule:
    label: str
    fcidump: str
    frozen_core: int | str = "auto"
    heavy_atoms: int | None = None


@dataclass(frozen=True)
class SweepManifest:
    molecules: tuple[Molecule, ...]
    mappings: tuple[mp.MappingScheme, ...] = tuple(mp.MappingScheme)
    combos: tuple[str, ...] = COMBOS

    def __post_init__(self):
        labels = [mol.label for mol in self.molecules]
        if len(set(labels)) != len(labels):
            raise ValidationError("molecule labels in a manifest must be unique")
        for c in self.combos:
            if c not in COMBOS:
                raise ValidationError(f"unknown reduction combo {c!r}; expected one of {COMBOS}")


def _toml_loads(text: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"manifest is not valid TOML: {exc}") from None


def load_manifest(path) -> SweepManifest:
    path = pathlib.Path(path)
    data = _toml_loads(path.read_text())
    base = path.parent
    mols = []
    for entry in data.get("molecule", []):
        if "label" not in entry or "fcidump" not in entry:
            raise ValidationError("each [[molecule]] needs label and fcidump")
        fcid = pathlib.Path(entry["fcidump"])
        if not fcid.is_absolute():
            fcid = base / fcid
        mols.append(
            Molecule(
                label=str(entry["label"]),
                fcidump=str(fcid),
                frozen_core=entry.get("frozen_core", "auto"),
                heavy_atoms=entry.get("heavy_atoms"),
            )
        )
    if not mols:
        raise ValidationError("manifest lists no molecules")
    mappings = tuple(mp.MappingScheme.parse(v) for v in data.get("mappings", ["jw", "bk", "parity"]))
    combos = tuple(data.get("combos", COMBOS))
    return SweepManifest(tuple(mols), mappings, combos)


def _combo_config(mol: Molecule, scheme: mp.MappingScheme, combo: str) -> RunConfig:
    return RunConfig(
        fcidump=mol.fcidump,
        mapping=scheme,
        frozen_core=mol.frozen_core if "F" in combo else 0,
        taper="T" in combo,
        heavy_atoms=mol.heavy_atoms,
        label=mol.label,
    )


def _sweep_molecule(mol: Molecule, mappings, combos) -> list[dict]:
    rows = []
    try:
        spatial = read_fcidump(mol.fcidump)
    except (Ferm2QError, ValueError, OSError) as exc:
        err = StageError("parse", exc)
        return [error_row(mol.label, s.value, c, err) for s in mappings for c in combos]
    tables: dict = {}
    for scheme in mappings:
        for combo in combos:
            try:
                cfg = _combo_config(mol, scheme, combo)
                row = run_full(cfg, spatial, tables).report.csv_row()
                # "auto" may freeze nothing; keep the requested cell name
                row["combo"] = combo
                rows.append(row)
            except (Ferm2QError, ValueError) as exc:
                rows.append(error_row(mol.label, scheme.value, combo, exc))
    return rows


def sweep(manifest: SweepManifest, jobs: int = 1) -> list[dict]:
    """Rows in manifest order: molecule, then mapping, then combo."""
    args = [(mol, manifest.mappings, manifest.combos) for mol in manifest.molecules]
    if jobs <= 1:
        chunks = [_sweep_molecule(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_molecule, *zip(*args)))
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def report_to_csv(report: ResourceReport) -> str:
    return rows_to_csv([report.csv_row()])


def default_jobs() -> int:
    return max(1, min(8, os.cpu_count() or 1))
