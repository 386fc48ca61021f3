"""Regenerate the STO-3G FCIDUMP fixtures under tests/data with PySCF.

Development-time helper only; the package itself never imports pyscf.

    python tools/make_fcidumps.py [--out tests/data] [--only CH4 H2]
"""

import argparse
import json
import math
import pathlib

from pyscf import gto, scf
from pyscf.tools import fcidump

ANGSTROM_PER_BOHR = 0.529177210903


def _ch4_bond() -> float:
    # Td bond length (Angstrom) whose nuclear repulsion is 13.408333940368452 Ha
    target = 13.408333940368452
    lo, hi = 1.5, 3.0
    f = lambda r: 24.0 / r + 6.0 / (r * math.sqrt(8.0 / 3.0)) - target  # noqa: E731
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi) * ANGSTROM_PER_BOHR


def _ch4() -> str:
    a = _ch4_bond() / math.sqrt(3.0)
    return (
        f"C 0 0 0; H {a} {a} {a}; H {-a} {-a} {a}; H {-a} {a} {-a}; H {a} {-a} {-a}"
    )


def _ch3f_geometry(r_cf, r_ch=1.095, hcf_deg=108.9) -> str:
    t = math.radians(180.0 - hcf_deg)
    rho = r_ch * math.sin(t)
    zh = -r_ch * math.cos(t)
    atoms = ["C 0 0 0", f"F 0 0 {r_cf}"]
    for k in range(3):
        phi = 2.0 * math.pi * k / 3.0
        atoms.append(f"H {rho * math.cos(phi)} {rho * math.sin(phi)} {zh}")
    return "; ".join(atoms)


def _ch3f() -> str:
    # C3v frame with standard C-H geometry; C-F bond chosen to give V_NN = 37.83061899847712 Ha
    from scipy.optimize import brentq

    target = 37.83061899847712

    def vnn(r_cf):
        mol = gto.M(atom=_ch3f_geometry(r_cf), basis="sto-3g", unit="Angstrom", verbose=0)
        return mol.energy_nuc() - target

    return _ch3f_geometry(brentq(vnn, 1.2, 1.5, xtol=1e-14))


# (geometry, heavy atoms with Z >= 3)
MOLECULES = {
    "H2": ("H 0 0 0; H 0 0 0.735", 0),
    "LiH": ("Li 0 0 0; H 0 0 1.595", 1),
    "HF": ("H 0 0 0; F 0 0 0.917", 1),
    "BeH2": ("Be 0 0 0; H 0 0 1.326; H 0 0 -1.326", 1),
    "H2O": ("O 0 0 0.1173; H 0 0.7572 -0.4692; H 0 -0.7572 -0.4692", 1),
    "N2": ("N 0 0 0; N 0 0 1.098", 2),
    "CO": ("C 0 0 0; O 0 0 1.128", 2),
    "NH3": (
        "N 0 0 0; H 0 0.9377 -0.3816; H 0.8121 -0.4689 -0.3816; H -0.8121 -0.4689 -0.3816",
        1,
    ),
    "CH4": (_ch4(), 1),
    "CH3F": (_ch3f(), 2),
    "C2H2": ("C 0 0 0.6013; C 0 0 -0.6013; H 0 0 1.6644; H 0 0 -1.6644", 2),
    "H2O2": (
        "O 0 0.7375 -0.0528; O 0 -0.7375 -0.0528; H 0.8190 0.8170 0.4220; H -0.8190 -0.8170 0.4220",
        2,
    ),
    "C2H4": (
        "C 0 0 0.6695; C 0 0 -0.6695; H 0 0.9289 1.2321; H 0 -0.9289 1.2321; "
        "H 0 0.9289 -1.2321; H 0 -0.9289 -1.2321",
        2,
    ),
}


def generate(name: str, out: pathlib.Path, symmetry: bool) -> dict:
    geom, heavy = MOLECULES[name]
    mol = gto.M(atom=geom, basis="sto-3g", unit="Angstrom", symmetry=symmetry, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    e_hf = mf.kernel()
    path = out / f"{name}.FCIDUMP"
    fcidump.from_scf(mf, str(path), tol=1e-15)
    info = {
        "label": name,
        "geometry": geom,
        "heavy_atoms": heavy,
        "e_hf": e_hf,
        "e_nuc": mol.energy_nuc(),
        "n_spatial": mol.nao,
        "n_electrons": mol.nelectron,
    }
    if name in ("H2", "LiH", "H2O"):
        from pyscf import fci

        info["e_fci"] = fci.FCI(mf).kernel()[0]
    return info


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="tests/data")
    ap.add_argument("--only", nargs="*")
    ap.add_argument("--symmetry", action="store_true", help="symmetry-adapted orbitals")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = args.only or list(MOLECULES)
    meta_path = out / "reference.json"
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    for name in names:
        meta[name] = generate(name, out, symmetry=args.symmetry)
        print(name, meta[name]["e_hf"], meta[name]["n_spatial"])
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
