#!/usr/bin/env python3
"""Regenerate the STO-3G FCIDUMP files in data/ with pyscf.

    pip install pyscf
    python3 tools/gen_fcidump.py data/
"""
import math
import sys

from pyscf import gto, scf, tools

HARTREE_TO_EV = 27.211386245988


def dump(path, atom):
    mol = gto.M(atom=atom, basis="sto-3g", cart=True, unit="Angstrom")
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    tools.fcidump.from_scf(mf, path, tol=1e-15)
    print(f"{path}: E_RHF = {mf.e_tot * HARTREE_TO_EV:.4f} eV")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data"
    dump(f"{out}/lih_sto3g.fcidump", "Li 0 0 0; H 0 0 1.6")
    half = math.radians(104.5 / 2)
    r = 0.96
    dump(
        f"{out}/h2o_sto3g.fcidump",
        f"O 0 0 0; H 0 {r * math.sin(half)} {r * math.cos(half)}; "
        f"H 0 {-r * math.sin(half)} {r * math.cos(half)}",
    )


if __name__ == "__main__":
    main()
