"""Regenerate the bundled FCIDUMP files (requires pyscf; not a runtime dependency)."""

from pathlib import Path

from pyscf import fci, gto, scf
from pyscf.tools import fcidump

DATA = Path(__file__).resolve().parents[1] / "src" / "vqe_bench" / "data"

MOLECULES = {
    "h2_sto3g.fcidump": "H 0 0 0; H 0 0 0.7414",
    "lih_sto3g.fcidump": "Li 0 0 0; H 0 0 1.595",
}


def main() -> None:
    for name, atom in MOLECULES.items():
        mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", verbose=0)
        mf = scf.RHF(mol).run()
        fcidump.from_scf(mf, str(DATA / name), tol=1e-12)
        e_fci = fci.FCI(mf).kernel()[0]
        print(f"{name}: E_HF={mf.e_tot:.10f} E_FCI={e_fci:.10f}")


if __name__ == "__main__":
    main()
