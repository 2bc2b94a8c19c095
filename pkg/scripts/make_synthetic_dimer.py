"""Generate the synthetic tubulin-dimer structure shipped with trpnet.

The real 1JFF coordinates are not redistributed with the package. This
script writes a stand-in with the same bookkeeping as 1JFF (chain A = alpha,
chain B = beta, four TRP each, beta-TRP346 present) so the full pipeline can
run offline:

* idealized indole rings (regular pentagon + hexagon, 1.40 A bonds),
* ring centres drawn uniformly inside each monomer's box, the dimer axis
  along x (alpha 0-40 A, beta 40-80 A) and centred on the x axis in yz,
* ring orientations from uniformly random rotations,

all from ``numpy.random.default_rng(0)``. Run from the repository root::

    python scripts/make_synthetic_dimer.py

which rewrites ``src/trpnet/data/tubulin_dimer_synthetic.pdb`` and the unit
cell derived from it, ``src/trpnet/data/tubulin_dimer.ucell``.
"""

import math
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from trpnet.unitcell import extract_unit_cell, write_unit_cell

SEED = 0
BOND = 1.40
ALPHA_TRP = (21, 346, 388, 407)
BETA_TRP = (21, 103, 346, 407)
HALF_WIDTH = 18.0  # A, half extent of the monomer box in y and z

DATA = Path(__file__).resolve().parents[1] / "src" / "trpnet" / "data"


def indole_template():
    """Planar ring coordinates (z = 0) with CD2-CE2 on the y axis."""
    h = BOND / 2
    hex_c = BOND * math.sqrt(3) / 2
    apothem = h / math.tan(math.radians(36))
    radius = h / math.sin(math.radians(36))
    cx = -apothem

    def pent(angle):
        a = math.radians(angle)
        return (cx + radius * math.cos(a), radius * math.sin(a))

    atoms = {
        "CD2": (0.0, h),
        "CE2": (0.0, -h),
        "CE3": (hex_c, 2 * h),
        "CZ3": (2 * hex_c, h),
        "CH2": (2 * hex_c, -h),
        "CZ2": (hex_c, -2 * h),
        "CG": pent(108),
        "CD1": pent(180),
        "NE1": pent(-108),
    }
    cg = np.array(atoms["CG"])
    outward = cg - np.array([cx, 0.0])
    atoms["CB"] = tuple(cg + 1.50 * outward / np.linalg.norm(outward))
    atoms["CA"] = tuple(np.array(atoms["CB"]) + np.array([-0.9, 1.2]))
    return {k: np.array([x, y, 0.0]) for k, (x, y) in atoms.items()}


ORDER = ("CA", "CB", "CG", "CD1", "CD2", "NE1", "CE2", "CE3", "CZ2", "CZ3", "CH2")
ELEMENT = {name: name[0] for name in ORDER}


def atom_line(serial, name, resname, chain, resseq, xyz):
    padded = f" {name:<3}" if len(name) < 4 else name
    return (
        f"ATOM  {serial:5d} {padded:4s} {resname:3s} {chain:1s}{resseq:4d}    "
        f"{xyz[0]:8.3f}{xyz[1]:8.3f}{xyz[2]:8.3f}{1.0:6.2f}{20.0:6.2f}          {ELEMENT[name]:>2s}  "
    )


def main():
    rng = np.random.default_rng(SEED)
    template = indole_template()
    centroid = np.mean([template[k] for k in ORDER[2:]], axis=0)
    lines = [
        "HEADER    SYNTHETIC TUBULIN DIMER STAND-IN (NOT 1JFF)",
        "REMARK   1 GENERATED BY scripts/make_synthetic_dimer.py, SEED 0",
    ]
    serial = 1
    for chain, residues, x0 in (("A", ALPHA_TRP, 0.0), ("B", BETA_TRP, 40.0)):
        for resseq in residues:
            center = np.array(
                [x0 + rng.uniform(5.0, 35.0), rng.uniform(-HALF_WIDTH, HALF_WIDTH), rng.uniform(-HALF_WIDTH, HALF_WIDTH)]
            )
            rot = Rotation.random(random_state=rng)
            for name in ORDER:
                xyz = rot.apply(template[name] - centroid) + center
                lines.append(atom_line(serial, name, "TRP", chain, resseq, xyz))
                serial += 1
            # a neighbouring non-TRP residue the parser must ignore
            lines.append(atom_line(serial, "CA", "ALA", chain, resseq + 1, center + np.array([3.8, 0.0, 0.0])))
            serial += 1
        lines.append(f"TER   {serial:5d}      TRP {chain}{residues[-1]:4d}")
        serial += 1
    lines.append("HETATM    1  O   HOH A 901       0.000   0.000   0.000  1.00 20.00           O  ")
    lines.append("END")
    text = "\n".join(lines) + "\n"
    pdb_path = DATA / "tubulin_dimer_synthetic.pdb"
    pdb_path.write_text(text, encoding="utf-8")
    cell, report = extract_unit_cell(text, label="tubulin_dimer")
    assert len(cell) == 8 and not report.warnings
    write_unit_cell(cell, DATA / "tubulin_dimer.ucell")
    print(f"wrote {pdb_path} and {len(cell)}-dipole unit cell")


if __name__ == "__main__":
    main()
