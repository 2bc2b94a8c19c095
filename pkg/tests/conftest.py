import math

import numpy as np
import pytest

from trpnet.hamiltonian import PhysicalConstants
from trpnet.unitcell import Dipole, load_tubulin_dimer

RING_XY = {
    # planar ring in z = 0 with CG at the origin and NE1 on +x
    "CG": (0.0, 0.0),
    "CD1": (0.55, 0.85),
    "NE1": (1.0, 0.0),
    "CD2": (-0.3, -1.2),
    "CE2": (0.9, -1.3),
    "CE3": (-1.2, -2.2),
    "CZ2": (1.6, -2.4),
    "CZ3": (-0.6, -3.4),
    "CH2": (0.8, -3.5),
}


def ring_atoms(rotation=None, translation=(0.0, 0.0, 0.0)):
    R = np.eye(3) if rotation is None else np.asarray(rotation)
    t = np.asarray(translation, dtype=float)
    return {k: tuple(R @ np.array([x, y, 0.0]) + t) for k, (x, y) in RING_XY.items()}


def atom_line(serial, name, resname, chain, resseq, xyz, alt=" "):
    padded = f" {name:<3}" if len(name) < 4 else name
    return (
        f"ATOM  {serial:5d} {padded:4s}{alt}{resname:3s} {chain:1s}{resseq:4d}    "
        f"{xyz[0]:8.3f}{xyz[1]:8.3f}{xyz[2]:8.3f}{1.0:6.2f}{20.0:6.2f}          {name[0]:>2s}  "
    )


def residue_pdb(atoms, chain="A", resseq=1, start=1):
    return [atom_line(start + i, name, "TRP", chain, resseq, xyz) for i, (name, xyz) in enumerate(atoms.items())]


def parallel_pair(k0r, constants=PhysicalConstants()):
    """Two z-oriented dipoles separated along x by k0 r = ``k0r``."""
    r = k0r / constants.k0
    u = np.array([0.0, 0.0, 1.0])
    return Dipole(np.zeros(3), u), Dipole(np.array([r, 0.0, 0.0]), u)


def random_unit(rng, n=None):
    v = rng.normal(size=(3,) if n is None else (n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@pytest.fixture(scope="session")
def cell():
    return load_tubulin_dimer()


@pytest.fixture(scope="session")
def constants():
    return PhysicalConstants()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def wavelength_angstrom(constants=PhysicalConstants()):
    return 2 * math.pi / constants.k0


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].split(".")[0])):
            terminalreporter.write_line(line)
