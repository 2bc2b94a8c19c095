"""Microtubule, centriole, axoneme and axon-bundle dipole lattices.

Every builder starts from one tubulin-dimer unit cell and applies rigid
motions only. Rotations "in the yz plane" are right-handed about +x::

    y' = y cos(t) - z sin(t)
    z' = y sin(t) + z cos(t)

Lengths in the builder parameters are nm; lattice coordinates are Angstrom,
matching the unit-cell file. Multi-MT lattices are MT-major: each
microtubule occupies one contiguous block whose internal order is
spiral-major, dimer-minor, unit-cell order innermost.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .unitcell import Dipole, UnitCell, format_rows, parse_rows

NM = 10.0  # Angstrom per nm

SPIRAL_PITCH_NM = 8.0
DIMERS_PER_SPIRAL = 13
ALIGN_ANGLE_DEG = -55.38
DIMER_TILT_DEG = 11.7
DIMER_SHIFT_Z_NM = 0.3
MT_RADIUS_SHIFT_NM = 11.2
DIMER_STEP_ANGLE_DEG = -27.69
DIMER_STEP_X_NM = 0.9
PIVOT_LABEL = "B:346"

CENTRIOLE_TRIPLET_NM = ((87.0, -22.5167), (100.0, 0.0), (113.0, 22.5167))
CENTRIOLE_STEP_DEG = 40.0
AXONEME_RADIUS_NM = 98.0
AXONEME_PAIR_NM = 26.0
BUNDLE_SPACING_NM = 50.0
HEXAGONAL_COUNTS = (1, 7, 19, 37, 61, 91, 127, 169, 217)


class GeometryKind(str, enum.Enum):
    MICROTUBULE = "mt"
    CENTRIOLE = "centriole"
    AXONEME = "axoneme"
    BUNDLE = "bundle"


@dataclass(frozen=True)
class GeometrySpec:
    kind: GeometryKind
    n_spirals: int
    n_mt: int | None = None

    def as_dict(self):
        out = {"kind": self.kind.value, "n_spirals": self.n_spirals}
        if self.n_mt is not None:
            out["n_mt"] = self.n_mt
        return out


@dataclass
class DipoleLattice:
    positions: np.ndarray  # (N, 3) Angstrom
    orientations: np.ndarray  # (N, 3) unit vectors
    spec: GeometrySpec
    mu_squared: float = 181224.0
    mt_centers_nm: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=float).reshape(-1, 3)
        self.orientations = np.ascontiguousarray(self.orientations, dtype=float).reshape(-1, 3)
        if self.positions.shape != self.orientations.shape:
            raise DomainError("positions and orientations differ in length")

    def __len__(self):
        return self.positions.shape[0]

    @property
    def length_nm(self) -> float:
        return self.spec.n_spirals * SPIRAL_PITCH_NM

    @property
    def n_mt(self) -> int:
        return max(1, self.mt_centers_nm.shape[0])

    @property
    def dipoles(self) -> list:
        return [Dipole(p, u, self.mu_squared) for p, u in zip(self.positions, self.orientations)]

    def transformed(self, rotation: np.ndarray, translation=(0.0, 0.0, 0.0)) -> DipoleLattice:
        """Apply one global rigid motion ``x -> R x + t``."""
        rotation = np.asarray(rotation, dtype=float)
        return DipoleLattice(
            self.positions @ rotation.T + np.asarray(translation, dtype=float),
            self.orientations @ rotation.T,
            self.spec,
            self.mu_squared,
            self.mt_centers_nm.copy(),
        )


def rotation_x(angle_deg: float) -> np.ndarray:
    t = math.radians(angle_deg)
    c, s = math.cos(t), math.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _check_spirals(n_spirals):
    if int(n_spirals) != n_spirals or n_spirals < 1:
        raise DomainError(f"n_spirals must be a positive integer, got {n_spirals!r}")
    return int(n_spirals)


def pivot_index(cell: UnitCell, label: str = PIVOT_LABEL) -> int:
    residues = cell.source.get("residues") if cell.source else None
    if not residues or label not in residues:
        raise DomainError(
            f"unit cell has no residue {label!r}; pass pivot_index explicitly"
        )
    return residues.index(label)


def placed_dimer(cell: UnitCell, pivot: int | None = None):
    """Dimer after the alignment, tilt and shift steps, before spiral replication."""
    if pivot is None:
        pivot = pivot_index(cell)
    pos = cell.positions
    ori = cell.orientations
    if not 0 <= pivot < len(pos):
        raise DomainError(f"pivot index {pivot} out of range for a {len(pos)}-dipole cell")
    align = rotation_x(ALIGN_ANGLE_DEG)
    pos = pos @ align.T
    ori = ori @ align.T
    tilt = rotation_x(DIMER_TILT_DEG)
    center = pos[pivot].copy()
    pos = (pos - center) @ tilt.T + center
    ori = ori @ tilt.T
    pos = pos + np.array([0.0, MT_RADIUS_SHIFT_NM * NM, DIMER_SHIFT_Z_NM * NM])
    return pos, ori


def _microtubule_arrays(cell: UnitCell, n_spirals: int, pivot: int | None):
    pos0, ori0 = placed_dimer(cell, pivot)
    n_cell = len(pos0)
    pos_blocks, ori_blocks = [], []
    for d in range(DIMERS_PER_SPIRAL):
        rot = rotation_x(d * DIMER_STEP_ANGLE_DEG)
        pos_blocks.append(pos0 @ rot.T + np.array([d * DIMER_STEP_X_NM * NM, 0.0, 0.0]))
        ori_blocks.append(ori0 @ rot.T)
    spiral_pos = np.concatenate(pos_blocks)
    spiral_ori = np.concatenate(ori_blocks)
    shifts = np.arange(n_spirals, dtype=float)[:, None, None] * np.array([SPIRAL_PITCH_NM * NM, 0.0, 0.0])
    positions = (spiral_pos[None, :, :] + shifts).reshape(-1, 3)
    orientations = np.broadcast_to(spiral_ori, (n_spirals,) + spiral_ori.shape).reshape(-1, 3)
    assert positions.shape[0] == n_spirals * DIMERS_PER_SPIRAL * n_cell
    return positions, orientations.copy()


def build_microtubule(cell: UnitCell, n_spirals: int, pivot: int | None = None) -> DipoleLattice:
    n_spirals = _check_spirals(n_spirals)
    pos, ori = _microtubule_arrays(cell, n_spirals, pivot)
    return DipoleLattice(
        pos, ori, GeometrySpec(GeometryKind.MICROTUBULE, n_spirals), cell.mu_squared, np.zeros((1, 2))
    )


def _assemble_mts(cell, n_spirals, pivot, placements, spec):
    """Copies of one MT, each translated to (y, z) then rotated by ``angle`` about x.

    ``placements`` is a sequence of ``((y_nm, z_nm), angle_deg)``.
    """
    base_pos, base_ori = _microtubule_arrays(cell, n_spirals, pivot)
    pos_blocks, ori_blocks, centers = [], [], []
    for (y, z), angle in placements:
        rot = rotation_x(angle)
        shifted = base_pos + np.array([0.0, y * NM, z * NM])
        pos_blocks.append(shifted @ rot.T)
        ori_blocks.append(base_ori @ rot.T)
        centers.append(rot[1:, 1:] @ np.array([y, z]))
    return DipoleLattice(
        np.concatenate(pos_blocks),
        np.concatenate(ori_blocks),
        spec,
        cell.mu_squared,
        np.array(centers, dtype=float),
    )


def build_centriole(cell: UnitCell, n_spirals: int, pivot: int | None = None) -> DipoleLattice:
    """Nine MT triplets, the first centred 100 nm along +y, replicated every 40 degrees."""
    n_spirals = _check_spirals(n_spirals)
    placements = [
        (center, k * CENTRIOLE_STEP_DEG) for k in range(9) for center in CENTRIOLE_TRIPLET_NM
    ]
    return _assemble_mts(cell, n_spirals, pivot, placements, GeometrySpec(GeometryKind.CENTRIOLE, n_spirals))


def build_axoneme(cell: UnitCell, n_spirals: int, pivot: int | None = None) -> DipoleLattice:
    """Idealized 9+1 axoneme of MT pairs.

    The central pair straddles the origin along y. Each outer pair is centred
    at 98 nm and split tangentially (along z before its 40-degree rotation).
    """
    n_spirals = _check_spirals(n_spirals)
    half = AXONEME_PAIR_NM / 2
    placements = [((-half, 0.0), 0.0), ((half, 0.0), 0.0)]
    for k in range(9):
        placements.append(((AXONEME_RADIUS_NM, -half), k * CENTRIOLE_STEP_DEG))
        placements.append(((AXONEME_RADIUS_NM, half), k * CENTRIOLE_STEP_DEG))
    return _assemble_mts(cell, n_spirals, pivot, placements, GeometrySpec(GeometryKind.AXONEME, n_spirals))


def hexagonal_centers(n_mt: int, spacing: float = BUNDLE_SPACING_NM) -> np.ndarray:
    """Triangular-lattice points filled ring by ring around the origin."""
    if n_mt not in HEXAGONAL_COUNTS:
        raise DomainError(f"n_mt={n_mt} is not a centred hexagonal number {HEXAGONAL_COUNTS}")
    rings = HEXAGONAL_COUNTS.index(n_mt)
    dirs = [
        np.array([math.cos(math.radians(60 * i)), math.sin(math.radians(60 * i))]) * spacing
        for i in range(6)
    ]
    centers = [np.zeros(2)]
    for k in range(1, rings + 1):
        p = k * dirs[4]
        for i in range(6):
            for _ in range(k):
                centers.append(p.copy())
                p = p + dirs[i]
    return np.array(centers)


def build_bundle(cell: UnitCell, n_mt: int, n_spirals: int, pivot: int | None = None) -> DipoleLattice:
    n_spirals = _check_spirals(n_spirals)
    centers = hexagonal_centers(n_mt)
    placements = [((y, z), 0.0) for y, z in centers]
    return _assemble_mts(
        cell, n_spirals, pivot, placements, GeometrySpec(GeometryKind.BUNDLE, n_spirals, n_mt)
    )


def expected_count(kind: GeometryKind, n_spirals: int, n_mt: int | None = None, cell_size: int = 8) -> int:
    per_mt = cell_size * DIMERS_PER_SPIRAL * n_spirals
    kind = GeometryKind(kind)
    if kind is GeometryKind.MICROTUBULE:
        return per_mt
    if kind is GeometryKind.CENTRIOLE:
        return 27 * per_mt
    if kind is GeometryKind.AXONEME:
        return 20 * per_mt
    return n_mt * per_mt


def build(kind, cell: UnitCell, n_spirals: int, n_mt: int | None = None, pivot: int | None = None) -> DipoleLattice:
    kind = GeometryKind(kind)
    if kind is GeometryKind.MICROTUBULE:
        return build_microtubule(cell, n_spirals, pivot)
    if kind is GeometryKind.CENTRIOLE:
        return build_centriole(cell, n_spirals, pivot)
    if kind is GeometryKind.AXONEME:
        return build_axoneme(cell, n_spirals, pivot)
    if n_mt is None:
        raise DomainError("bundle geometry needs n_mt")
    return build_bundle(cell, n_mt, n_spirals, pivot)


# --------------------------------------------------------------------------- export


def format_lattice(lattice: DipoleLattice) -> str:
    spec = lattice.spec
    header = f"# lattice v1 kind={spec.kind.value} n_spirals={spec.n_spirals}"
    if spec.n_mt is not None:
        header += f" n_mt={spec.n_mt}"
    return header + "\n" + format_rows(lattice.positions, lattice.orientations)


def write_lattice(lattice: DipoleLattice, destination) -> None:
    from .io import atomic_write_text

    atomic_write_text(destination, format_lattice(lattice))


def parse_lattice(text: str, mu_squared: float = 181224.0) -> DipoleLattice:
    from .errors import FormatError
    from .unitcell import _header_value

    lines = text.splitlines()
    if not lines:
        raise FormatError("empty lattice file", 1)
    fields = _header_value(lines[0].rstrip(), "# lattice v1")
    try:
        spec = GeometrySpec(
            GeometryKind(fields["kind"]),
            int(fields["n_spirals"]),
            int(fields["n_mt"]) if "n_mt" in fields else None,
        )
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad lattice header: {exc}", 1) from None
    rows = parse_rows(lines[1:], 2)
    data = np.array([values for _, values in rows], dtype=float).reshape(-1, 6)
    return DipoleLattice(data[:, :3], data[:, 3:], spec, mu_squared)
