"""Tryptophan extraction from PDB ATOM records and the unit-cell dipole table.

Coordinates are in Angstrom throughout. A unit-cell file looks like::

    # unitcell v1 mu2=181224
    # label: tubulin_dimer
    # source: {"pdb_sha256": "...", "angle_deg": -41.0, ...}
    x y z ux uy uz
    ...

The ``label`` and ``source`` comment lines are optional; every other line
after the header is a data row of six whitespace-separated decimals.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyResultError, FormatError, GeometryError, LookupFailure, ParseError

log = logging.getLogger(__name__)

RING_ATOMS = ("CG", "CD1", "CD2", "NE1", "CE2", "CE3", "CZ2", "CZ3", "CH2")
DEFAULT_MU_SQUARED = 181224.0  # A^3 cm^-1, 6 Debye
DEFAULT_ANGLE_DEG = -41.0
DEFAULT_ANCHOR = "CD2"
PLANARITY_RMS_MAX = 0.1  # A

_UNIT_TOL_READ = 1e-9
_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class TrpResidue:
    residue_id: int
    chain_id: str
    ring_atoms: dict
    insertion_code: str = ""

    def __post_init__(self):
        missing = [name for name in RING_ATOMS if name not in self.ring_atoms]
        if missing:
            raise GeometryError(f"TRP {self.label}: missing ring atoms {missing}")
        rms = ring_planarity_rms(self)
        if rms > PLANARITY_RMS_MAX:
            raise GeometryError(f"TRP {self.label}: ring RMS off-plane {rms:.3f} A > {PLANARITY_RMS_MAX}")

    @property
    def label(self) -> str:
        return f"{self.chain_id}:{self.residue_id}{self.insertion_code}"

    def coords(self, names=RING_ATOMS) -> np.ndarray:
        return np.array([self.ring_atoms[name] for name in names], dtype=float)


@dataclass(frozen=True)
class Dipole:
    position: np.ndarray
    orientation: np.ndarray
    mu_squared: float = DEFAULT_MU_SQUARED

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        ori = np.asarray(self.orientation, dtype=float).reshape(3)
        if not np.all(np.isfinite(pos)):
            raise GeometryError(f"non-finite dipole position {pos}")
        norm = float(np.linalg.norm(ori))
        if abs(norm - 1.0) > _UNIT_TOL:
            raise GeometryError(f"dipole orientation is not unit length (|u| = {norm!r})")
        if not self.mu_squared > 0:
            raise GeometryError("mu_squared must be positive")
        pos.setflags(write=False)
        ori.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", ori)

    def __eq__(self, other):
        if not isinstance(other, Dipole):
            return NotImplemented
        return (
            np.array_equal(self.position, other.position)
            and np.array_equal(self.orientation, other.orientation)
            and self.mu_squared == other.mu_squared
        )

    __hash__ = None


@dataclass
class UnitCell:
    dipoles: list
    label: str = ""
    source: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.dipoles)

    @property
    def positions(self) -> np.ndarray:
        return np.array([d.position for d in self.dipoles], dtype=float).reshape(-1, 3)

    @property
    def orientations(self) -> np.ndarray:
        return np.array([d.orientation for d in self.dipoles], dtype=float).reshape(-1, 3)

    @property
    def mu_squared(self) -> float:
        values = {d.mu_squared for d in self.dipoles}
        if len(values) > 1:
            raise FormatError("unit cell mixes dipole strengths; the file format stores one mu2")
        return values.pop() if values else DEFAULT_MU_SQUARED

    def content_hash(self) -> str:
        """SHA-256 of the canonical file serialization (git-style content address)."""
        return hashlib.sha256(format_unit_cell(self).encode("utf-8")).hexdigest()


# --------------------------------------------------------------------------- PDB


@dataclass
class ParseReport:
    residues: list
    warnings: list = field(default_factory=list)

    @property
    def n_warnings(self) -> int:
        return len(self.warnings)


def _field(line, start, stop):
    return line[start - 1 : stop]


def _parse_atom_line(line: str, lineno: int):
    if len(line) < 54:
        raise ParseError(f"ATOM record has {len(line)} columns, needs at least 54", lineno)
    name = _field(line, 13, 16).strip()
    alt = _field(line, 17, 17).strip()
    resname = _field(line, 18, 20).strip()
    chain = _field(line, 22, 22).strip()
    try:
        resseq = int(_field(line, 23, 26))
    except ValueError:
        raise ParseError(f"residue number {_field(line, 23, 26)!r} is not an integer", lineno) from None
    icode = _field(line, 27, 27).strip()
    xyz = []
    for start, stop, axis in ((31, 38, "x"), (39, 46, "y"), (47, 54, "z")):
        text = _field(line, start, stop)
        try:
            value = float(text)
        except ValueError:
            raise ParseError(f"{axis} coordinate {text!r} is not a number", lineno) from None
        if not math.isfinite(value):
            raise ParseError(f"{axis} coordinate {text!r} is not finite", lineno)
        xyz.append(value)
    return name, alt, resname, chain, resseq, icode, tuple(xyz)


def parse_pdb_trp_report(text: str, chain_filter=None) -> ParseReport:
    """Parse ATOM records and collect complete TRP indole rings.

    Only the first model is read and the first alternate location seen for an
    atom wins. Residues with missing or non-planar rings are skipped and
    recorded in ``warnings``.
    """
    chains = None if chain_filter is None else set(chain_filter)
    order = []
    atoms: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        record = raw[:6]
        if record.startswith("ENDMDL"):
            break
        if record != "ATOM  ":
            continue
        name, _alt, resname, chain, resseq, icode, xyz = _parse_atom_line(raw.rstrip("\n"), lineno)
        if resname != "TRP":
            continue
        if chains is not None and chain not in chains:
            continue
        key = (chain, resseq, icode)
        if key not in atoms:
            atoms[key] = {}
            order.append(key)
        # first conformer wins whatever its altLoc tag
        if name in RING_ATOMS and name not in atoms[key]:
            atoms[key][name] = xyz

    residues, warnings = [], []
    for chain, resseq, icode in order:
        ring = atoms[(chain, resseq, icode)]
        try:
            residues.append(TrpResidue(resseq, chain, dict(ring), icode))
        except GeometryError as exc:
            warnings.append(str(exc))
            log.warning("skipping residue: %s", exc)
    return ParseReport(residues, warnings)


def parse_pdb_trp(text: str, chain_filter=None) -> list:
    report = parse_pdb_trp_report(text, chain_filter)
    if not report.residues:
        raise EmptyResultError("no complete TRP residues found")
    return report.residues


# --------------------------------------------------------------------------- dipoles


def ring_plane(residue: TrpResidue):
    """Best-fit plane of the indole ring: (centroid, unit normal, singular values).

    The normal is oriented by the right-hand rule over CG -> CD1 -> NE1.
    """
    pts = residue.coords()
    centroid = pts.mean(axis=0)
    _, sv, vt = np.linalg.svd(pts - centroid)
    normal = vt[2]
    cg, cd1, ne1 = (np.asarray(residue.ring_atoms[k], dtype=float) for k in ("CG", "CD1", "NE1"))
    if np.dot(normal, np.cross(cd1 - cg, ne1 - cg)) < 0:
        normal = -normal
    return centroid, normal, sv


def ring_planarity_rms(residue: TrpResidue) -> float:
    pts = residue.coords()
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    return float(sv[2] / math.sqrt(len(pts)))


def derive_dipole(
    residue: TrpResidue,
    angle_deg: float = DEFAULT_ANGLE_DEG,
    anchor: str = DEFAULT_ANCHOR,
    mu_squared: float = DEFAULT_MU_SQUARED,
) -> Dipole:
    """Place the 1La transition dipole of one tryptophan.

    The direction lies in the best-fit ring plane at ``angle_deg`` from the
    projected CG->NE1 axis, counterclockwise about the oriented plane normal.
    """
    if anchor not in residue.ring_atoms:
        raise LookupFailure(f"anchor atom {anchor!r} not present in TRP {residue.label}")
    _, normal, sv = ring_plane(residue)
    if sv[1] < 1e-6 * max(sv[0], 1e-300):
        raise GeometryError(f"TRP {residue.label}: ring atoms are collinear, plane undefined")
    axis = np.asarray(residue.ring_atoms["NE1"], float) - np.asarray(residue.ring_atoms["CG"], float)
    axis = axis - np.dot(axis, normal) * normal
    length = np.linalg.norm(axis)
    if length < 1e-9:
        raise GeometryError(f"TRP {residue.label}: CG->NE1 axis is normal to the ring plane")
    u = axis / length
    v = np.cross(normal, u)
    theta = math.radians(angle_deg)
    direction = math.cos(theta) * u + math.sin(theta) * v
    direction /= np.linalg.norm(direction)
    return Dipole(np.asarray(residue.ring_atoms[anchor], dtype=float), direction, mu_squared)


def extract_unit_cell(
    text: str,
    angle_deg: float = DEFAULT_ANGLE_DEG,
    anchor: str = DEFAULT_ANCHOR,
    chain_filter=None,
    label: str = "",
    mu_squared: float = DEFAULT_MU_SQUARED,
):
    """Parse a structure file and build its unit cell; returns ``(cell, report)``."""
    report = parse_pdb_trp_report(text, chain_filter)
    if not report.residues:
        raise EmptyResultError("no complete TRP residues found")
    dipoles = [derive_dipole(r, angle_deg, anchor, mu_squared) for r in report.residues]
    log.info("extracted %d TRP dipoles (angle_deg=%s, anchor=%s)", len(dipoles), angle_deg, anchor)
    source = {
        "structure_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "angle_deg": float(angle_deg),
        "anchor": anchor,
        "chains": sorted(chain_filter) if chain_filter is not None else None,
        "residues": [r.label for r in report.residues],
        "skipped": len(report.warnings),
    }
    return UnitCell(dipoles, label=label, source=source), report


# --------------------------------------------------------------------------- file format


def _fmt(x: float) -> str:
    return repr(float(x))


def format_rows(positions, orientations) -> str:
    lines = []
    for p, u in zip(positions, orientations):
        lines.append(" ".join(_fmt(v) for v in (*p, *u)))
    return "\n".join(lines) + ("\n" if lines else "")


def format_unit_cell(cell: UnitCell) -> str:
    out = [f"# unitcell v1 mu2={_fmt(cell.mu_squared)}\n"]
    if cell.label:
        out.append(f"# label: {cell.label}\n")
    if cell.source:
        out.append(f"# source: {json.dumps(cell.source, sort_keys=True)}\n")
    out.append(format_rows(cell.positions, cell.orientations))
    return "".join(out)


def write_unit_cell(cell: UnitCell, destination) -> None:
    from .io import atomic_write_text

    atomic_write_text(destination, format_unit_cell(cell))


def parse_rows(lines, start_lineno: int):
    rows = []
    for lineno, line in enumerate(lines, start=start_lineno):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 6:
            raise FormatError(f"expected 6 columns, found {len(parts)}", lineno)
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise FormatError(f"non-numeric value in row {line.strip()!r}", lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise FormatError("non-finite value", lineno)
        norm = math.sqrt(sum(v * v for v in values[3:]))
        if abs(norm - 1.0) > _UNIT_TOL_READ:
            raise FormatError(f"orientation norm {norm!r} is not 1", lineno)
        rows.append((lineno, values))
    return rows


def _header_value(header: str, prefix: str, lineno: int = 1) -> dict:
    if not header.startswith(prefix):
        raise FormatError(f"expected header starting with {prefix!r}", lineno)
    fields = {}
    for token in header[len(prefix) :].split():
        if "=" not in token:
            raise FormatError(f"malformed header token {token!r}", lineno)
        key, value = token.split("=", 1)
        fields[key] = value
    return fields


def parse_unit_cell(text: str) -> UnitCell:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty unit-cell file", 1)
    fields = _header_value(lines[0].rstrip(), "# unitcell v1")
    if set(fields) != {"mu2"}:
        raise FormatError(f"header must carry exactly mu2=..., got {sorted(fields)}", 1)
    try:
        mu2 = float(fields["mu2"])
    except ValueError:
        raise FormatError(f"mu2 value {fields['mu2']!r} is not a number", 1) from None
    label, source = "", {}
    body_start = 1
    while body_start < len(lines) and lines[body_start].startswith("#"):
        meta = lines[body_start]
        if meta.startswith("# label: "):
            label = meta[len("# label: ") :]
        elif meta.startswith("# source: "):
            try:
                source = json.loads(meta[len("# source: ") :])
            except json.JSONDecodeError as exc:
                raise FormatError(f"bad source metadata: {exc}", body_start + 1) from None
        else:
            raise FormatError(f"unknown comment line {meta!r}", body_start + 1)
        body_start += 1
    rows = parse_rows(lines[body_start:], body_start + 1)
    dipoles = []
    for lineno, values in rows:
        try:
            dipoles.append(Dipole(np.array(values[:3]), _renormalize(values[3:]), mu2))
        except GeometryError as exc:
            raise FormatError(str(exc), lineno) from None
    return UnitCell(dipoles, label=label, source=source)


def _renormalize(u):
    # rows are written with repr() so an exact round trip keeps |u| within 1e-12;
    # only hand-edited files within the 1e-9 read tolerance get rescaled.
    u = np.asarray(u, dtype=float)
    norm = np.linalg.norm(u)
    return u if abs(norm - 1.0) <= _UNIT_TOL else u / norm


def read_unit_cell(source) -> UnitCell:
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read unit-cell file {path}: {exc}") from None
    return parse_unit_cell(text)


def bundled_unit_cell_path() -> Path:
    return Path(__file__).with_name("data") / "tubulin_dimer.ucell"


def bundled_structure_path() -> Path:
    return Path(__file__).with_name("data") / "tubulin_dimer_synthetic.pdb"


def load_tubulin_dimer() -> UnitCell:
    """The shipped 8-dipole tubulin-dimer unit cell."""
    return read_unit_cell(bundled_unit_cell_path())
