import numpy as np
import pytest
from conftest import atom_line, residue_pdb, ring_atoms
from scipy.spatial.transform import Rotation

from trpnet.errors import EmptyResultError, FormatError, GeometryError, LookupFailure, ParseError
from trpnet.unitcell import (
    Dipole,
    TrpResidue,
    UnitCell,
    bundled_structure_path,
    bundled_unit_cell_path,
    derive_dipole,
    extract_unit_cell,
    format_unit_cell,
    load_tubulin_dimer,
    parse_pdb_trp,
    parse_pdb_trp_report,
    parse_unit_cell,
    read_unit_cell,
    write_unit_cell,
)


def test_single_residue_round_trip():
    atoms = ring_atoms(translation=(1.5, -2.25, 3.0))
    residues = parse_pdb_trp("\n".join(residue_pdb(atoms, "B", 346)))
    assert len(residues) == 1
    res = residues[0]
    assert (res.chain_id, res.residue_id, res.label) == ("B", 346, "B:346")
    for name, xyz in atoms.items():
        np.testing.assert_allclose(res.ring_atoms[name], np.round(xyz, 3), atol=0)


def test_bundled_structure_has_eight_trp():
    residues = parse_pdb_trp(bundled_structure_path().read_text())
    assert len(residues) == 8
    assert [r.chain_id for r in residues].count("A") == 4
    assert "B:346" in [r.label for r in residues]


@pytest.mark.parametrize("text", ["", "HEADER nothing\nEND\n", atom_line(1, "CA", "ALA", "A", 1, (0, 0, 0))])
def test_empty_result(text):
    with pytest.raises(EmptyResultError):
        parse_pdb_trp(text)


def test_malformed_coordinate_reports_line():
    lines = residue_pdb(ring_atoms())
    lines[3] = lines[3][:30] + "   abc.d" + lines[3][38:]
    with pytest.raises(ParseError) as err:
        parse_pdb_trp("REMARK x\n" + "\n".join(lines))
    assert err.value.line == 5


def test_partial_residue_skipped_with_warning():
    complete = residue_pdb(ring_atoms(), "A", 1)
    partial = residue_pdb({k: v for k, v in ring_atoms().items() if k != "CH2"}, "A", 2, start=20)
    report = parse_pdb_trp_report("\n".join(complete + partial))
    assert [r.residue_id for r in report.residues] == [1]
    assert len(report.warnings) == 1 and "CH2" in report.warnings[0]


def test_first_model_and_first_altloc():
    atoms = ring_atoms()
    lines = residue_pdb(atoms)
    alt = atom_line(99, "CG", "TRP", "A", 1, (9.0, 9.0, 9.0), alt="B")
    other = residue_pdb(ring_atoms(translation=(20, 0, 0)), "A", 7)
    text = "\n".join(lines + [alt, "ENDMDL"] + other)
    (res,) = parse_pdb_trp(text)
    np.testing.assert_allclose(res.ring_atoms["CG"], (0, 0, 0))


def test_chain_filter():
    text = "\n".join(residue_pdb(ring_atoms(), "A", 1) + residue_pdb(ring_atoms(translation=(9, 0, 0)), "B", 1, 20))
    assert [r.chain_id for r in parse_pdb_trp(text, chain_filter={"B"})] == ["B"]


def test_nonplanar_ring_rejected():
    atoms = ring_atoms()
    atoms["CZ3"] = (atoms["CZ3"][0], atoms["CZ3"][1], 1.0)
    with pytest.raises(GeometryError):
        TrpResidue(1, "A", atoms)


# --------------------------------------------------------------------------- derive_dipole


def test_angle_zero_points_along_cg_ne1():
    d = derive_dipole(TrpResidue(1, "A", ring_atoms()), angle_deg=0)
    np.testing.assert_allclose(d.orientation, [1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(d.position, ring_atoms()["CD2"])
    assert d.mu_squared == 181224.0


def test_angle_ninety_follows_right_hand_normal():
    # normal from CG->CD1 x CG->NE1 is -z here, so +90 deg turns +x into -y
    d = derive_dipole(TrpResidue(1, "A", ring_atoms()), angle_deg=90)
    np.testing.assert_allclose(d.orientation, [0, -1, 0], atol=1e-12)


def test_missing_anchor():
    with pytest.raises(LookupFailure):
        derive_dipole(TrpResidue(1, "A", ring_atoms()), anchor="OXT")


@pytest.mark.parametrize("seed", range(5))
def test_extraction_is_rigid_motion_equivariant(seed):
    rng = np.random.default_rng(seed)
    R = Rotation.random(random_state=rng).as_matrix()
    t = rng.uniform(-50, 50, 3)
    res = TrpResidue(1, "A", ring_atoms())
    moved = TrpResidue(1, "A", {k: tuple(R @ np.array(v) + t) for k, v in res.ring_atoms.items()})
    for angle in (-41.0, 0.0, 73.0):
        a, b = derive_dipole(res, angle), derive_dipole(moved, angle)
        np.testing.assert_allclose(b.orientation, R @ a.orientation, atol=1e-9)
        np.testing.assert_allclose(b.position, R @ a.position + t, atol=1e-9)


def test_dipole_requires_unit_orientation():
    with pytest.raises(GeometryError):
        Dipole(np.zeros(3), np.array([0.9, 0, 0]))
    d = Dipole(np.zeros(3), np.array([0, 1.0, 0]))
    with pytest.raises(ValueError):
        d.position[0] = 1.0


# --------------------------------------------------------------------------- file format


def test_bundled_cell(cell):
    assert len(cell) == 8
    assert cell.label == "tubulin_dimer"
    np.testing.assert_allclose(np.linalg.norm(cell.orientations, axis=1), 1, atol=1e-12)


def test_bundled_cell_matches_extraction():
    cell, report = extract_unit_cell(bundled_structure_path().read_text(), label="tubulin_dimer")
    assert not report.warnings
    assert format_unit_cell(cell) == bundled_unit_cell_path().read_text()


def test_round_trip(tmp_path, cell):
    path = tmp_path / "cell.ucell"
    write_unit_cell(cell, path)
    again = read_unit_cell(path)
    assert again.dipoles == cell.dipoles
    assert again.source == cell.source and again.label == cell.label
    assert again.content_hash() == cell.content_hash()


def test_hand_written_single_dipole():
    text = "# unitcell v1 mu2=100.0\n1.0 2.0 3.0 0.0 0.6 0.8\n"
    cell = parse_unit_cell(text)
    assert len(cell) == 1
    np.testing.assert_array_equal(cell.positions[0], [1, 2, 3])
    np.testing.assert_array_equal(cell.orientations[0], [0, 0.6, 0.8])
    assert cell.mu_squared == 100.0


@pytest.mark.parametrize(
    "text",
    [
        "# unitcell v1 mu2=1.0\n0 0 0 0.9 0 0\n",
        "# unitcell v2 mu2=1.0\n0 0 0 1 0 0\n",
        "# unitcell v1 mu2=1.0\n0 0 0 1 0\n",
        "# unitcell v1 mu2=1.0\n0 0 0 1 0 x\n",
        "",
    ],
    ids=["norm-0.9", "header", "columns", "number", "empty"],
)
def test_format_errors(text):
    with pytest.raises(FormatError):
        parse_unit_cell(text)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        read_unit_cell(tmp_path / "absent.ucell")


def test_load_tubulin_dimer_is_cached_content():
    a, b = load_tubulin_dimer(), load_tubulin_dimer()
    assert isinstance(a, UnitCell) and a.dipoles == b.dipoles
