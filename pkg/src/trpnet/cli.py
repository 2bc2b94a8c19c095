"""Command-line front end: extract, spectrum, sweep, disorder, rerun.

Exit codes: 0 success, 2 parse error, 3 extraction error, 4 domain or
capacity error, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path


from . import __version__
from .errors import ParseError, TrpnetError
from .geometry import GeometryKind, build, format_lattice
from .hamiltonian import DisorderConfig, PhysicalConstants, assemble, check_capacity
from .io import atomic_write_bytes, atomic_write_text, heff_bytes, sha256_file, write_csv
from .observables.disorder import DEFAULT_REALIZATIONS, DISORDER_HEADER, disorder_rows, disorder_sweep
from .observables.lineshapes import absorption_curve, fluorescence_curve
from .observables.thermal import ROOM_TEMPERATURE_K, thermal_qy
from .spectrum import SPECTRUM_HEADER, SUM_RULE_RTOL, diagonalize, enhancement_metrics, spectrum_rows
from .unitcell import (
    DEFAULT_ANCHOR,
    DEFAULT_ANGLE_DEG,
    bundled_unit_cell_path,
    extract_unit_cell,
    format_unit_cell,
    read_unit_cell,
)

log = logging.getLogger("trpnet")

KINDS = [k.value for k in GeometryKind]
TOLERANCES = {
    "sum_rule_rtol": SUM_RULE_RTOL,
    "c_norm_min": 1e-12,
    "disorder_qy_w200_rel": 0.10,
    "approx_centriole_factor": 2.0,
}


class Run:
    """Collects outputs and timings for the manifest of one command."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.outputs = []
        self.timings = {}
        self.inputs = {}
        self._t0 = time.perf_counter()

    def stage(self, name):
        run = self

        class _Stage:
            def __enter__(self):
                self.start = time.perf_counter()
                log.info("%s ...", name)

            def __exit__(self, *exc):
                run.timings[name] = time.perf_counter() - self.start
                if exc[0] is None:
                    log.info("%s done in %.2f s", name, run.timings[name])

        return _Stage()

    def write_text(self, path, text):
        atomic_write_text(path, text)
        self.outputs.append(str(path))

    def write_bytes(self, path, data):
        atomic_write_bytes(path, data)
        self.outputs.append(str(path))

    def write_csv(self, path, header, rows):
        write_csv(path, header, rows)
        self.outputs.append(str(path))

    def manifest(self, **extra):
        return {
            "schema": "trpnet-manifest/1",
            "tool_version": __version__,
            "command": self.args.command,
            "argv": self.argv,
            "cwd": os.getcwd(),
            "inputs": self.inputs,
            "tolerances": TOLERANCES,
            "outputs": [{"path": p, "sha256": sha256_file(p)} for p in self.outputs],
            "timings_s": {**self.timings, "total": time.perf_counter() - self._t0},
            **extra,
        }

    def write_manifest(self, prefix, **extra):
        path = f"{prefix}_manifest.json"
        atomic_write_text(path, json.dumps(self.manifest(**extra), indent=2, sort_keys=True) + "\n")
        log.info("manifest: %s", path)
        return path


# --------------------------------------------------------------------------- shared options


def _constants(args) -> PhysicalConstants:
    base = PhysicalConstants()
    overrides = {}
    for flag, field in (("e0", "E0"), ("k0", "k0"), ("gamma", "gamma"), ("gamma_nr", "gamma_nr"), ("mu2", "mu_squared")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    return PhysicalConstants(**{**base.as_dict(), **overrides})


def _load_cell(args, run):
    path = Path(args.unit_cell) if args.unit_cell else bundled_unit_cell_path()
    cell = read_unit_cell(path)
    run.inputs["unit_cell"] = {
        "path": str(path),
        "bundled": args.unit_cell is None,
        "file_sha256": sha256_file(path),
        "content_sha256": cell.content_hash(),
        "label": cell.label,
    }
    return cell


def _geometry(args, cell, run, n_spirals=None):
    n_spirals = args.spirals if n_spirals is None else n_spirals
    with run.stage(f"build {args.kind} x{n_spirals}"):
        lattice = build(args.kind, cell, n_spirals, args.n_mt, args.pivot)
    log.info("lattice: %s, N=%d, length %.0f nm", args.kind, len(lattice), lattice.length_nm)
    return lattice


def _add_geometry(p, sweep=False):
    p.add_argument("--kind", choices=KINDS, default="mt")
    if not sweep:
        p.add_argument("--spirals", type=int, required=True, help="layers along the axis (8 nm each)")
    p.add_argument("--n-mt", type=int, default=None, help="microtubules in a hexagonal bundle")
    p.add_argument("--unit-cell", default=None, help="unit-cell file (default: bundled tubulin dimer)")
    p.add_argument("--pivot", type=int, default=None, help="unit-cell index of the beta-Trp346 pivot")


def _add_constants(p):
    p.add_argument("--temp-k", type=float, default=ROOM_TEMPERATURE_K)
    p.add_argument("--gamma-nr", type=float, default=None, help="non-radiative rate, cm^-1 (default 0.0183)")
    p.add_argument("--e0", type=float, default=None, help="site energy, cm^-1")
    p.add_argument("--k0", type=float, default=None, help="wavenumber, 1/Angstrom")
    p.add_argument("--gamma", type=float, default=None, help="single-emitter radiative width, cm^-1")
    p.add_argument("--mu2", type=float, default=None, help="dipole strength, A^3 cm^-1")


# --------------------------------------------------------------------------- commands


def cmd_extract(args, run):
    path = Path(args.pdb)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read structure file {path}: {exc}") from None
    chains = set(args.chains.split(",")) if args.chains else None
    cell, report = extract_unit_cell(text, args.angle_deg, args.anchor, chains, args.label)
    run.inputs["structure"] = {"path": str(path), "sha256": sha256_file(path)}
    print(f"{len(cell)} TRP residues extracted, {report.n_warnings} skipped")
    for warning in report.warnings:
        print(f"warning: {warning}")
    run.write_text(args.out, format_unit_cell(cell))
    if args.manifest:
        run.write_manifest(str(Path(args.out).with_suffix("")), angle_deg=args.angle_deg, anchor=args.anchor)
    return 0


def cmd_spectrum(args, run):
    constants = _constants(args)
    cell = _load_cell(args, run)
    lattice = _geometry(args, cell, run)
    check_capacity(len(lattice))
    disorder = None
    if args.disorder_w:
        disorder = DisorderConfig(args.disorder_w[0], args.seed, args.realization)
    prefix = args.out
    if args.export_lattice:
        run.write_text(f"{prefix}_lattice.txt", format_lattice(lattice))
    with run.stage("assemble"):
        H = assemble(lattice, constants, disorder)
    if args.dump_heff:
        run.write_bytes(f"{prefix}_heff.bin", heff_bytes(H.entries))
    if args.zero_diagonal_dump:
        run.write_bytes(f"{prefix}_heff_zero_diag.bin", heff_bytes(H.zero_diagonal_view()))
    with run.stage("diagonalize"):
        spec = diagonalize(H)
    del H
    metrics = enhancement_metrics(spec)
    report = thermal_qy(spec, args.temp_k, constants.gamma_nr)
    run.write_csv(f"{prefix}_spectrum.csv", SPECTRUM_HEADER, spectrum_rows(spec))
    payload = {**metrics.as_dict(), "thermal": report.as_dict(), "sum_rule_errors": list(spec.sum_rule_errors())}
    run.write_text(f"{prefix}_metrics.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if args.sigma is not None:
        absorption = absorption_curve(spec, args.sigma, args.lineshape)
        fluorescence = fluorescence_curve(spec, args.sigma, args.lineshape, args.temp_k)
        run.write_csv(f"{prefix}_absorption.csv", ("x", "value"), absorption.rows())
        run.write_csv(f"{prefix}_fluorescence.csv", ("x", "value"), fluorescence.rows())
    print(
        f"N={metrics.n} max(Gamma)/gamma={metrics.max_ratio:.6g} max/(N gamma)={metrics.max_per_N:.4g} "
        f"tau_super={metrics.tau_super:.4g} s min(Gamma)/gamma={metrics.min_ratio:.4g} QY={report.qy:.6f}"
    )
    run.write_manifest(
        prefix,
        constants=constants.as_dict(),
        geometry=lattice.spec.as_dict(),
        disorder=None if disorder is None else vars(disorder),
        temperature_k=args.temp_k,
    )
    return 0


def parse_spiral_range(text: str) -> list:
    """``"5"``, ``"1:10"`` (inclusive) or ``"1,2,5,10"``."""
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":", 1))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad spiral range {text!r}") from None


def cmd_sweep(args, run):
    constants = _constants(args)
    cell = _load_cell(args, run)
    rows = []
    if args.with_subunits:
        from .geometry import DipoleLattice, GeometrySpec

        for n_sites in (1, len(cell)):
            sub = DipoleLattice(cell.positions[:n_sites], cell.orientations[:n_sites], GeometrySpec(GeometryKind(args.kind), 1))
            rows.append(_sweep_point(sub, constants, args))
    for n in args.spirals:
        lattice = _geometry(args, cell, run, n)
        check_capacity(len(lattice))
        with run.stage(f"spectrum x{n}"):
            rows.append(_sweep_point(lattice, constants, args))
    run.write_csv(f"{args.out}_sweep.csv", ("N_trp", "qy", "max_ratio"), rows)
    run.write_manifest(args.out, constants=constants.as_dict(), kind=args.kind, spirals=args.spirals, temperature_k=args.temp_k)
    return 0


def _sweep_point(lattice, constants, args):
    spec = diagonalize(assemble(lattice, constants))
    report = thermal_qy(spec, args.temp_k, constants.gamma_nr)
    row = (len(lattice), report.qy, float(spec.widths.max()) / constants.gamma)
    log.info("N_trp=%d qy=%.6f max_ratio=%.4g", *row)
    return row


def cmd_disorder(args, run):
    constants = _constants(args)
    cell = _load_cell(args, run)
    lattice = _geometry(args, cell, run)
    check_capacity(len(lattice))
    with run.stage("disorder ensemble"):
        stats = disorder_sweep(
            lattice, args.disorder_w, args.realizations, args.seed, args.temp_k, constants, constants.gamma_nr, args.workers
        )
    run.write_csv(f"{args.out}_disorder.csv", DISORDER_HEADER, disorder_rows(stats))
    run.write_manifest(
        args.out,
        constants=constants.as_dict(),
        geometry=lattice.spec.as_dict(),
        disorder={"W": args.disorder_w, "realizations": args.realizations, "seed": args.seed, "rng": "philox(seed, realization)"},
        temperature_k=args.temp_k,
    )
    return 0


def cmd_rerun(args, run):
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    argv = list(manifest["argv"])
    base = Path(manifest.get("cwd", "."))
    # inputs named relative to the original working directory
    if "--unit-cell" in argv:
        i = argv.index("--unit-cell") + 1
        argv[i] = str(base / argv[i])
    if argv and argv[0] == "extract":
        argv[1] = str(base / argv[1])
    if args.out:
        key = "--out"
        if key in argv:
            argv[argv.index(key) + 1] = args.out
        else:
            argv += [key, args.out]
    log.info("re-running: trpnet %s", " ".join(argv))
    return main(argv)


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trpnet", description="Superradiance in tryptophan networks of tubulin architectures.")
    parser.add_argument("--version", action="version", version=f"trpnet {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="only warnings on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="TRP transition dipoles from a PDB file")
    p.add_argument("pdb")
    p.add_argument("--angle-deg", type=float, default=DEFAULT_ANGLE_DEG, help="1La angle from CG->NE1 (deg)")
    p.add_argument("--anchor", default=DEFAULT_ANCHOR)
    p.add_argument("--chains", default=None, help="comma-separated chain ids")
    p.add_argument("--label", default="")
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", action="store_true", help="also write <out>_manifest.json")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("spectrum", help="complex spectrum and superradiance metrics of one lattice")
    _add_geometry(p)
    _add_constants(p)
    p.add_argument("--disorder-w", type=float, nargs="+", default=None, help="disorder width W (first value used)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--realization", type=int, default=0)
    p.add_argument("--sigma", type=float, default=None, help="lineshape width, cm^-1 (enables curve output)")
    p.add_argument("--lineshape", choices=["lorentzian", "gaussian"], default="lorentzian")
    p.add_argument("--dump-heff", action="store_true")
    p.add_argument("--zero-diagonal-dump", action="store_true", help="HEFF1 dump with Re(H_jj) set to 0")
    p.add_argument("--export-lattice", action="store_true")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="thermal QY and max(Gamma)/gamma versus length")
    _add_geometry(p, sweep=True)
    _add_constants(p)
    p.add_argument("--spirals", type=parse_spiral_range, required=True, help="e.g. 1:10 or 1,2,5")
    p.add_argument("--with-subunits", action="store_true", help="prepend the single-Trp and single-dimer points")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("disorder", help="QY and enhancement under static on-site disorder")
    _add_geometry(p)
    _add_constants(p)
    p.add_argument("--disorder-w", type=float, nargs="+", required=True)
    p.add_argument("--realizations", type=int, default=DEFAULT_REALIZATIONS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_disorder)

    p = sub.add_parser("rerun", help="repeat a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="replacement output prefix")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(asctime)s %(name)s %(message)s")
    run = Run(args, [a for a in argv if a not in ("-q", "--quiet")])
    try:
        return args.func(args, run)
    except TrpnetError as exc:
        print(f"trpnet: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError:
        print("trpnet: error: out of memory for the dense Hamiltonian", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
