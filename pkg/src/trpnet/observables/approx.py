"""Approximate brightest state of a centriole from microtubule-segment states.

The centriole state is a superposition of copies of one segment's brightest
eigenvector, one copy per (microtubule m, segment n) slot, weighted by

    c[m, n] = sin(pi n / (N + 1)) * sin(2 pi ceil(m / 3) / 9)

with m = 1..27 in triplet-major order and n = 1..N along the axis. Its
c-product expectation value costs O(sites^2) kernel evaluations and never
forms the full matrix.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..geometry import DipoleLattice, GeometryKind
from ..hamiltonian import PhysicalConstants, assemble, expectation_value
from ..spectrum import diagonalize

DEFAULT_SEGMENT_SPIRALS = 13  # 104 nm segments
CENTRIOLE_MTS = 27


@dataclass
class ApproxCentrioleState:
    value: complex
    n_segments: int
    segment_spirals: int
    segment_ratio: float
    seconds: float

    @property
    def energy(self) -> float:
        return self.value.real

    @property
    def width(self) -> float:
        return -2.0 * self.value.imag

    def ratio(self, gamma: float) -> float:
        return self.width / gamma


def centriole_coefficients(n_segments: int, n_mts: int = CENTRIOLE_MTS) -> np.ndarray:
    """Weights c[m-1, n-1] for m = 1..n_mts, n = 1..n_segments."""
    m = np.arange(1, n_mts + 1)
    n = np.arange(1, n_segments + 1)
    along = np.sin(math.pi * n / (n_segments + 1))
    around = np.sin(2 * math.pi * np.ceil(m / 3) / 9)
    return around[:, None] * along[None, :]


def segment_sites(lattice: DipoleLattice, segment_spirals: int):
    kind = lattice.spec.kind
    if kind is not GeometryKind.CENTRIOLE:
        raise DomainError(f"approximate centriole state needs a centriole lattice, got {kind.value}")
    n_spirals = lattice.spec.n_spirals
    if segment_spirals < 1 or n_spirals % segment_spirals:
        raise DomainError(f"centriole of {n_spirals} spirals is not a whole number of {segment_spirals}-spiral segments")
    per_mt = len(lattice) // CENTRIOLE_MTS
    per_spiral = per_mt // n_spirals
    if per_mt * CENTRIOLE_MTS != len(lattice) or per_spiral * n_spirals != per_mt:
        raise DomainError("lattice size is inconsistent with 27 equal microtubules")
    return per_mt, per_spiral * segment_spirals, n_spirals // segment_spirals


def brightest_segment_state(lattice: DipoleLattice, segment_spirals: int, constants: PhysicalConstants):
    """c-normalized brightest eigenvector of the first segment of microtubule 0."""
    _, seg_len, _ = segment_sites(lattice, segment_spirals)
    segment = DipoleLattice(
        lattice.positions[:seg_len], lattice.orientations[:seg_len], lattice.spec, lattice.mu_squared
    )
    spec = diagonalize(assemble(segment, constants), keep_vectors=True)
    j = int(np.argmax(spec.widths))
    return spec.right_vectors[:, j], float(spec.widths[j] / constants.gamma)


def approx_centriole_state(
    lattice: DipoleLattice,
    constants: PhysicalConstants = PhysicalConstants(),
    segment_spirals: int = DEFAULT_SEGMENT_SPIRALS,
    segment_state=None,
) -> ApproxCentrioleState:
    """Complex expectation E - i Gamma/2 of the approximate superradiant centriole state.

    Every microtubule copy in the centriole is a rigid motion of microtubule
    0, so one segment diagonalization (``segment_spirals * 104`` sites) serves
    all 27 N slots. Pass ``segment_state`` to reuse an eigenvector.
    """
    start = time.perf_counter()
    per_mt, seg_len, n_segments = segment_sites(lattice, segment_spirals)
    if segment_state is None:
        vec, seg_ratio = brightest_segment_state(lattice, segment_spirals, constants)
    else:
        vec, seg_ratio = np.asarray(segment_state, dtype=complex), float("nan")
    if vec.shape != (seg_len,):
        raise DomainError(f"segment state has {vec.shape} entries, segment has {seg_len} sites")
    coeffs = centriole_coefficients(n_segments)
    phi = np.empty(len(lattice), dtype=complex)
    for m in range(CENTRIOLE_MTS):
        for n in range(n_segments):
            lo = m * per_mt + n * seg_len
            phi[lo : lo + seg_len] = coeffs[m, n] * vec
    phi /= np.sqrt(np.sum(phi * phi))
    value = expectation_value(lattice, phi, constants)
    return ApproxCentrioleState(value, n_segments, segment_spirals, seg_ratio, time.perf_counter() - start)


__all__ = ["ApproxCentrioleState", "approx_centriole_state", "centriole_coefficients"]
