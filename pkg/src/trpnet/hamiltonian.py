"""Radiative couplings and the dense single-excitation effective Hamiltonian.

All energies are cm^-1 and lengths Angstrom. For dipoles m, n with unit
moments a, b and separation r along unit vector e, with

    A = a.b - (a.e)(b.e)
    B = a.b - 3 (a.e)(b.e)
    x = k0 r

the coherent and dissipative couplings are

    Omega   = (3 gamma / 4) * (-A cos(x)/x + B (sin(x)/x^2 + cos(x)/x^3))
    Upsilon = (3 gamma / 2) * ( A sin(x)/x + B (cos(x)/x^2 - sin(x)/x^3))

and H[m, n] = Omega - i Upsilon / 2 off the diagonal, eps_n - i gamma / 2 on it.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, SingularityError

DEFAULT_MAX_N = 20_000
_BLOCK_ROWS = 256


@dataclass(frozen=True)
class PhysicalConstants:
    lambda0_nm: float = 280.0
    E0: float = 35714.0  # cm^-1
    k0: float = 2.24e-3  # A^-1, as printed (2 pi / lambda would be 2.2440e-3)
    mu_squared: float = 181224.0  # A^3 cm^-1
    gamma: float = 2.73e-3  # cm^-1
    gamma_nr: float = 0.0183  # cm^-1
    kB: float = 0.695  # cm^-1 / K

    def gamma_from_dipole(self) -> float:
        """(4/3) mu^2 k0^3, the rate implied by the other printed constants."""
        return 4.0 / 3.0 * self.mu_squared * self.k0**3

    def gamma_self_consistency(self) -> float:
        return abs(self.gamma - self.gamma_from_dipole()) / self.gamma

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DisorderConfig:
    W: float
    seed: int = 0
    realization_index: int = 0

    def __post_init__(self):
        if not self.W >= 0:
            raise DomainError(f"disorder width W must be >= 0, got {self.W!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        if self.realization_index < 0:
            raise DomainError("realization_index must be >= 0")


@dataclass
class EffectiveHamiltonian:
    entries: np.ndarray
    constants: PhysicalConstants
    site_energies: np.ndarray
    disorder: DisorderConfig | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def gamma_matrix(self) -> np.ndarray:
        """The dissipator (H - H^dagger) / (-i); real symmetric with diagonal gamma."""
        return ((self.entries - self.entries.conj().T) / -1j).real

    def zero_diagonal_view(self) -> np.ndarray:
        """Copy with Re(H_jj) set to zero, for coupling-only plots."""
        view = self.entries.copy()
        idx = np.diag_indices_from(view)
        view[idx] = 1j * view[idx].imag
        return view


def capacity_limit() -> int:
    raw = os.environ.get("SIM_MAX_N")
    if raw is None or raw == "":
        return DEFAULT_MAX_N
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"SIM_MAX_N={raw!r} is not an integer") from None
    if value < 1:
        raise DomainError("SIM_MAX_N must be positive")
    return value


def check_capacity(n: int, limit: int | None = None) -> None:
    limit = capacity_limit() if limit is None else limit
    if n > limit:
        raise CapacityError(n, limit)


# --------------------------------------------------------------------------- kernels


def kernel_blocks(pos_m, ori_m, pos_n, ori_n, k0: float, gamma: float):
    """Omega and Upsilon for every (row, column) pair of two dipole sets.

    Returns ``(omega, upsilon, r)`` with shape ``(len(pos_m), len(pos_n))``.
    Entries with r == 0 are NaN; callers decide whether that is an error.
    """
    pos_m = np.asarray(pos_m, dtype=float)
    pos_n = np.asarray(pos_n, dtype=float)
    ori_m = np.asarray(ori_m, dtype=float)
    ori_n = np.asarray(ori_n, dtype=float)
    # explicit component sums (no einsum/BLAS) keep every entry bit-identical
    # whatever the block shape
    d = [pos_n[None, :, k] - pos_m[:, None, k] for k in range(3)]
    r = np.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
    with np.errstate(divide="ignore", invalid="ignore"):
        e = [dk / r for dk in d]
        am = ori_m[:, None, 0] * e[0] + ori_m[:, None, 1] * e[1] + ori_m[:, None, 2] * e[2]
        bn = ori_n[None, :, 0] * e[0] + ori_n[None, :, 1] * e[1] + ori_n[None, :, 2] * e[2]
        ab = ori_m[:, None, 0] * ori_n[None, :, 0] + ori_m[:, None, 1] * ori_n[None, :, 1] + ori_m[:, None, 2] * ori_n[None, :, 2]
        prod = am * bn
        A = ab - prod
        B = ab - 3.0 * prod
        x = k0 * r
        c, s = np.cos(x), np.sin(x)
        inv = 1.0 / x
        inv2 = inv * inv
        inv3 = inv2 * inv
        omega = 0.75 * gamma * (-A * c * inv + B * (s * inv2 + c * inv3))
        upsilon = 1.5 * gamma * (A * s * inv + B * (c * inv2 - s * inv3))
    return omega, upsilon, r


def _pair(d_m, d_n, c: PhysicalConstants):
    omega, upsilon, r = kernel_blocks(
        d_m.position[None], d_m.orientation[None], d_n.position[None], d_n.orientation[None], c.k0, c.gamma
    )
    if not r[0, 0] > 0:
        raise SingularityError(0, 1)
    return float(omega[0, 0]), float(upsilon[0, 0])


def coupling_omega(d_m, d_n, c: PhysicalConstants = PhysicalConstants()) -> float:
    return _pair(d_m, d_n, c)[0]


def coupling_upsilon(d_m, d_n, c: PhysicalConstants = PhysicalConstants()) -> float:
    return _pair(d_m, d_n, c)[1]


# --------------------------------------------------------------------------- disorder


def site_uniforms(seed: int, realization_index: int, start: int, stop: int) -> np.ndarray:
    """Uniform [0, 1) variates for sites ``start..stop-1``.

    Philox is keyed by (seed, realization) and site n always consumes the n-th
    64-bit output, so any block of sites can be drawn independently.
    """
    bitgen = np.random.Philox(key=np.array([seed, realization_index], dtype=np.uint64))
    skip_blocks, skip_words = divmod(start, 4)
    bitgen.advance(skip_blocks)
    gen = np.random.Generator(bitgen)
    draws = gen.random(stop - start + skip_words)
    return draws[skip_words:]


def site_energies(n: int, constants: PhysicalConstants, disorder: DisorderConfig | None = None) -> np.ndarray:
    energies = np.full(n, constants.E0, dtype=float)
    if disorder is None or disorder.W == 0:
        return energies
    u = site_uniforms(disorder.seed, disorder.realization_index, 0, n)
    return energies + disorder.W * (u - 0.5)


# --------------------------------------------------------------------------- assembly


def _lattice_arrays(lattice):
    if hasattr(lattice, "positions") and hasattr(lattice, "orientations"):
        return np.asarray(lattice.positions, float), np.asarray(lattice.orientations, float)
    dipoles = list(lattice)
    pos = np.array([d.position for d in dipoles], dtype=float).reshape(-1, 3)
    ori = np.array([d.orientation for d in dipoles], dtype=float).reshape(-1, 3)
    return pos, ori


def assemble(
    lattice,
    constants: PhysicalConstants = PhysicalConstants(),
    disorder: DisorderConfig | None = None,
    max_n: int | None = None,
    block_rows: int = _BLOCK_ROWS,
) -> EffectiveHamiltonian:
    """Dense complex-symmetric effective Hamiltonian of a dipole lattice.

    The strict upper triangle is evaluated in row blocks and mirrored, so
    ``H == H.T`` holds exactly.
    """
    pos, ori = _lattice_arrays(lattice)
    n = pos.shape[0]
    if n < 1:
        raise DomainError("lattice is empty")
    check_capacity(n, max_n)
    eps = site_energies(n, constants, disorder)
    H = np.empty((n, n), dtype=complex)
    for i0 in range(0, n, block_rows):
        i1 = min(n, i0 + block_rows)
        omega, upsilon, r = kernel_blocks(pos[i0:i1], ori[i0:i1], pos[i0:], ori[i0:], constants.k0, constants.gamma)
        rows = np.arange(i0, i1)[:, None]
        cols = np.arange(i0, n)[None, :]
        upper = cols > rows
        bad = upper & ~(r > 0)
        if bad.any():
            bi, bj = np.argwhere(bad)[0]
            raise SingularityError(int(i0 + bi), int(i0 + bj))
        block = omega - 0.5j * upsilon
        # diagonal sub-block: keep the strict upper part, mirror the rest below
        sub = block[:, : i1 - i0]
        sub[~upper[:, : i1 - i0]] = 0.0
        sub += np.triu(sub, 1).T
        H[i0:i1, i0:] = block
        H[i0:, i0:i1] = block.T
    H[np.diag_indices(n)] = eps - 0.5j * constants.gamma
    return EffectiveHamiltonian(H, constants, eps, disorder)


def expectation_value(lattice, phi: np.ndarray, constants: PhysicalConstants = PhysicalConstants(), block_rows: int = 512) -> complex:
    """c-product expectation phi^T H phi without materializing H (O(N^2) time, O(block N) memory).

    ``phi`` is used as given; normalize it first if a Rayleigh quotient is wanted.
    """
    pos, ori = _lattice_arrays(lattice)
    phi = np.asarray(phi, dtype=complex)
    n = pos.shape[0]
    if phi.shape != (n,):
        raise DomainError(f"state has {phi.shape} entries, lattice has {n} sites")
    total = complex(np.sum(phi * phi) * (constants.E0 - 0.5j * constants.gamma))
    for i0 in range(0, n, block_rows):
        i1 = min(n, i0 + block_rows)
        omega, upsilon, r = kernel_blocks(pos[i0:i1], ori[i0:i1], pos, ori, constants.k0, constants.gamma)
        block = omega - 0.5j * upsilon
        diag = np.arange(i0, i1)
        block[diag - i0, diag] = 0.0
        if not np.all(np.isfinite(block)):
            bi, bj = np.argwhere(~np.isfinite(block))[0]
            raise SingularityError(int(i0 + bi), int(bj))
        total += complex(phi[i0:i1] @ (block @ phi))
    return total
