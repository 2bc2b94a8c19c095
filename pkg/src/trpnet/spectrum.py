"""Resonances of the effective Hamiltonian and derived superradiance metrics."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalError, QuasiDegeneracyError
from .hamiltonian import EffectiveHamiltonian, PhysicalConstants

log = logging.getLogger(__name__)

SPEED_OF_LIGHT_CM_S = 2.99792458e10
SUM_RULE_RTOL = 1e-8
CNORM_MIN = 1e-12


def rate_per_second(width_cm: float | np.ndarray):
    """Angular decay rate in s^-1 for a width in cm^-1 (2 pi c Gamma)."""
    return 2.0 * math.pi * SPEED_OF_LIGHT_CM_S * np.asarray(width_cm, dtype=float)


def lifetime_seconds(width_cm):
    return 1.0 / rate_per_second(width_cm)


@dataclass
class ResonanceSpectrum:
    energies: np.ndarray
    widths: np.ndarray
    constants: PhysicalConstants
    right_vectors: np.ndarray | None = None
    trace: complex | None = None

    def __len__(self):
        return self.energies.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.energies - 0.5j * self.widths

    @property
    def ratios(self) -> np.ndarray:
        return self.widths / self.constants.gamma

    def sum_rule_errors(self):
        """Relative deviations of sum(E_j) and sum(Gamma_j) from the trace of H."""
        n = len(self)
        width_target = n * self.constants.gamma
        width_err = abs(float(np.sum(self.widths)) - width_target) / width_target
        if self.trace is None:
            energy_err = 0.0
        else:
            target = self.trace.real
            energy_err = abs(float(np.sum(self.energies)) - target) / abs(target)
        return energy_err, width_err


def _sort_order(energies, widths):
    return np.lexsort((-widths, energies))


def c_normalize(vectors: np.ndarray) -> np.ndarray:
    """Scale columns so that v^T v = 1 (transpose pairing, no conjugation).

    The square root of v^T v is taken on the branch with non-negative real
    part (non-negative imaginary part when the real part is zero).
    """
    cnorm2 = np.einsum("ij,ij->j", vectors, vectors)
    small = np.flatnonzero(np.abs(cnorm2) < CNORM_MIN)
    if small.size:
        raise QuasiDegeneracyError(small.tolist())
    root = np.sqrt(cnorm2)  # principal branch gives Re >= 0
    flip = (root.real == 0) & (root.imag < 0)
    root[flip] = -root[flip]
    return vectors / root[None, :]


def diagonalize(
    H: EffectiveHamiltonian,
    keep_vectors: bool = False,
    check: bool = True,
) -> ResonanceSpectrum:
    """Full dense eigendecomposition of a complex-symmetric effective Hamiltonian.

    The constant E0 is removed from the diagonal before the LAPACK call and
    added back afterwards; the eigenvectors are unchanged and the absolute
    rounding error on tiny widths shrinks by E0 / ||couplings||.
    """
    M = H.entries
    n = M.shape[0]
    if n < 1:
        raise DomainError("empty Hamiltonian")
    if not np.all(np.isfinite(M)):
        raise NumericalError("Hamiltonian has non-finite entries")
    shift = H.constants.E0
    shifted = M - shift * np.eye(n)
    try:
        if keep_vectors:
            w, v = scipy.linalg.eig(shifted, check_finite=False, overwrite_a=True)
        else:
            w = scipy.linalg.eigvals(shifted, check_finite=False, overwrite_a=True)
            v = None
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        index = _failing_index(exc)
        raise NumericalError(f"eigensolver did not converge: {exc}", index=index) from None
    energies = w.real + shift
    widths = -2.0 * w.imag
    order = _sort_order(energies, widths)
    energies, widths = energies[order], widths[order]
    vectors = None
    if keep_vectors:
        vectors = c_normalize(v[:, order])
    spec = ResonanceSpectrum(energies, widths, H.constants, vectors, complex(np.trace(M)))
    if check:
        check_spectrum(spec, H)
    return spec


def _failing_index(exc):
    for token in str(exc).replace(")", " ").replace("(", " ").split():
        if token.isdigit():
            return int(token)
    return None


def _inf_norm(M):
    return float(np.abs(M).sum(axis=1).max())


def check_spectrum(spec: ResonanceSpectrum, H: EffectiveHamiltonian | None = None) -> None:
    """Assert the trace sum rules, width positivity and (with vectors) eigen-residuals."""
    energy_err, width_err = spec.sum_rule_errors()
    if energy_err > SUM_RULE_RTOL or width_err > SUM_RULE_RTOL:
        raise NumericalError(
            f"trace sum rule violated: energy rel. err {energy_err:.2e}, width rel. err {width_err:.2e}"
        )
    scale = 1.0
    if H is not None:
        coupling = H.entries - np.diag(np.diag(H.entries).real)
        scale = max(_inf_norm(coupling), 1e-300)
    floor = 1e-12 * scale
    negative = np.flatnonzero(spec.widths < -floor)
    if negative.size:
        raise NumericalError(
            f"negative decay width {spec.widths[negative[0]]:.3e} beyond rounding floor {floor:.1e}",
            index=int(negative[0]),
        )
    if spec.right_vectors is not None and H is not None:
        V = spec.right_vectors
        resid = H.entries @ V - V * spec.eigenvalues[None, :]
        norms = np.linalg.norm(resid, axis=0) / np.linalg.norm(V, axis=0)
        hnorm = _inf_norm(H.entries)
        worst = int(np.argmax(norms))
        if norms[worst] > 1e-8 * hnorm:
            raise NumericalError(f"eigenpair {worst} residual {norms[worst]:.2e} exceeds 1e-8 ||H||", index=worst)


@dataclass(frozen=True)
class EnhancementMetrics:
    n: int
    max_ratio: float
    max_per_N: float
    min_ratio: float
    tau_super: float
    tau_sub: float
    E_offset_of_max: float

    def as_dict(self):
        return asdict(self)


def enhancement_metrics(spec: ResonanceSpectrum) -> EnhancementMetrics:
    n = len(spec)
    if n == 0:
        raise DomainError("empty spectrum")
    gamma = spec.constants.gamma
    jmax = int(np.argmax(spec.widths))
    gmax = float(spec.widths[jmax])
    gmin = float(np.min(spec.widths))
    return EnhancementMetrics(
        n=n,
        max_ratio=gmax / gamma,
        max_per_N=gmax / (n * gamma),
        min_ratio=gmin / gamma,
        tau_super=float(lifetime_seconds(gmax)),
        tau_sub=float(lifetime_seconds(gmin)) if gmin > 0 else math.inf,
        E_offset_of_max=float(spec.energies[jmax] - spec.constants.E0),
    )


def survival_probability(spec: ResonanceSpectrum, initial, times, kind: str = "c-product", imag_tol: float = 1e-8) -> np.ndarray:
    """Population left in the network after times ``t`` (seconds).

    ``kind="c-product"`` evaluates sum_j C_j^R C_j^L exp(-2 pi c Gamma_j t)
    with C_j^L = v_j^T psi0 and C_j^R = psi0^T v_j, and requires the
    imaginary residue to stay below ``imag_tol``. That holds when the
    eigenvectors are real, e.g. for symmetric dimers. ``kind="norm"``
    propagates psi(t) = V exp(-i E t) V^T psi0 and returns the ordinary
    squared norm, which is always real.
    """
    if spec.right_vectors is None:
        raise DomainError("spectrum was computed without eigenvectors (keep_vectors=True)")
    V = spec.right_vectors
    n = V.shape[0]
    if np.ndim(initial) == 0:
        index = int(initial)
        if not 0 <= index < n:
            raise DomainError(f"site index {index} out of range")
        psi0 = np.zeros(n, dtype=complex)
        psi0[index] = 1.0
    else:
        psi0 = np.asarray(initial, dtype=complex)
        if psi0.shape != (n,):
            raise DomainError(f"initial state has shape {psi0.shape}, expected ({n},)")
    norm = float(np.vdot(psi0, psi0).real)
    if abs(norm - 1.0) > 1e-10:
        raise DomainError(f"initial state is not normalized (<psi|psi> = {norm!r})")
    t = np.atleast_1d(np.asarray(times, dtype=float))
    coeff = V.T @ psi0
    if kind == "c-product":
        weights = coeff * (psi0 @ V)
        decay = np.exp(-np.outer(t, rate_per_second(spec.widths)))
        p = decay @ weights
        residue = float(np.max(np.abs(p.imag))) if p.size else 0.0
        if residue > imag_tol:
            raise NumericalError(
                f"c-product survival has imaginary residue {residue:.2e}; use kind='norm' for complex eigenvectors"
            )
        return p.real
    if kind == "norm":
        # exp(-i (E - i Gamma/2) t) with energies as angular frequencies; E0 drops out of |.|^2
        rel = spec.eigenvalues - spec.constants.E0
        phase = np.exp(-1j * np.outer(t, rate_per_second(1.0) * rel))
        psi_t = (phase * coeff[None, :]) @ V.T
        return np.einsum("ij,ij->i", psi_t.conj(), psi_t).real
    raise DomainError(f"unknown survival kind {kind!r}")


def spectrum_rows(spec: ResonanceSpectrum):
    E0 = spec.constants.E0
    for j, (e, g) in enumerate(zip(spec.energies, spec.widths)):
        yield j, e - E0, g / spec.constants.gamma


SPECTRUM_HEADER = ("j", "E_minus_E0_cm1", "Gamma_over_gamma")
