"""Absorption and fluorescence lineshape spectra from a resonance spectrum."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .thermal import ROOM_TEMPERATURE_K, boltzmann_weights


class Lineshape(str, enum.Enum):
    LORENTZIAN = "lorentzian"
    GAUSSIAN = "gaussian"


@dataclass
class SpectrumCurve:
    grid: np.ndarray
    values: np.ndarray
    lineshape: Lineshape | None = None
    sigma: float | None = None
    normalization: float = 1.0
    domain: str = "energy_cm1"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.size == 0:
            raise DomainError("curve grid must be a non-empty 1-d array")
        if self.values.shape != self.grid.shape:
            raise DomainError("curve values and grid differ in shape")
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("curve grid must be strictly increasing")

    @property
    def peak_position(self) -> float:
        return float(self.grid[int(np.argmax(self.values))])

    def rows(self):
        return zip(self.grid, self.values)


def lineshape_matrix(grid, centers, sigma: float, lineshape) -> np.ndarray:
    """D_j(E) for every grid point (rows) and resonance (columns)."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    shape = Lineshape(lineshape)
    delta = np.asarray(grid, float)[:, None] - np.asarray(centers, float)[None, :]
    if shape is Lineshape.LORENTZIAN:
        return sigma / (delta**2 + sigma**2)
    return np.exp(-(delta**2) / (2.0 * sigma**2))


def _grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("empty energy grid")
    return grid


def _curve(grid, raw, sigma, lineshape, normalize):
    scale = 1.0
    if normalize:
        peak = float(raw.max())
        scale = 1.0 / peak if peak > 0 else 1.0
    return SpectrumCurve(grid, raw * scale, Lineshape(lineshape), float(sigma), scale)


def absorption_curve(spec, sigma: float, lineshape="lorentzian", grid=None, normalize: bool = True) -> SpectrumCurve:
    """A(E) proportional to sum_j Gamma_j D_j(E), peak-normalized unless ``normalize=False``."""
    grid = _grid(default_grid(spec, sigma) if grid is None else grid)
    raw = lineshape_matrix(grid, spec.energies, sigma, lineshape) @ spec.widths
    return _curve(grid, raw, sigma, lineshape, normalize)


def fluorescence_curve(
    spec, sigma: float, lineshape="lorentzian", T: float = ROOM_TEMPERATURE_K, grid=None, normalize: bool = True
) -> SpectrumCurve:
    """I(E) proportional to sum_j p_j(T) Gamma_j D_j(E) with Boltzmann populations p_j."""
    grid = _grid(default_grid(spec, sigma) if grid is None else grid)
    p, _ = boltzmann_weights(spec.energies, T, spec.constants.kB)
    raw = lineshape_matrix(grid, spec.energies, sigma, lineshape) @ (p * spec.widths)
    return _curve(grid, raw, sigma, lineshape, normalize)


def default_grid(spec, sigma: float, points: int = 2001, span: float = 8.0) -> np.ndarray:
    lo = float(spec.energies.min()) - span * sigma
    hi = float(spec.energies.max()) + span * sigma
    return np.linspace(lo, hi, points)
