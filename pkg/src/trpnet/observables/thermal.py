"""Thermal-equilibrium decay rate and fluorescence quantum yield."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DomainError

ROOM_TEMPERATURE_K = 298.0


@dataclass(frozen=True)
class ThermalReport:
    T: float
    kBT: float
    gamma_th: float
    qy: float
    Z: float

    def as_dict(self):
        return asdict(self)


def boltzmann_weights(energies, T: float, kB: float):
    """Normalized Boltzmann populations and the partition function.

    Energies are shifted by their minimum before exponentiation, so the
    returned ``Z`` is the partition function relative to the lowest state.
    """
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T!r}")
    energies = np.asarray(energies, dtype=float)
    if energies.size == 0:
        raise DomainError("empty spectrum")
    x = np.exp(-(energies - energies.min()) / (kB * T))
    Z = float(x.sum())
    return x / Z, Z


def thermal_gamma(spec, T: float = ROOM_TEMPERATURE_K) -> float:
    p, _ = boltzmann_weights(spec.energies, T, spec.constants.kB)
    return float(p @ spec.widths)


def qy_from_rates(gamma_th: float, gamma_nr: float) -> float:
    return gamma_th / (gamma_th + gamma_nr)


def thermal_qy(spec, T: float = ROOM_TEMPERATURE_K, gamma_nr: float | None = None) -> ThermalReport:
    """Thermally averaged radiative width and the resulting quantum yield.

    The non-radiative rate is taken as the single-chromophore value for every
    eigenstate, so its thermal average is just ``gamma_nr``.
    """
    c = spec.constants
    gamma_nr = c.gamma_nr if gamma_nr is None else gamma_nr
    if not gamma_nr >= 0:
        raise DomainError("gamma_nr must be non-negative")
    p, Z = boltzmann_weights(spec.energies, T, c.kB)
    gamma_th = float(p @ spec.widths)
    return ThermalReport(T=float(T), kBT=c.kB * T, gamma_th=gamma_th, qy=qy_from_rates(gamma_th, gamma_nr), Z=Z)
