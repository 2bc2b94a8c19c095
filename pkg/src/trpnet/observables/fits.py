"""Closed-form length scalings of the superradiant enhancement max(Gamma)/gamma.

All lengths are nm. Each curve saturates once the structure is a few
wavelengths long; below ``2 * n_S * ell0`` (208 nm) the fits can go negative
and are flagged invalid rather than clipped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..errors import DomainError


@dataclass(frozen=True)
class FitParams:
    lambda0: float = 280.0
    ell0: float = 8.0
    n_D: int = 8
    n_S: int = 13
    N_0: int = 7
    d: int = 3

    @property
    def validity_length(self) -> float:
        return 2 * self.n_S * self.ell0


FIT_PARAMS = FitParams()


class FitKind(str, enum.Enum):
    AXO_1JFF = "axo1jff"
    AXO_6U42 = "axo6u42"
    CENT_1JFF = "cent1jff"
    AXON_BUNDLE = "axon"


@dataclass(frozen=True)
class FitPrediction:
    value: float
    valid: bool


def fit_curve(kind, ell_nm: float, n_mt: int | None = None, params: FitParams = FIT_PARAMS) -> FitPrediction:
    kind = FitKind(kind)
    if not ell_nm > 0:
        raise DomainError(f"length must be positive, got {ell_nm!r}")
    p = params
    t = math.tanh(ell_nm / (2 * p.n_S * p.ell0))
    if kind is FitKind.AXO_1JFF:
        value = p.lambda0 * p.n_D / p.ell0 * ((p.n_S - 2) * t - 1)
    elif kind is FitKind.AXO_6U42:
        value = p.lambda0 * (p.n_S - 3) / p.ell0 * (math.tanh(3 * ell_nm / (2 * p.n_S * p.ell0) - 2) + 1)
    elif kind is FitKind.CENT_1JFF:
        value = p.lambda0 * p.n_D / p.ell0 * (2 * p.n_D * t - 1)
    else:
        if n_mt is None or n_mt < 1:
            raise DomainError("the axon-bundle fit needs a positive n_mt")
        value = p.n_D * (n_mt / p.N_0) ** (1.0 / p.d) * (p.lambda0 * p.n_D / p.ell0 * t - p.n_S)
    return FitPrediction(value, ell_nm >= p.validity_length)
