"""Helpers for steady-state quantum-yield measurements."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import lsq_linear

from ..errors import DomainError
from .lineshapes import SpectrumCurve

RAYLEIGH_FIT_RANGE_NM = (307.0, 800.0)
MIN_FIT_SAMPLES = 8


def absorption_factor(optical_density: float) -> float:
    """Fraction of light absorbed, 1 - 10^-A."""
    return 1.0 - 10.0 ** (-optical_density)


def reference_qy(F_s, F_r, a_s, a_r, n_s, n_r, qy_r) -> float:
    """Relative quantum yield against a reference fluorophore.

    qy_s = (F_s a_r n_s^2) / (F_r a_s n_r^2) * qy_r
    """
    values = dict(F_s=F_s, F_r=F_r, a_s=a_s, a_r=a_r, n_s=n_s, n_r=n_r, qy_r=qy_r)
    bad = [k for k, v in values.items() if not v > 0]
    if bad:
        raise DomainError(f"reference_qy inputs must be positive: {bad}")
    return (F_s * a_r * n_s**2) / (F_r * a_s * n_r**2) * qy_r


@dataclass
class RayleighCorrection:
    corrected: SpectrumCurve
    background: np.ndarray
    b: float
    c: float
    fit_range: tuple


def rayleigh_correct(curve: SpectrumCurve, fit_range=RAYLEIGH_FIT_RANGE_NM, offset: bool = True) -> RayleighCorrection:
    """Fit b / lambda^4 (+ c, c >= 0) over ``fit_range`` and subtract it everywhere.

    ``curve.grid`` is wavelength in nm. Negative values after subtraction are
    clamped to zero. With ``offset=False`` the background is pure b / lambda^4.
    """
    lam = curve.grid
    lo, hi = fit_range
    mask = (lam >= lo) & (lam <= hi)
    if mask.sum() < MIN_FIT_SAMPLES:
        raise DomainError(f"only {int(mask.sum())} samples in the {lo}-{hi} nm fit range, need {MIN_FIT_SAMPLES}")
    # regressor scaled to order one at the short end of the fit window
    scaled = (lo / lam) ** 4
    columns = [scaled[mask]]
    lower, upper = [-np.inf], [np.inf]
    if offset:
        columns.append(np.ones(int(mask.sum())))
        lower.append(0.0)
        upper.append(np.inf)
    A = np.column_stack(columns)
    result = lsq_linear(A, curve.values[mask], bounds=(lower, upper), method="bvls")
    b_scaled = float(result.x[0])
    c = float(result.x[1]) if offset else 0.0
    background = b_scaled * scaled + c
    corrected = np.clip(curve.values - background, 0.0, None)
    out = SpectrumCurve(lam.copy(), corrected, domain=curve.domain)
    return RayleighCorrection(out, background, b_scaled * lo**4, c, (lo, hi))
