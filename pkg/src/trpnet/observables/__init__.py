from .approx import ApproxCentrioleState, approx_centriole_state, centriole_coefficients
from .disorder import DisorderStats, disorder_sweep
from .experiment import RayleighCorrection, absorption_factor, rayleigh_correct, reference_qy
from .fits import FIT_PARAMS, FitKind, FitParams, FitPrediction, fit_curve
from .lineshapes import Lineshape, SpectrumCurve, absorption_curve, fluorescence_curve
from .thermal import ThermalReport, boltzmann_weights, thermal_gamma, thermal_qy

__all__ = [
    "ApproxCentrioleState",
    "DisorderStats",
    "FIT_PARAMS",
    "FitKind",
    "FitParams",
    "FitPrediction",
    "Lineshape",
    "RayleighCorrection",
    "SpectrumCurve",
    "ThermalReport",
    "absorption_curve",
    "absorption_factor",
    "approx_centriole_state",
    "boltzmann_weights",
    "centriole_coefficients",
    "disorder_sweep",
    "fit_curve",
    "fluorescence_curve",
    "rayleigh_correct",
    "reference_qy",
    "thermal_gamma",
    "thermal_qy",
]
