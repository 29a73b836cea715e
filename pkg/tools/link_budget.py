"""
Link-budget helpers - thermal noise and dB conversions
"""
import numpy as np

from tools.errors import DomainError

BOLTZMANN = 1.380649e-23  # J/K


def db_to_linear(value_db):
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def noise_variance(bw_hz: float, t0_kelvin: float, nf_db: float) -> float:
    """
    Thermal noise power kappa * B_w * T_0 * N_f in watts
    The noise figure is given in dB and converted to linear scale
    """
    if bw_hz <= 0 or t0_kelvin <= 0:
        raise DomainError(f"bandwidth and temperature must be positive (got {bw_hz}, {t0_kelvin})")
    return float(BOLTZMANN * bw_hz * t0_kelvin * db_to_linear(nf_db))
