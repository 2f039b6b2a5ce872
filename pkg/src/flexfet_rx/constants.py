"""Physical constants (CODATA 2018, exact SI where defined)."""

from scipy import constants as _c

EPS0 = _c.epsilon_0  # F/m
Q = _c.elementary_charge  # C
KB = _c.Boltzmann  # J/K


def thermal_voltage(temperature):
    """k_B T / q in volts."""
    return KB * temperature / Q
