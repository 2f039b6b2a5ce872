"""Output-current noise: receptor binding (Lorentzian) plus oxide-trap flicker (1/f).

Both sources are treated as independent Gaussian processes and their PSDs
add.  PSDs are two-sided; variances integrate over both signs of frequency
but only across ``f_min <= |f| <= f_max``, since the 1/f term diverges on
the full real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .binding import BindingStats
from .config import SystemConfig
from .constants import Q, thermal_voltage
from .electromech import EquilibriumState
from .transducer import TransductionResult

BAND_CONVENTION = "two-sided: var = 2 * integral_{f_min}^{f_max} S(f) df"
_QUAD_RTOL = 1e-13
_CHECK_RTOL = 1e-8


class NoiseQuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NoiseSpectrum:
    frequencies: np.ndarray
    s_ib: np.ndarray
    s_if: np.ndarray
    s_total: np.ndarray
    var_total: float  # sigma_I^2
    var_flicker: float  # sigma_F^2
    var_binding: float
    var_binding_closed: float
    var_flicker_closed: float
    band: tuple
    convention: str = BAND_CONVENTION


def occupancy_psd(f, stats: BindingStats):
    """Lorentzian PSD of the bound-receptor count [1/Hz]."""
    tau = stats.relaxation_time
    f = np.asarray(f, dtype=float)
    return stats.var_bound * 2.0 * tau / (1.0 + (2.0 * np.pi * f * tau) ** 2)


def binding_psd(f, stats: BindingStats, psi_l: float, g_fet: float):
    """Binding noise referred to drain current [A^2/Hz]."""
    return occupancy_psd(f, stats) * psi_l**2 * g_fet**2


def flicker_coefficient(bias: EquilibriumState, cfg: SystemConfig, g_fet: float) -> float:
    """K in S_IF(f) = K / |f|  [A^2]."""
    fet = cfg.fet
    cox = cfg.oxide_capacitance
    # N_ot is per eV, so k_B T enters in eV (k_B T / q) times q^2
    kt_ev = thermal_voltage(cfg.material.temperature)
    base = fet.tunneling_distance * kt_ev * Q**2 * fet.oxide_trap_density
    base /= fet.channel_width * fet.channel_length * cox**2
    mobility_term = 1.0 + fet.scattering_coeff * fet.mobility * cox * (
        bias.gate_voltage - abs(fet.threshold_voltage))
    return base * g_fet**2 * mobility_term**2


def flicker_psd(f, bias: EquilibriumState, cfg: SystemConfig, g_fet: float):
    f = np.asarray(f, dtype=float)
    if np.any(f == 0):
        raise ValueError("flicker PSD is singular at f = 0")
    out = flicker_coefficient(bias, cfg, g_fet) / np.abs(f)
    return float(out) if out.ndim == 0 else out


def binding_variance_closed(stats, psi_l, g_fet, f_min, f_max) -> float:
    tau = stats.relaxation_time
    arc = math.atan(2 * math.pi * f_max * tau) - math.atan(2 * math.pi * f_min * tau)
    return 2.0 * stats.var_bound * psi_l**2 * g_fet**2 * arc / math.pi


def flicker_variance_closed(k_flicker, f_min, f_max) -> float:
    return 2.0 * k_flicker * math.log(f_max / f_min)


def band_variance(psd, f_min, f_max, knee=None) -> float:
    """2 * integral of ``psd`` over [f_min, f_max], adaptive in log frequency."""
    lo, hi = math.log(f_min), math.log(f_max)
    points = None
    if knee is not None and f_min < knee < f_max:
        points = [math.log(knee)]
    val, _err = quad(lambda s: psd(math.exp(s)) * math.exp(s), lo, hi, points=points,
                     epsabs=0.0, epsrel=_QUAD_RTOL, limit=500)
    return 2.0 * val


def frequency_grid(f_min, f_max, per_decade=200):
    decades = math.log10(f_max / f_min)
    n = max(int(math.ceil(decades * per_decade)) + 1, 2)
    return np.logspace(math.log10(f_min), math.log10(f_max), n)


def _agree(a, b):
    scale = max(abs(a), abs(b))
    return scale == 0 or abs(a - b) <= _CHECK_RTOL * scale


def total_noise(cfg: SystemConfig, stats: BindingStats, trans: TransductionResult,
                bias: EquilibriumState, per_decade: int = 200) -> NoiseSpectrum:
    """Evaluate both PSDs on a log grid and their band-limited variances."""
    f_min, f_max = cfg.fet.f_min, cfg.fet.f_max
    if not 0 < f_min < f_max:
        raise ValueError(f"invalid noise band [{f_min}, {f_max}]")
    g = trans.transconductance
    psi_l = trans.single_ligand_potential
    k_f = flicker_coefficient(bias, cfg, g)

    freqs = frequency_grid(f_min, f_max, per_decade)
    s_ib = binding_psd(freqs, stats, psi_l, g)
    s_if = k_f / freqs

    knee = 1.0 / (2.0 * math.pi * stats.relaxation_time)
    var_b = band_variance(lambda f: binding_psd(f, stats, psi_l, g), f_min, f_max, knee)
    var_f = band_variance(lambda f: k_f / f, f_min, f_max)
    var_b_closed = binding_variance_closed(stats, psi_l, g, f_min, f_max)
    var_f_closed = flicker_variance_closed(k_f, f_min, f_max)
    for name, a, b in (("binding", var_b, var_b_closed), ("flicker", var_f, var_f_closed)):
        if not _agree(a, b):
            raise NoiseQuadratureError(
                f"{name} band variance: quadrature {a:.12g} vs closed form {b:.12g} "
                f"over [{f_min:g}, {f_max:g}] Hz")
    return NoiseSpectrum(
        frequencies=freqs,
        s_ib=s_ib,
        s_if=s_if,
        s_total=s_ib + s_if,
        var_total=var_b + var_f,
        var_flicker=var_f,
        var_binding=var_b,
        var_binding_closed=var_b_closed,
        var_flicker_closed=var_f_closed,
        band=(f_min, f_max),
    )
