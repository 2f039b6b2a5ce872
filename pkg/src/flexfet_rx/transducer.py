"""Bound ligands -> stiffness -> gap -> surface potential -> drain current.

All post-capture quantities are first-order perturbations about the
pre-capture operating point returned by :func:`electromech.select_bias`.

Note on units: the surface-potential shift is normalised by
``q * eps_s * N_A * A_e`` with ``eps_s`` the *relative* substrate
permittivity.  Multiplying by eps0 as well (to make the expression look
dimensionally tidy) inflates the shift by 1/eps0 ~ 1e11 and overflows the
sensitivity exponential for any realistic binding level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .binding import BindingStats
from .config import SystemConfig
from .constants import EPS0, KB, Q, thermal_voltage
from .electromech import EquilibriumState, solve_equilibrium, stiffness_single

MAX_EXPONENT = 700.0


class BiasRegimeError(ValueError):
    """Operating point too deep for the near-pull-in deflection formula."""


@dataclass(frozen=True)
class TransductionResult:
    delta_stiffness: float
    delta_gap: float
    delta_potential: float
    sensitivity: float
    drain_current: float  # I_DS1, pre-capture
    mean_current: float  # I_DS1 / S
    transconductance: float
    single_ligand_potential: float  # psi_L
    bound_density: float


def delta_stiffness(n_s: float, cfg: SystemConfig) -> float:
    """Array stiffness change for a bound-ligand surface density ``n_s`` [m^-2].

    Each bound molecule adds a volume pi R_t^2 H_t spread over the wire
    surface, thickening the wire by ``n_s * A_t * H_t``; the R^4 stiffness law
    gives dk/k = 4 dR/R per wire.
    """
    if n_s < 0:
        raise ValueError("bound density must be non-negative")
    lg, geom = cfg.ligand, cfg.geometry
    d_r = n_s * math.pi * lg.ligand_radius**2 * lg.ligand_height
    dk_single = 4.0 * d_r / geom.nanowire_radius * stiffness_single(geom, cfg.material)
    return geom.array_count * dk_single


def delta_deflection(dk: float, bias: EquilibriumState, cfg: SystemConfig) -> float:
    y0, y = cfg.geometry.initial_gap, bias.gap
    if 3.0 * y - y0 <= 0:
        raise BiasRegimeError(f"3y - y0 = {3 * y - y0:.3g} m <= 0 at the bias point")
    if dk < 0:
        raise ValueError("stiffness change must be non-negative")
    v_eff = bias.gate_voltage - bias.surface_potential
    return math.sqrt(EPS0 * cfg.electrode_area * v_eff**2 / (2.0 * (3.0 * y - y0)) * dk / bias.stiffness**2)


def _potential_scale(cfg):
    m = cfg.material
    return Q * m.substrate_rel_permittivity * m.substrate_doping * cfg.electrode_area


def delta_surface_potential(dk: float, dy: float, bias: EquilibriumState, cfg: SystemConfig) -> float:
    y0 = cfg.geometry.initial_gap
    return (-bias.stiffness * dy + dk * (y0 - bias.gap)) / _potential_scale(cfg)


def sensitivity_exponent(dk: float, dy: float, bias: EquilibriumState, cfg: SystemConfig) -> float:
    """ln S written directly in mechanical quantities (no q appears)."""
    m = cfg.material
    y0 = cfg.geometry.initial_gap
    num = bias.stiffness * dy - dk * (y0 - bias.gap)
    return num / (KB * m.temperature * m.substrate_rel_permittivity * m.substrate_doping * cfg.electrode_area)


def drain_current(psi_s: float, cfg: SystemConfig) -> float:
    """Subthreshold drain current I_0 exp(psi_s / V_t), unit ideality."""
    return cfg.fet.subthreshold_prefactor * math.exp(psi_s / thermal_voltage(cfg.material.temperature))


def transconductance(bias: EquilibriumState, cfg: SystemConfig, rel_step: float = 1e-4) -> float:
    """dI_DS/dV_G by central difference through the self-consistent solver."""
    v = bias.gate_voltage
    if v <= 0:
        raise ValueError("transconductance needs a positive bias voltage")
    h = rel_step * v
    hi = solve_equilibrium(v + h, cfg, bias.electrode)
    lo = solve_equilibrium(v - h, cfg, bias.electrode)
    return (drain_current(hi.surface_potential, cfg) - drain_current(lo.surface_potential, cfg)) / (2.0 * h)


def sensitivity(dk, dy, bias: EquilibriumState, cfg: SystemConfig, g_fet: float = None):
    """Return ``(S, mean_current, I_DS1, g_FET)``.

    S = I_DS1 / I_DS2 = exp(-q dpsi / k_B T).
    """
    d_psi = delta_surface_potential(dk, dy, bias, cfg)
    expo = -d_psi / thermal_voltage(cfg.material.temperature)
    if abs(expo) > MAX_EXPONENT:
        raise OverflowError(f"sensitivity exponent {expo:.4g} out of range (dpsi = {d_psi:.4g} V)")
    s = math.exp(expo)
    i1 = drain_current(bias.surface_potential, cfg)
    if g_fet is None:
        g_fet = transconductance(bias, cfg)
    return s, i1 / s, i1, g_fet


def transduce(stats: BindingStats, bias: EquilibriumState, cfg: SystemConfig,
              g_fet: float = None) -> TransductionResult:
    """Full transduction chain for the mean bound count in ``stats``."""
    area = cfg.receptor_area
    n_s = stats.mean_bound / area
    dk = delta_stiffness(n_s, cfg)
    dy = delta_deflection(dk, bias, cfg)
    d_psi = delta_surface_potential(dk, dy, bias, cfg)
    s, mu_i, i1, g = sensitivity(dk, dy, bias, cfg, g_fet)

    dk1 = delta_stiffness(1.0 / area, cfg)
    psi_l = delta_surface_potential(dk1, delta_deflection(dk1, bias, cfg), bias, cfg)
    return TransductionResult(
        delta_stiffness=dk,
        delta_gap=dy,
        delta_potential=d_psi,
        sensitivity=s,
        drain_current=i1,
        mean_current=mu_i,
        transconductance=g,
        single_ligand_potential=psi_l,
        bound_density=n_s,
    )


def deflection_cross_check(dk: float, bias: EquilibriumState, cfg: SystemConfig):
    """Compare the near-pull-in deflection formula with a full re-solve.

    Re-solves the force balance at the same gate voltage with the stiffness
    raised by ``dk`` (by scaling the Young's modulus).  Returns
    ``(dy_formula, dy_resolved)``; the latter is the signed gap change.
    """
    k_single = stiffness_single(cfg.geometry, cfg.material)
    scale = 1.0 + dk / (cfg.geometry.array_count * k_single)
    stiffer = cfg.with_overrides(youngs_modulus=cfg.material.youngs_modulus * scale)
    post = solve_equilibrium(bias.gate_voltage, stiffer, bias.electrode)
    return delta_deflection(dk, bias, cfg), post.gap - bias.gap
