"""Electromechanics of the suspended nanowire-array gate.

Stiffness, array capacitance and electrostatic force, the semiconductor
surface field, and the coupled force-balance / gate-voltage relations that
fix the pre-capture gap ``y`` and surface potential ``psi_s``.

Two electrode models are available wherever a force law is needed:
``"array"`` (the periodic cylinder-array expressions) and ``"planar"``
(parallel plate with area A_e).  The planar model exists mainly to check
the solver against the textbook 2/3-gap pull-in result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .config import ConfigError, SystemConfig
from .constants import EPS0, Q, thermal_voltage

LN2 = math.log(2.0)
SINH_ASYMPTOTE = 30.0
PSI_MAX = 1.5  # V; surface-potential bracket
_GRID = 512


class EquilibriumError(RuntimeError):
    pass


class PullInExceeded(EquilibriumError):
    """No stable gap exists: the gate voltage is beyond pull-in."""


@dataclass(frozen=True)
class EquilibriumState:
    gate_voltage: float
    gap: float
    surface_potential: float
    capacitance: float
    stiffness: float
    stable: bool
    electrode: str = "array"
    initial_gap: float = None

    @property
    def deflection(self):
        return None if self.initial_gap is None else self.initial_gap - self.gap


@dataclass(frozen=True)
class PullInPoint:
    voltage: float
    gap: float


# --------------------------------------------------------------------------
# mechanics

def stiffness_single(geom, mat) -> float:
    """Fixed-fixed cylindrical beam: alpha * E * pi R^4 / (4 L^3)."""
    R, L = geom.nanowire_radius, geom.nanowire_length
    return geom.geometric_factor * mat.youngs_modulus * math.pi * R**4 / (4.0 * L**3)


def stiffness_array(k_single: float, n_array: int) -> float:
    if n_array < 1:
        raise ValueError("array_count must be >= 1")
    return n_array * k_single


def array_stiffness(cfg: SystemConfig) -> float:
    return stiffness_array(stiffness_single(cfg.geometry, cfg.material), cfg.geometry.array_count)


# --------------------------------------------------------------------------
# electrostatics

def _log_ratio(y, geom):
    """ln( sinh(2 pi (y+R)/g) / (pi R / g) ) and the sinh argument."""
    R, g = geom.nanowire_radius, geom.inter_wire_spacing
    x = 2.0 * np.pi * (np.asarray(y, dtype=float) + R) / g
    small = np.minimum(x, SINH_ASYMPTOTE)
    log_sinh = np.where(x > SINH_ASYMPTOTE, x - LN2, np.log(np.sinh(small)))
    lr = log_sinh - math.log(math.pi * R / g)
    if np.any(lr <= 0):
        raise ValueError("non-physical array geometry: sinh(2pi(y+R)/g)/(pi R/g) <= 1")
    return lr, x


def capacitance_array(y, geom):
    """Per-nanowire capacitance of the periodic array above a ground plane."""
    _check_gap(y)
    lr, _ = _log_ratio(y, geom)
    return _scalar(2.0 * np.pi * EPS0 * geom.nanowire_length / lr)


def capacitance_cylinder(y, geom):
    """Isolated cylinder above a plane, the g -> infinity limit of the array form."""
    _check_gap(y)
    y = np.asarray(y, dtype=float)
    return _scalar(2.0 * np.pi * EPS0 * geom.nanowire_length / np.log(2.0 * (1.0 + y / geom.nanowire_radius)))


def capacitance_planar(y, area):
    _check_gap(y)
    return _scalar(EPS0 * area / np.asarray(y, dtype=float))


def force_electrostatic(y, v_g, geom):
    """Attractive force on the array electrode (positive towards the substrate)."""
    _check_gap(y)
    lr, x = _log_ratio(y, geom)
    coth = 1.0 / np.tanh(x)
    f = 2.0 * np.pi**2 * EPS0 * geom.nanowire_length * coth / (geom.inter_wire_spacing * lr**2)
    return _scalar(f * np.asarray(v_g, dtype=float) ** 2)


def force_planar(y, v_g, area):
    _check_gap(y)
    y = np.asarray(y, dtype=float)
    return _scalar(EPS0 * area * np.asarray(v_g, dtype=float) ** 2 / (2.0 * y**2))


def _check_gap(y):
    if np.any(np.asarray(y) <= 0):
        raise ValueError("gap must be positive")


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def _force_per_volt2(cfg, electrode):
    if electrode == "array":
        return lambda y: force_electrostatic(y, 1.0, cfg.geometry)
    if electrode == "planar":
        area = cfg.electrode_area
        return lambda y: force_planar(y, 1.0, area)
    raise ValueError(f"unknown electrode model {electrode!r}")


def _capacitance(y, cfg, electrode):
    if electrode == "array":
        return capacitance_array(y, cfg.geometry)
    return capacitance_planar(y, cfg.electrode_area)


# --------------------------------------------------------------------------
# semiconductor

def _expm1_minus_x(x):
    """exp(x) - 1 - x without cancellation near zero."""
    x = np.asarray(x, dtype=float)
    series = x * x * (1 / 2 + x * (1 / 6 + x * (1 / 24 + x * (1 / 120 + x * (
        1 / 720 + x * (1 / 5040 + x * (1 / 40320 + x * (1 / 362880 + x / 3628800))))))))
    return np.where(np.abs(x) < 0.05, series, np.expm1(x) - x)


def semiconductor_field(psi_s, mat):
    """Surface field E_s(psi_s) of a p-type substrate (depletion/inversion branch)."""
    psi = np.asarray(psi_s, dtype=float)
    if np.any(psi < 0):
        raise ValueError("surface potential must be >= 0")
    vt = thermal_voltage(mat.temperature)
    x = psi / vt
    r2 = (mat.intrinsic_carrier_density / mat.substrate_doping) ** 2
    # psi + (e^-x - 1) vt - r2 (psi - (e^x - 1) vt), written as two
    # non-negative pieces
    bracket = vt * (_expm1_minus_x(-x) + r2 * _expm1_minus_x(x))
    tiny = 1e-30 * vt
    if np.any(bracket < -tiny):
        raise ValueError("negative radicand in surface-field expression")
    bracket = np.maximum(bracket, 0.0)
    pref = math.sqrt(2.0 * Q * mat.substrate_doping / (EPS0 * mat.substrate_rel_permittivity))
    return _scalar(pref * np.sqrt(bracket))


def gate_voltage_from_potential(psi_s, y, cfg):
    """V_G = (y + y_d/eps_d) eps_s E_s(psi_s) + psi_s."""
    g, m = cfg.geometry, cfg.material
    eff = y + g.dielectric_thickness / m.dielectric_rel_permittivity
    return eff * m.substrate_rel_permittivity * semiconductor_field(psi_s, m) + psi_s


def solve_surface_potential(v_g: float, y: float, cfg: SystemConfig) -> float:
    if v_g == 0:
        return 0.0
    if v_g < 0:
        raise ValueError("gate voltage must be >= 0")

    def resid(psi):
        return gate_voltage_from_potential(psi, y, cfg) - v_g

    if resid(PSI_MAX) < 0:
        raise EquilibriumError(f"surface potential above {PSI_MAX} V bracket at V_G={v_g:g} V")
    return brentq(resid, 0.0, PSI_MAX, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


# --------------------------------------------------------------------------
# force balance

def _force_balance(v_g, cfg, electrode="array"):
    """Deflection u = y0 - y of the largest-gap equilibrium.

    Works in the deflection variable so that tiny deflections keep full
    relative precision.  Raises PullInExceeded when the restoring margin
    k u - F(y0 - u) never reaches zero on the admissible range.
    """
    y0 = cfg.geometry.initial_gap
    y_floor = cfg.geometry.dielectric_thickness
    if y_floor >= y0:
        raise ConfigError("dielectric_thickness must be smaller than initial_gap", "dielectric_thickness")
    k = array_stiffness(cfg)
    f1 = _force_per_volt2(cfg, electrode)
    v2 = v_g * v_g
    u_max = y0 - y_floor

    def margin(u):
        return k * u - v2 * f1(y0 - u)

    u = np.linspace(0.0, u_max, _GRID + 1)[:-1]
    h = k * u - v2 * f1(y0 - u)
    hit = np.flatnonzero(h >= 0)
    if hit.size:
        i = hit[0]
        if h[i] == 0:
            return float(u[i]), k, margin
        lo, hi = u[i - 1], u[i]
    else:
        j = int(np.argmax(h))
        lo_b, hi_b = u[max(j - 1, 0)], (u[j + 1] if j + 1 < u.size else u_max)
        res = minimize_scalar(lambda s: -margin(s), bounds=(lo_b, hi_b), method="bounded",
                              options={"xatol": 1e-9 * u_max})
        if -res.fun < 0:
            raise PullInExceeded(f"no equilibrium at V_G = {v_g:.6g} V (beyond pull-in)")
        lo, hi = 0.0, float(res.x)
    root = brentq(margin, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return root, k, margin


def _is_stable(u, margin, u_max):
    # restoring if the net upward force grows with deflection
    step = 1e-7 * u_max
    a, b = max(u - step, 0.0), min(u + step, u_max)
    return (margin(b) - margin(a)) / (b - a) > 0


def solve_equilibrium(v_g: float, cfg: SystemConfig, electrode: str = "array") -> EquilibriumState:
    """Self-consistent gap and surface potential at gate voltage ``v_g``.

    The force balance is solved first for the largest admissible gap (the
    branch reached by ramping up from zero bias); the surface potential then
    follows from a monotone 1-D solve of the gate-voltage relation.
    """
    if v_g < 0:
        raise ValueError("gate voltage must be >= 0")
    y0 = cfg.geometry.initial_gap
    u_max = y0 - cfg.geometry.dielectric_thickness
    if v_g == 0:
        u, k = 0.0, array_stiffness(cfg)
        stable = True
    else:
        u, k, margin = _force_balance(v_g, cfg, electrode)
        stable = _is_stable(u, margin, u_max)
    y = y0 - u
    psi = solve_surface_potential(v_g, y, cfg)
    return EquilibriumState(
        gate_voltage=float(v_g),
        gap=float(y),
        surface_potential=float(psi),
        capacitance=float(_capacitance(y, cfg, electrode)),
        stiffness=float(k),
        stable=bool(stable),
        electrode=electrode,
        initial_gap=y0,
    )


def equilibrium_residuals(state: EquilibriumState, cfg: SystemConfig):
    """Relative residuals of the force balance and the gate-voltage relation."""
    y0 = cfg.geometry.initial_gap
    f_s = state.stiffness * (y0 - state.gap)
    f_e = _force_per_volt2(cfg, state.electrode)(state.gap) * state.gate_voltage**2
    scale = max(abs(f_s), abs(f_e))
    r_force = 0.0 if scale == 0 else abs(f_s - f_e) / scale
    v = gate_voltage_from_potential(state.surface_potential, state.gap, cfg)
    r_volt = 0.0 if state.gate_voltage == 0 else abs(v - state.gate_voltage) / state.gate_voltage
    return r_force, r_volt


def _has_equilibrium(v_g, cfg, electrode):
    try:
        u, _, margin = _force_balance(v_g, cfg, electrode)
    except PullInExceeded:
        return False
    y0 = cfg.geometry.initial_gap
    return _is_stable(u, margin, y0 - cfg.geometry.dielectric_thickness)


def find_pullin(cfg: SystemConfig, electrode: str = "array", rtol: float = 1e-6) -> PullInPoint:
    """Largest gate voltage with a stable equilibrium, by doubling + bisection."""
    v_lo, v_hi = 0.0, 1.0
    doublings = 0
    while _has_equilibrium(v_hi, cfg, electrode):
        v_lo = v_hi
        v_hi *= 2.0
        doublings += 1
        if doublings > 1000:
            raise ConfigError("pull-in voltage search did not terminate")
    while v_hi - v_lo > rtol * v_hi:
        mid = 0.5 * (v_lo + v_hi)
        if _has_equilibrium(mid, cfg, electrode):
            v_lo = mid
        else:
            v_hi = mid
    if v_lo == 0.0:
        raise ConfigError("no stable equilibrium above zero bias")
    u, _, _ = _force_balance(v_lo, cfg, electrode)
    return PullInPoint(voltage=v_lo, gap=cfg.geometry.initial_gap - u)


def select_bias(cfg: SystemConfig, fraction: float = None, electrode: str = "array",
                pullin: PullInPoint = None) -> EquilibriumState:
    """Operating point at ``fraction`` of the pull-in voltage."""
    if fraction is None:
        fraction = cfg.operating.bias_fraction
    if not 0 < fraction < 1:
        raise ValueError(f"bias fraction must lie in (0, 1), got {fraction}")
    if pullin is None:
        pullin = find_pullin(cfg, electrode)
    return solve_equilibrium(fraction * pullin.voltage, cfg, electrode)
