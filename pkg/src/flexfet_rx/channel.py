"""Advection-diffusion transport from transmitter to receiver.

A single released pulse of ``ligand_count`` molecules travels down a
rectangular microchannel.  Taylor-Aris dispersion sets the effective
diffusivity; the receiver samples the pulse peak after the advective delay.
No intersymbol interference is modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig


@dataclass(frozen=True)
class ChannelState:
    effective_diffusivity: float
    delay: float
    channel_constant: float  # beta_ch, peak concentration per released ligand
    peak_concentration: float
    cross_section_area: float
    peclet_surface: float  # P_s
    mass_transfer: float  # k_T


def effective_diffusivity(ch) -> float:
    """Taylor-Aris dispersion coefficient for a rectangular cross-section."""
    u, h, w, d0 = ch.flow_velocity, ch.microchannel_height, ch.microchannel_width, ch.base_diffusivity
    return d0 * (1.0 + 8.5 * u**2 * h**2 * w**2 / (210.0 * d0**2 * (h**2 + 2.4 * h * w + w**2)))


def concentration_profile(x, t, cfg: SystemConfig):
    """Ligand concentration rho_m(x, t) [m^-3] of the Gaussian pulse."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("concentration profile defined only for t > 0")
    ch = cfg.channel
    d = effective_diffusivity(ch)
    amp = cfg.ligand.ligand_count / cfg.cross_section_area / np.sqrt(4.0 * np.pi * d * t)
    out = amp * np.exp(-(np.asarray(x) - ch.flow_velocity * t) ** 2 / (4.0 * d * t))
    return float(out) if np.ndim(out) == 0 else out


def received_peak(cfg: SystemConfig):
    """Return ``(t_D, rho_R, beta_ch)`` for the pulse peak at the receiver."""
    ch = cfg.channel
    t_d = ch.tx_rx_distance / ch.flow_velocity
    beta = 1.0 / (cfg.cross_section_area * math.sqrt(4.0 * math.pi * effective_diffusivity(ch) * t_d))
    return t_d, cfg.ligand.ligand_count * beta, beta


def newman_branch(p_s):
    """Three-term series used above P_s = 1."""
    return 0.8075 * p_s ** (1 / 3) + 0.7058 * p_s ** (-1 / 6) - 0.1984 * p_s ** (-1 / 3)


def low_peclet_branch(p_s):
    """Logarithmic form used for P_s <= 1."""
    den = 4.885 - math.log(p_s)
    return 2.0 * math.pi / den * (1.0 - 0.09266 * p_s / den)


def mass_transfer_factor(p_s: float) -> float:
    """Dimensionless bracket of the surface mass-transfer correlation.

    The two branches do not meet at P_s = 1 (about 4% apart); the threshold
    is kept as is.
    """
    if p_s <= 0:
        raise ValueError("P_s must be positive")
    return newman_branch(p_s) if p_s > 1 else low_peclet_branch(p_s)


def surface_transport(cfg: SystemConfig):
    """Return ``(P_s, k_T)`` at the receiver surface."""
    ch = cfg.channel
    d = effective_diffusivity(ch)
    q = ch.flow_velocity * cfg.cross_section_area
    p_s = 6.0 * q * cfg.receiver_width**2 / (d * ch.microchannel_width * ch.microchannel_height**2)
    return p_s, d * ch.microchannel_width * mass_transfer_factor(p_s)


def channel_state(cfg: SystemConfig) -> ChannelState:
    t_d, rho, beta = received_peak(cfg)
    p_s, k_t = surface_transport(cfg)
    return ChannelState(
        effective_diffusivity=effective_diffusivity(cfg.channel),
        delay=t_d,
        channel_constant=beta,
        peak_concentration=rho,
        cross_section_area=cfg.cross_section_area,
        peclet_surface=p_s,
        mass_transfer=k_t,
    )
