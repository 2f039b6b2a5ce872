"""Link-level figures of merit: per-symbol SNR and closed-form capacity."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .noise import NoiseSpectrum
from .transducer import TransductionResult

ASIN_TOL = 1e-12


@dataclass(frozen=True)
class LinkMetrics:
    snr: float
    snr_db: float
    capacity: float  # bits per channel use, clamped at 0
    l_factor: float
    raw_capacity: float


def snr(mean_current: float, variance: float) -> float:
    if variance <= 0:
        raise ValueError("current variance must be positive")
    return mean_current**2 / variance


def to_db(ratio: float) -> float:
    return 10.0 * math.log10(ratio) if ratio > 0 else -math.inf


def l_factor(g_fet: float, psi_l: float, n_r: float, var_flicker: float) -> float:
    """Transduction/noise factor in [0, 1] entering the capacity expression."""
    signal = g_fet**2 * psi_l**2 * n_r
    den = 4.0 * var_flicker + signal
    return 0.0 if den == 0 else math.sqrt(signal / den)


def _asin(x):
    if abs(x) > 1.0 + ASIN_TOL:
        raise ArithmeticError(f"arcsin argument {x!r} outside [-1, 1]")
    return math.asin(max(-1.0, min(1.0, x)))


def capacity_closed_form(n_r: float, lf: float, kd_over_beta: float, n_min: float, n_max: float) -> float:
    """Raw (unclamped) capacity in bits; may be negative or -inf."""
    if n_max == n_min:
        raise ValueError("degenerate transmit range: n_tx_max == n_tx_min")
    if not 0 <= n_min < n_max:
        raise ValueError("need 0 <= n_tx_min < n_tx_max")

    def arg(n):
        # (n - K)/(n + K) written to stay finite for n -> inf
        return lf * (1.0 - 2.0 * kd_over_beta / (n + kd_over_beta))

    spread = _asin(arg(n_max)) - _asin(arg(n_min))
    head = 0.5 * math.log2(n_r / (2.0 * math.pi * math.e))
    return head + (math.log2(spread) if spread > 0 else -math.inf)


def link_metrics(trans: TransductionResult, noise: NoiseSpectrum, n_r: float,
                 kd_over_beta: float, n_min: float, n_max: float) -> LinkMetrics:
    ratio = snr(trans.mean_current, noise.var_total)
    lf = l_factor(trans.transconductance, trans.single_ligand_potential, n_r, noise.var_flicker)
    raw = capacity_closed_form(n_r, lf, kd_over_beta, n_min, n_max)
    return LinkMetrics(snr=ratio, snr_db=to_db(ratio), capacity=max(raw, 0.0), l_factor=lf,
                       raw_capacity=raw)
