"""End-to-end evaluation of one configuration."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

from .binding import BindingStats, binding_stats
from .channel import ChannelState, channel_state
from .config import SystemConfig
from .electromech import EquilibriumState, PullInPoint, find_pullin, select_bias
from .metrics import LinkMetrics, link_metrics
from .noise import NoiseSpectrum, total_noise
from .transducer import TransductionResult, transconductance, transduce


@dataclass(frozen=True)
class OperatingPoint:
    pullin: PullInPoint
    bias: EquilibriumState
    transconductance: float


@dataclass(frozen=True)
class LinkReport:
    config: SystemConfig
    operating: OperatingPoint
    channel: ChannelState
    binding: BindingStats
    transduction: TransductionResult
    noise: NoiseSpectrum
    metrics: LinkMetrics

    @property
    def bias(self):
        return self.operating.bias


@lru_cache(maxsize=256)
def _operating_point(geometry, material, fraction, i0) -> OperatingPoint:
    cfg = SystemConfig(geometry=geometry, material=material)
    cfg = cfg.with_overrides(subthreshold_prefactor=i0, check=False)
    pullin = find_pullin(cfg)
    bias = select_bias(cfg, fraction, pullin=pullin)
    return OperatingPoint(pullin, bias, transconductance(bias, cfg))


def operating_point(cfg: SystemConfig) -> OperatingPoint:
    """Pull-in point, bias state and g_FET; cached on the device parameters only."""
    return _operating_point(cfg.geometry, cfg.material, cfg.operating.bias_fraction,
                            cfg.fet.subthreshold_prefactor)


def evaluate(cfg: SystemConfig, per_decade: int = 200) -> LinkReport:
    op = operating_point(cfg)
    ch = channel_state(cfg)
    stats = binding_stats(ch.peak_concentration, cfg)
    trans = transduce(stats, op.bias, cfg, g_fet=op.transconductance)
    spec = total_noise(cfg, stats, trans, op.bias, per_decade=per_decade)
    kd_over_beta = cfg.dissociation_constant / ch.channel_constant
    metrics = link_metrics(trans, spec, stats.n_receptors, kd_over_beta,
                           cfg.operating.n_tx_min, cfg.operating.n_tx_max)
    return LinkReport(cfg, op, ch, stats, trans, spec, metrics)


def summary(report: LinkReport) -> dict:
    """Scalar results as a JSON-friendly dict (PSD arrays omitted)."""
    noise = {k: v for k, v in dataclasses.asdict(report.noise).items()
             if k not in ("frequencies", "s_ib", "s_if", "s_total")}
    noise["band"] = list(noise["band"])
    return {
        "pullin": dataclasses.asdict(report.operating.pullin),
        "bias": dataclasses.asdict(report.bias),
        "transconductance": report.operating.transconductance,
        "channel": dataclasses.asdict(report.channel),
        "binding": dataclasses.asdict(report.binding),
        "transduction": dataclasses.asdict(report.transduction),
        "noise": noise,
        "metrics": dataclasses.asdict(report.metrics),
    }
