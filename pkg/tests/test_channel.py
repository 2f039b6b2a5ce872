import math

import numpy as np
import pytest
from scipy.integrate import quad

from flexfet_rx.channel import (
    channel_state,
    concentration_profile,
    low_peclet_branch,
    newman_branch,
    effective_diffusivity,
    mass_transfer_factor,
    received_peak,
    surface_transport,
)
from flexfet_rx.config import SystemConfig

DEF = SystemConfig()


def test_no_flow_no_dispersion():
    c = DEF.with_overrides(flow_velocity=1e-300)
    assert effective_diffusivity(c.channel) == 1e-10


def test_default_effective_diffusivity():
    u, h, w, d0 = 10e-6, 3e-6, 4e-6, 1e-10
    direct = d0 * (1 + 8.5 * u**2 * h**2 * w**2 / (210 * d0**2 * (h**2 + 2.4 * h * w + w**2)))
    assert effective_diffusivity(DEF.channel) == pytest.approx(direct, rel=1e-15)
    assert effective_diffusivity(DEF.channel) == pytest.approx(1.0011e-10, rel=1e-4)


def test_dispersion_increasing_in_flow():
    us = np.geomspace(1e-7, 1e-3, 50)
    d = [effective_diffusivity(DEF.with_overrides(flow_velocity=u).channel) for u in us]
    assert np.all(np.diff(d) > 0)
    assert min(d) >= 1e-10


def test_profile_peak_and_symmetry():
    t = 500.0
    u = DEF.channel.flow_velocity
    d = effective_diffusivity(DEF.channel)
    centre = concentration_profile(u * t, t, DEF)
    assert centre == pytest.approx(1e9 / 12e-12 / math.sqrt(4 * math.pi * d * t), rel=1e-14)
    for delta in (1e-7, 1e-6, 3e-6):
        assert concentration_profile(u * t + delta, t, DEF) == pytest.approx(
            concentration_profile(u * t - delta, t, DEF), rel=1e-12)


@pytest.mark.parametrize("t", [1.0, 100.0, 1000.0, 3e4])
def test_mass_conservation(t):
    u = DEF.channel.flow_velocity
    width = math.sqrt(4 * effective_diffusivity(DEF.channel) * t)
    total, _ = quad(lambda x: concentration_profile(x, t, DEF), u * t - 40 * width, u * t + 40 * width,
                    points=[u * t], epsabs=0, epsrel=1e-12, limit=200)
    assert total * DEF.cross_section_area == pytest.approx(1e9, rel=1e-6)


def test_profile_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        concentration_profile(0.0, 0.0, DEF)


def test_received_peak_defaults():
    t_d, rho, beta = received_peak(DEF)
    assert t_d == pytest.approx(1000.0, rel=1e-15)
    assert beta == pytest.approx(7.4e13, rel=0.01)
    assert rho == pytest.approx(7.4e22, rel=0.01)
    assert rho == 1e9 * beta
    # the peak is the profile at the receiver after the delay
    assert rho == pytest.approx(concentration_profile(10e-3, t_d, DEF), rel=1e-12)


def test_peak_linear_in_ligands():
    r1 = received_peak(DEF.with_overrides(ligand_count=1e7))[1]
    r2 = received_peak(DEF.with_overrides(ligand_count=3e7))[1]
    assert r2 == pytest.approx(3 * r1, rel=1e-14)


def test_beta_decreasing_in_distance_and_area():
    b = [received_peak(DEF.with_overrides(tx_rx_distance=d))[2] for d in np.geomspace(1e-4, 1e-1, 20)]
    assert np.all(np.diff(b) < 0)
    b = [received_peak(DEF.with_overrides(microchannel_height=h))[2] for h in np.geomspace(1e-6, 1e-4, 20)]
    assert np.all(np.diff(b) < 0)


def test_mass_transfer_branches():
    assert newman_branch(1.0) == pytest.approx(0.8075 + 0.7058 - 0.1984, rel=1e-15)
    assert mass_transfer_factor(1.0) == low_peclet_branch(1.0)
    assert mass_transfer_factor(1.0 + 1e-12) == pytest.approx(1.3149, rel=1e-9)
    p = math.exp(-1)
    assert mass_transfer_factor(p) == pytest.approx(2 * math.pi / 5.885 * (1 - 0.09266 * p / 5.885), rel=1e-14)
    # the two branches are about 4% apart at the threshold
    lower_at_one = 2 * math.pi / 4.885 * (1 - 0.09266 / 4.885)
    assert low_peclet_branch(1.0) == pytest.approx(lower_at_one, rel=1e-15)
    assert 0.03 < 1 - lower_at_one / newman_branch(1.0) < 0.05
    with pytest.raises(ValueError):
        mass_transfer_factor(0.0)


def test_mass_transfer_positive_and_continuous():
    for lo, hi in ((1e-6, 1.0), (1.0 + 1e-12, 1e6)):
        p = np.geomspace(lo, hi, 2000)
        vals = np.array([mass_transfer_factor(x) for x in p])
        assert np.all(vals > 0)
        assert np.max(np.abs(np.diff(np.log(vals)))) < 0.01


def test_surface_transport_defaults():
    c = DEF
    d = effective_diffusivity(c.channel)
    q = 10e-6 * 12e-12
    p_s = 6 * q * (10 * 100e-9) ** 2 / (d * 4e-6 * (3e-6) ** 2)
    got_p, got_k = surface_transport(c)
    assert got_p == pytest.approx(p_s, rel=1e-14)
    assert got_k == pytest.approx(d * 4e-6 * mass_transfer_factor(p_s), rel=1e-14)


def test_channel_state():
    s = channel_state(DEF)
    assert s.effective_diffusivity >= DEF.channel.base_diffusivity
    assert s.delay == DEF.channel.tx_rx_distance / DEF.channel.flow_velocity
    assert s.channel_constant > 0 and s.mass_transfer > 0
