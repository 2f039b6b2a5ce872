"""From a released pulse to bound receptors.

A pulse of ligands drifts down the microchannel, arrives after d/u seconds
and is sampled at its peak; receptors on the wires then sit at a binomial
equilibrium.  The Monte Carlo run at the end checks the binomial/Lorentzian
picture against a direct telegraph simulation.
"""
import math

import numpy as np

from flexfet_rx import SystemConfig
from flexfet_rx.binding import binding_stats, mc_binding_oracle
from flexfet_rx.channel import channel_state, concentration_profile
from flexfet_rx.noise import occupancy_psd

cfg = SystemConfig()
ch = channel_state(cfg)
print(f"D_eff = {ch.effective_diffusivity:.5e} m^2/s (D0 = {cfg.channel.base_diffusivity:g})")
print(f"delay t_D = {ch.delay:.0f} s, beta_ch = {ch.channel_constant:.4e} m^-3, "
      f"peak rho_R = {ch.peak_concentration:.4e} m^-3")
print(f"surface Peclet P_s = {ch.peclet_surface:.3g}, k_T = {ch.mass_transfer:.3e}")

x = np.linspace(9.99e-3, 10.01e-3, 5)
print("profile near the receiver at t_D:", np.array2string(concentration_profile(x, ch.delay, cfg), precision=3))

st = binding_stats(ch.peak_concentration, cfg)
print(f"P_on = {st.occupancy:.9f}, N_R = {st.n_receptors:.3g}, "
      f"mean bound = {st.mean_bound:.6g}, var = {st.var_bound:.4g}, tau_B = {st.relaxation_time:.3e} s")

# the default channel saturates the receptors; go to rho = K_D to see noise
kd = cfg.dissociation_constant
n = 100_000
res = mc_binding_oracle(kd, cfg, n, seed=1, n_segments=64, samples_per_segment=8192)
print(f"Monte Carlo at rho = K_D, {n} receptors: mean {res.sample_mean:.1f} +/- {res.std_error:.1f} "
      f"(theory {n / 2:.0f}), var {res.sample_var:.0f} (theory {n / 4:.0f})")

ref = binding_stats(kd, cfg.with_overrides(receptor_density=n / cfg.receptor_area))
f_c = 1 / (2 * math.pi * res.relaxation_time)
# Welch bins are ~2 Hz wide here, so stay a few bins above DC
for f in f_c * np.array([0.7, 1.0, 2.0, 4.0]):
    i = np.argmin(abs(res.frequencies - f))
    print(f"  f = {res.frequencies[i]:.3e} Hz: PSD {res.psd[i]:.4e}  Lorentzian {occupancy_psd(res.frequencies[i], ref):.4e}")
