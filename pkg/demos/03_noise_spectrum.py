"""Binding vs flicker noise at the drain.

Prints the two PSDs across the band and the band-limited variances,
with their closed forms alongside the quadrature.  Saves a plot if
matplotlib is around.
"""
import sys

import numpy as np

from flexfet_rx import SystemConfig, evaluate

cfg = SystemConfig()
rep = evaluate(cfg)
n = rep.noise
print(f"band {n.band[0]:g} .. {n.band[1]:g} Hz, {n.convention}")
for f in (1e-4, 1e-2, 1, 1e2, 1e4):
    i = np.argmin(abs(n.frequencies - f))
    print(f"  f = {n.frequencies[i]:8.1e} Hz  S_IB = {n.s_ib[i]:.3e}  S_IF = {n.s_if[i]:.3e}  A^2/Hz")
print(f"binding variance {n.var_binding:.6e} A^2 (arctan form {n.var_binding_closed:.6e})")
print(f"flicker variance {n.var_flicker:.6e} A^2 (log form {n.var_flicker_closed:.6e})")

# binding noise corner sits at 1/(2 pi tau_B), far above the band at
# the default (saturating) concentration; thin the channel to bring it down
for n_m in (1e6, 1e9, 1e12):
    r = evaluate(cfg.with_overrides(ligand_count=n_m))
    print(f"N_m = {n_m:.0e}: tau_B = {r.binding.relaxation_time:.3e} s, "
          f"sigma_B^2/sigma_F^2 = {r.noise.var_binding / r.noise.var_flicker:.3e}")

if "--plot" in sys.argv:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    ax.loglog(n.frequencies, n.s_ib, label="binding")
    ax.loglog(n.frequencies, n.s_if, label="flicker")
    ax.loglog(n.frequencies, n.s_total, "k--", label="total")
    ax.set_xlabel("f [Hz]")
    ax.set_ylabel("PSD [A^2/Hz]")
    ax.legend()
    fig.savefig("noise_spectrum.png", dpi=120)
    print("wrote noise_spectrum.png")
