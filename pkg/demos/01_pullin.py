"""Where does the nanowire array snap down, and where do we bias it?

Walks the static force balance from zero volts up to pull-in, then compares
the array result with the textbook parallel-plate formula.
"""
import numpy as np

from flexfet_rx import SystemConfig, find_pullin, select_bias, solve_equilibrium
from flexfet_rx.constants import EPS0
from flexfet_rx.electromech import array_stiffness

cfg = SystemConfig()
y0 = cfg.geometry.initial_gap
k = array_stiffness(cfg)
print(f"array stiffness k = {k:.4e} N/m ({cfg.geometry.array_count} wires)")

p = find_pullin(cfg)
print(f"pull-in: V_PI = {p.voltage:.4f} V, gap = {p.gap * 1e9:.2f} nm (y/y0 = {p.gap / y0:.4f})")

# ramp the gate and watch the gap close
for v in np.linspace(0, 0.999 * p.voltage, 8):
    s = solve_equilibrium(v, cfg)
    print(f"  V_G = {v:6.3f} V  y = {s.gap * 1e9:7.3f} nm  psi_s = {s.surface_potential:.4f} V")

# the array pulls in later than 2/3: the fringing-dominated force
# grows more slowly as the gap closes than 1/y^2 does
planar = find_pullin(cfg, electrode="planar")
v_pp = np.sqrt(8 * k * y0**3 / (27 * EPS0 * cfg.electrode_area))
print(f"planar electrode: V_PI = {planar.voltage:.4f} V (closed form {v_pp:.4f} V), "
      f"y/y0 = {planar.gap / y0:.4f}")

bias = select_bias(cfg)
print(f"operating point at {cfg.operating.bias_fraction:.0%} of V_PI: V_G = {bias.gate_voltage:.4f} V, "
      f"y = {bias.gap * 1e9:.2f} nm, stable = {bias.stable}")

# more wires only add stiffness here, so V_PI grows as sqrt(N)
for n in (5, 10, 20):
    print(f"  N_array = {n:2d}: V_PI = {find_pullin(cfg.with_overrides(array_count=n)).voltage:.4f} V")
