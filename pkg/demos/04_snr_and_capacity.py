"""Link budget: SNR and capacity across the main design knobs.

Uses the same pipeline that the `figures` command sweeps, but prints a few
points per knob so the trends can be read off directly.
"""
from flexfet_rx import SystemConfig, evaluate

cfg = SystemConfig()
rep = evaluate(cfg)
t, m = rep.transduction, rep.metrics
print(f"S = {t.sensitivity:.4f}, I_DS1 = {t.drain_current:.4e} A, mean current {t.mean_current:.4e} A")
print(f"g_FET = {t.transconductance:.4e} A/V, single-ligand shift psi_L = {t.single_ligand_potential:.4e} V")
print(f"SNR = {m.snr:.4e} ({m.snr_db:.2f} dB), L = {m.l_factor:.4f}, capacity = {m.capacity:.4f} bits")


def show(key, values, fmt="{:.3g}"):
    print(f"\n{key}:")
    for v in values:
        r = evaluate(cfg.with_overrides({key: v}))
        print(f"  {fmt.format(v):>10}  S = {r.transduction.sensitivity:9.5f}  "
              f"SNR = {r.metrics.snr:.5e}  C = {r.metrics.capacity:.4f} bits")


show("nanowire_radius", [5e-9, 10e-9, 25e-9, 40e-9])
show("oxide_trap_density", [2.3e28, 2.3e30, 2.3e32])
show("binding_rate", [1e-18, 1e-16, 1e-14])
show("receptor_density", [1e18, 5e18, 2e19])
show("n_tx_max", [1e4, 1e6, 1e12])
show("array_count", [5, 10, 15], fmt="{}")
