"""Acceptance criteria 1-9.

Each test carries a ``criterion`` marker; the terminal summary (see
conftest.py) prints one PASS/FAIL line per criterion and per sub-check.
"""

import math
import time

import numpy as np
import pytest

from flexfet_rx.binding import binding_stats, mc_binding_oracle
from flexfet_rx.cli import main
from flexfet_rx.config import SystemConfig
from flexfet_rx.constants import EPS0
from flexfet_rx.electromech import (
    array_stiffness,
    capacitance_array,
    capacitance_cylinder,
    equilibrium_residuals,
    find_pullin,
    force_electrostatic,
    select_bias,
)
from flexfet_rx.noise import (
    band_variance,
    binding_psd,
    binding_variance_closed,
    flicker_coefficient,
    flicker_variance_closed,
    occupancy_psd,
)
from flexfet_rx.pipeline import evaluate
from flexfet_rx.sweep import FIGURES, expand_values
from flexfet_rx.transducer import sensitivity_exponent

DEF = SystemConfig()
ROUNDOFF = 1e-12


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


# --------------------------------------------------------------------------
# 1. electrostatic energy consistency

@pytest.mark.criterion("1", "force = 1/2 V^2 dC/dy on a 10x10x10 (y, g, R) log-grid, rel < 1e-6, < 5 s")
def test_energy_consistency():
    with Timer() as t:
        worst = 0.0
        for r in np.geomspace(2e-9, 200e-9, 10):
            for ratio in np.geomspace(1.05, 1e3, 10):
                geom = DEF.with_overrides(nanowire_radius=r, inter_wire_spacing=2 * r * ratio).geometry
                y = np.geomspace(1e-9, 1e-5, 10)
                h = 1e-5 * y
                dcdy = (capacitance_array(y + h, geom) - capacitance_array(y - h, geom)) / (2 * h)
                f = force_electrostatic(y, 1.0, geom)
                worst = max(worst, float(np.max(np.abs(f - 0.5 * np.abs(dcdy)) / f)))
    assert worst < 1e-6, f"worst relative error {worst:.3g}"
    assert t.elapsed < 5.0


# --------------------------------------------------------------------------
# 2. capacitance limits

@pytest.mark.criterion("2", "C_array -> C_cyl within 0.5% for g >= 1e3 (y+R); C_array strictly decreasing in g, < 1 s")
def test_capacitance_cylinder_limit():
    with Timer() as t:
        for r in np.geomspace(2e-9, 200e-9, 8):
            for y in np.geomspace(1e-9, 1e-5, 8):
                for mult in (1e3, 1e4, 1e6):
                    geom = DEF.with_overrides(nanowire_radius=r, inter_wire_spacing=mult * (y + r)).geometry
                    c_arr, c_cyl = capacitance_array(y, geom), capacitance_cylinder(y, geom)
                    assert abs(c_arr / c_cyl - 1) < 5e-3, (r, y, mult)
    assert t.elapsed < 1.0


@pytest.mark.criterion("2", "C_array -> C_cyl within 0.5% for g >= 1e3 (y+R); C_array strictly decreasing in g, < 1 s")
def test_capacitance_decreasing_in_spacing():
    with Timer() as t:
        bad = []
        for r in np.geomspace(2e-9, 200e-9, 8):
            for y in np.geomspace(1e-9, 1e-5, 8):
                gs = 2 * r * np.geomspace(1.001, 1e4, 60)
                c = [capacitance_array(y, DEF.with_overrides(nanowire_radius=r, inter_wire_spacing=g,
                                                             check=False).geometry) for g in gs]
                if not np.all(np.diff(c) < 0):
                    bad.append((r, y))
    assert t.elapsed < 1.0
    assert not bad, f"C_array not decreasing in g at {len(bad)} of 64 (R, y) points, e.g. {bad[0]}"


# --------------------------------------------------------------------------
# 3. planar pull-in

@pytest.mark.criterion("3", "planar-limit pull-in: V_PI within 2%, gap within 1% of 2y0/3, < 5 s")
def test_planar_pullin():
    with Timer() as t:
        for over in ({}, {"initial_gap": 300e-9}, {"array_count": 3, "youngs_modulus": 20e9}):
            c = DEF.with_overrides(over)
            p = find_pullin(c, electrode="planar")
            y0 = c.geometry.initial_gap
            v_exact = math.sqrt(8 * array_stiffness(c) * y0**3 / (27 * EPS0 * c.electrode_area))
            assert p.voltage == pytest.approx(v_exact, rel=0.02)
            assert p.gap == pytest.approx(2 * y0 / 3, rel=0.01)
    assert t.elapsed < 5.0


# --------------------------------------------------------------------------
# 4. equilibrium residuals

def _random_configs(n, seed=1234):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        r = 10 ** rng.uniform(np.log10(5e-9), np.log10(45e-9))
        yield DEF.with_overrides(
            nanowire_radius=r,
            inter_wire_spacing=2 * r * 10 ** rng.uniform(0.05, 1.5),
            nanowire_length=10 ** rng.uniform(-6.3, -5),
            array_count=int(rng.integers(1, 41)),
            initial_gap=10 ** rng.uniform(np.log10(40e-9), np.log10(400e-9)),
            youngs_modulus=10 ** rng.uniform(9, 11.3),
            substrate_doping=10 ** rng.uniform(21, 24),
        ), float(rng.uniform(0.02, 0.995))


@pytest.mark.criterion("4", "equilibrium residuals < 1e-10 for 100 random configs below pull-in, < 30 s")
def test_equilibrium_residuals():
    with Timer() as t:
        worst = 0.0
        for c, frac in _random_configs(100):
            s = select_bias(c, frac)
            assert s.stable
            worst = max(worst, *equilibrium_residuals(s, c))
    assert worst < 1e-10, f"worst residual {worst:.3g}"
    assert t.elapsed < 30.0


# --------------------------------------------------------------------------
# 5. binding Monte Carlo

@pytest.mark.criterion("5", "telegraph Monte Carlo (1e5 receptors): mean 3 SE, var 10%, PSD 15% near corner, < 60 s")
def test_binding_oracle():
    n = 100_000
    with Timer() as t:
        kd = DEF.dissociation_constant
        res = mc_binding_oracle(kd, DEF, n, seed=20240601)
        st = binding_stats(kd, DEF)
        mean = st.occupancy * n
        var = st.occupancy * (1 - st.occupancy) * n
        assert abs(res.sample_mean - mean) <= 3 * res.std_error
        assert abs(res.sample_var / var - 1) < 0.10
        scaled = binding_stats(kd, DEF.with_overrides(receptor_density=n / DEF.receptor_area))
        f_c = 1 / (2 * math.pi * res.relaxation_time)
        band = (res.frequencies >= f_c / math.sqrt(10)) & (res.frequencies <= f_c * math.sqrt(10))
        assert band.sum() >= 5
        theory = occupancy_psd(res.frequencies[band], scaled)
        dev = np.abs(res.psd[band] / theory - 1)
        assert dev.max() < 0.15, f"max PSD deviation {dev.max():.3f}"
    assert t.elapsed < 60.0


# --------------------------------------------------------------------------
# 6. noise quadrature

@pytest.mark.criterion("6", "banded binding variance vs arctan form 1e-8; flicker vs 2K ln(fmax/fmin) 1e-10, < 5 s")
def test_noise_quadrature():
    with Timer() as t:
        for over in ({}, {"ligand_count": 1e6}, {"tx_rx_distance": 0.05}, {"f_min": 1e-2, "f_max": 1e7}):
            c = DEF.with_overrides(dict(over, oxide_trap_density=0.0))
            r = evaluate(c)
            tr = r.transduction
            closed = binding_variance_closed(r.binding, tr.single_ligand_potential, tr.transconductance,
                                             c.fet.f_min, c.fet.f_max)
            assert r.noise.var_total == pytest.approx(closed, rel=1e-8)
        for tau in (1e-9, 1e-3, 1.0, 1e4):
            st = binding_stats(DEF.dissociation_constant, DEF)
            st = type(st)(**{**st.__dict__, "relaxation_time": tau})
            q = band_variance(lambda f: binding_psd(f, st, 1e-4, 1e-6), 1e-4, 1e4, knee=1 / (2 * math.pi * tau))
            assert q == pytest.approx(binding_variance_closed(st, 1e-4, 1e-6, 1e-4, 1e4), rel=1e-8)
        r = evaluate(DEF)
        for fmin, fmax in ((1e-4, 1e4), (1e-6, 1e6), (0.3, 3.0)):
            k = flicker_coefficient(r.bias, DEF, r.transduction.transconductance)
            q = band_variance(lambda f: k / f, fmin, fmax)
            assert q == pytest.approx(flicker_variance_closed(k, fmin, fmax), rel=1e-10)
            assert flicker_variance_closed(k, fmin, fmax) == 2 * k * math.log(fmax / fmin)
    assert t.elapsed < 5.0


# --------------------------------------------------------------------------
# 7. sensitivity identity

@pytest.mark.criterion("7", "S from the mechanical exponent equals exp(-q dpsi / kT) to 1e-12 over the N_m sweep, < 5 s")
def test_sensitivity_identity():
    with Timer() as t:
        values = expand_values(FIGURES["fig6"]["sensitivity_vs_ligands"]["values"])
        for n_arr in (5, 10):
            for n_m in values:
                c = DEF.with_overrides(ligand_count=n_m, array_count=n_arr)
                r = evaluate(c)
                tr = r.transduction
                s_mech = math.exp(sensitivity_exponent(tr.delta_stiffness, tr.delta_gap, r.bias, c))
                assert s_mech == pytest.approx(tr.sensitivity, rel=1e-12)
    assert t.elapsed < 5.0


# --------------------------------------------------------------------------
# 8. figure trends from the `figures` CSVs

def _nondecreasing(y):
    y = np.asarray(y, dtype=float)
    d = np.diff(y)
    return bool(np.all(d >= -ROUNDOFF * np.abs(y[1:])) and y[-1] > y[0])


def _nonincreasing(y):
    return _nondecreasing(-np.asarray(y, dtype=float))


def _saturating(y):
    d = np.diff(np.asarray(y, dtype=float))
    return bool(d[-1] <= 0.5 * d.max())


def _read(root, rel):
    path = root / rel
    header = path.read_text().splitlines()[0].split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


@pytest.fixture(scope="module")
def figures_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("figures")
    with Timer() as t:
        assert main(["figures", "--out", str(out), "--seed", "0"]) == 0
    return out, t.elapsed


def _col(header, data, label):
    return data[:, header.index(label)]


def trend_sensitivity_increasing_in_ligands(root):
    h, d = _read(root, "fig6/sensitivity_vs_ligands/sensitivity.csv")
    return all(_nondecreasing(d[:, j]) for j in range(1, d.shape[1]))


def trend_sensitivity_decreasing_in_distance(root):
    h, d = _read(root, "fig6/sensitivity_vs_ligands/sensitivity.csv")
    ok = True
    for n in (5, 10):
        near = _col(h, d, f"array_count={n};tx_rx_distance=0.001")
        far = _col(h, d, f"array_count={n};tx_rx_distance=0.01")
        ok &= bool(np.all(near > far))
    return ok


def trend_sensitivity_larger_for_more_wires(root):
    h, d = _read(root, "fig6/sensitivity_vs_ligands/sensitivity.csv")
    ok = True
    for dist in ("0.001", "0.01"):
        ok &= bool(np.all(_col(h, d, f"array_count=10;tx_rx_distance={dist}")
                          > _col(h, d, f"array_count=5;tx_rx_distance={dist}")))
    return ok


def trend_snr_increasing_saturating_in_ligands(root):
    _, d = _read(root, "fig9/a_ligand_count/snr.csv")
    return _nondecreasing(d[:, 1]) and _saturating(d[:, 1])


def trend_snr_decreasing_in_distance(root):
    _, d = _read(root, "fig9/b_tx_rx_distance/snr.csv")
    return _nonincreasing(d[:, 1])


def trend_snr_increasing_in_flow(root):
    _, d = _read(root, "fig9/c_flow_velocity/snr.csv")
    return _nondecreasing(d[:, 1])


def trend_snr_decreasing_in_trap_density(root):
    _, d = _read(root, "fig9/f_oxide_trap_density/snr.csv")
    return _nonincreasing(d[:, 1])


def trend_snr_decreasing_in_radius(root):
    _, d = _read(root, "fig9/g_nanowire_radius/snr.csv")
    return _nonincreasing(d[:, 1]) and d[0, 0] == pytest.approx(5e-9) and d[-1, 0] == pytest.approx(40e-9)


def trend_capacity_increasing_saturating_in_nmax(root):
    _, d = _read(root, "fig10/a_n_tx_max/capacity.csv")
    return all(_nondecreasing(d[:, j]) and _saturating(d[:, j]) for j in (1, 2))


def trend_capacity_increasing_saturating_in_receptor_density(root):
    _, d = _read(root, "fig10/d_receptor_density/capacity.csv")
    return all(_nondecreasing(d[:, j]) and _saturating(d[:, j]) for j in (1, 2))


def trend_capacity_decreasing_in_binding_rate(root):
    _, d = _read(root, "fig10/c_binding_rate/capacity.csv")
    return all(_nonincreasing(d[:, j]) for j in (1, 2))


def trend_capacity_larger_for_more_wires(root):
    ok = True
    for panel in FIGURES["fig10"]:
        h, d = _read(root, f"fig10/{panel}/capacity.csv")
        ok &= bool(np.all(_col(h, d, "array_count=15") > _col(h, d, "array_count=5")))
    return ok


TRENDS = [
    ("8a", trend_sensitivity_increasing_in_ligands),
    ("8b", trend_sensitivity_decreasing_in_distance),
    ("8c", trend_sensitivity_larger_for_more_wires),
    ("8d", trend_snr_increasing_saturating_in_ligands),
    ("8e", trend_snr_decreasing_in_distance),
    ("8f", trend_snr_increasing_in_flow),
    ("8g", trend_snr_decreasing_in_trap_density),
    ("8h", trend_snr_decreasing_in_radius),
    ("8i", trend_capacity_increasing_saturating_in_nmax),
    ("8j", trend_capacity_increasing_saturating_in_receptor_density),
    ("8k", trend_capacity_decreasing_in_binding_rate),
    ("8l", trend_capacity_larger_for_more_wires),
]


@pytest.mark.parametrize("tag, check", TRENDS, ids=[f"{t}-{c.__name__[6:]}" for t, c in TRENDS])
@pytest.mark.criterion("8", "figure-trend suite from `figures` CSVs, < 120 s total")
def test_figure_trend(figures_dir, tag, check):
    root, elapsed = figures_dir
    with Timer() as t:
        ok = check(root)
    assert elapsed + t.elapsed * len(TRENDS) < 120.0
    assert ok, f"{tag}: {check.__name__[6:].replace('_', ' ')} does not hold"


# --------------------------------------------------------------------------
# 9. determinism

@pytest.mark.criterion("9", "`figures` twice with the same seed gives byte-identical CSVs")
def test_figures_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["figures", "--out", str(a), "--seed", "7"]) == 0
    assert main(["figures", "--out", str(b), "--seed", "7", "--jobs", "2"]) == 0
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    assert any(p.suffix == ".csv" for p in files_a)
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel
