"""Command-line front end: ``flexfet-rx {validate,equilibrium,pullin,sweep,figures}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, check_invariants, load_config, parse_assignment
from .electromech import (
    PullInExceeded,
    capacitance_array,
    equilibrium_residuals,
    find_pullin,
    force_electrostatic,
    select_bias,
    solve_equilibrium,
)

EXIT_OK, EXIT_FAIL, EXIT_PULLIN, EXIT_IO = 0, 1, 2, 3
NEAR_DEGENERATE = 1.1  # warn when g < 1.1 * 2R


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _config(args, check=True):
    cfg = load_config(_read(args.config), check=False) if args.config else load_config(check=False)
    overrides = dict(parse_assignment(s) for s in args.set or ())
    return cfg.with_overrides(overrides, check=check)


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2, sort_keys=True, allow_nan=True)
    sys.stdout.write("\n")


def _writable_dir(path: Path) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    probe = path / ".write-probe"
    probe.write_text("")
    probe.unlink()
    return path


# --------------------------------------------------------------------------
# validate

def _diagnostics(cfg, seed=None, mc=False):
    """Run the invariant suite; yields ``(name, status, detail)``."""
    out = []

    def add(name, status, detail=""):
        out.append({"name": name, "status": status, "detail": detail})

    inv = check_invariants(cfg)
    for name, ok, msg, _key in inv:
        add(name, "pass" if ok else "fail", msg)
    g = cfg.geometry
    if g.inter_wire_spacing > 2 * g.nanowire_radius:
        near = g.inter_wire_spacing < NEAR_DEGENERATE * 2 * g.nanowire_radius
        add("capacitance domain margin", "warn" if near else "pass",
            f"g / 2R = {g.inter_wire_spacing / (2 * g.nanowire_radius):.4g}")
    if not all(ok for _, ok, _, _ in inv):
        add("device solve", "fail", "skipped: parameter invariants violated")
        return out

    from .pipeline import evaluate
    from .transducer import sensitivity_exponent

    try:
        pullin = find_pullin(cfg)
        bias = select_bias(cfg, pullin=pullin)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        add("device solve", "fail", str(exc))
        return out
    add("bias point stable", "pass" if bias.stable else "fail",
        f"V_G = {bias.gate_voltage:.6g} V, y = {bias.gap:.6g} m")

    y, v = bias.gap, bias.gate_voltage
    h = 1e-6 * y
    dcdy = (capacitance_array(y + h, g) - capacitance_array(y - h, g)) / (2 * h)
    f = force_electrostatic(y, v, g)
    rel = abs(f - 0.5 * v**2 * abs(dcdy)) / f
    add("force = 1/2 V^2 |dC/dy| at bias", "pass" if rel < 1e-6 else "fail", f"rel. error {rel:.3g}")

    r_force, r_volt = equilibrium_residuals(bias, cfg)
    worst = max(r_force, r_volt)
    add("equilibrium residuals", "pass" if worst < 1e-10 else "fail", f"max rel. residual {worst:.3g}")

    margin = 3 * y - g.initial_gap
    add("3y - y0 > 0", "pass" if margin > 0 else "fail", f"3y - y0 = {margin:.4g} m")

    try:
        rep = evaluate(cfg)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        add("link evaluation", "fail", f"{type(exc).__name__}: {exc}")
        return out
    n = rep.noise
    add("noise quadrature vs closed form", "pass",
        f"binding {n.var_binding:.6g} / {n.var_binding_closed:.6g}, "
        f"flicker {n.var_flicker:.6g} / {n.var_flicker_closed:.6g}")

    tr = rep.transduction
    s_alt = math.exp(sensitivity_exponent(tr.delta_stiffness, tr.delta_gap, bias, cfg))
    rel = abs(s_alt - tr.sensitivity) / tr.sensitivity
    add("sensitivity exponent identity", "pass" if rel < 1e-12 else "fail", f"rel. diff {rel:.3g}")

    lf = rep.metrics.l_factor
    add("asin domain (L in [0, 1])", "pass" if 0 <= lf <= 1 else "fail", f"L = {lf:.6g}")
    if rep.metrics.raw_capacity <= 0:
        add("capacity positive", "warn", f"raw capacity {rep.metrics.raw_capacity:.4g} bits clamped to 0")

    if mc:
        from .binding import binding_stats, mc_binding_oracle

        # at rho = K_D the occupancy variance is largest and cheapest to resolve
        n_rec = 100_000
        st = binding_stats(cfg.dissociation_constant, cfg)
        res = mc_binding_oracle(cfg.dissociation_constant, cfg, n_rec, seed,
                                n_segments=32, samples_per_segment=8192, steps_per_tau=5.0)
        mean = st.occupancy * n_rec
        var = st.occupancy * (1 - st.occupancy) * n_rec
        ok = abs(res.sample_mean - mean) <= 3 * res.std_error and abs(res.sample_var / var - 1) < 0.1
        add("binding Monte Carlo", "pass" if ok else "fail",
            f"mean {res.sample_mean:.6g} vs {mean:.6g}, var ratio {res.sample_var / var:.4f}")
    return out


def cmd_validate(args):
    try:
        cfg = _config(args, check=False)
    except ConfigError as exc:
        _emit({"ok": False, "checks": [{"name": "config parse", "status": "fail", "detail": str(exc)}]})
        return EXIT_FAIL
    checks = _diagnostics(cfg, seed=args.seed, mc=args.mc)
    ok = all(c["status"] != "fail" for c in checks)
    _emit({"ok": ok, "checks": checks})
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# single operating points

def _state_doc(state, cfg):
    doc = dataclasses.asdict(state)
    doc["deflection"] = state.deflection
    doc["residuals"] = dict(zip(("force", "voltage"), equilibrium_residuals(state, cfg)))
    return doc


def cmd_equilibrium(args):
    cfg = _config(args)
    pullin = find_pullin(cfg)
    if args.vg is not None:
        state = solve_equilibrium(args.vg, cfg)
    else:
        state = select_bias(cfg, args.bias_fraction, pullin=pullin)
    _emit({"equilibrium": _state_doc(state, cfg), "pullin": dataclasses.asdict(pullin)})
    return EXIT_OK


def cmd_pullin(args):
    cfg = _config(args)
    p = find_pullin(cfg)
    _emit({"pullin": dataclasses.asdict(p), "gap_ratio": p.gap / cfg.geometry.initial_gap})
    return EXIT_OK


# --------------------------------------------------------------------------
# sweeps

def _load_spec(args):
    from .sweep import SweepSpec

    text = sys.stdin.read() if args.spec == "-" else _read(args.spec)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"sweep spec is not valid JSON: {exc}") from exc
    return SweepSpec.from_dict(doc)


def cmd_sweep(args):
    from .sweep import run_sweep, write_manifest, write_result

    cfg = _config(args)
    spec = _load_spec(args)
    out = _writable_dir(Path(args.out))
    res = run_sweep(spec, cfg, jobs=args.jobs)
    files = write_result(res, out, svg=args.svg)
    write_manifest(out, files, cfg, [spec], args.seed)
    for err in res.failures:
        print(f"warning: {err}", file=sys.stderr)
    print(f"wrote {len(files)} file(s) to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_figures(args):
    from .sweep import FIGURES, run_figures

    cfg = _config(args)
    only = args.only.split(",") if args.only else None
    if only and set(only) - set(FIGURES):
        raise ConfigError(f"unknown figure(s): {sorted(set(only) - set(FIGURES))}")
    out = _writable_dir(Path(args.out))
    files, failures = run_figures(out, cfg, seed=args.seed, svg=args.svg, only=only, jobs=args.jobs)
    for err in failures:
        print(f"warning: {err}", file=sys.stderr)
    print(f"wrote {len(files)} file(s) to {out}", file=sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config document (flat keys)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key; value parsed as JSON (repeatable)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed recorded in outputs")

    p = argparse.ArgumentParser(prog="flexfet-rx", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="run the invariant suite")
    s.add_argument("--mc", action="store_true", help="include a seeded binding Monte Carlo check")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("equilibrium", parents=[common], help="solve one operating point")
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--vg", type=float, help="gate voltage [V]")
    grp.add_argument("--bias-fraction", type=float, help="fraction of the pull-in voltage")
    s.set_defaults(func=cmd_equilibrium)

    s = sub.add_parser("pullin", parents=[common], help="locate the pull-in point")
    s.set_defaults(func=cmd_pullin)

    for name, func, helptext in (("sweep", cmd_sweep, "run one sweep spec"),
                                 ("figures", cmd_figures, "run the canned figure sweeps")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--out", required=True, help="output directory")
        s.add_argument("--svg", action="store_true", help="also render SVG line plots")
        s.add_argument("--jobs", type=int, default=1, help="worker processes")
        s.set_defaults(func=func)
        if name == "sweep":
            s.add_argument("--spec", required=True, help="sweep-spec JSON file, or - for stdin")
        else:
            s.add_argument("--only", help="comma-separated subset, e.g. fig6,fig9")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PullInExceeded as exc:
        print(f"error: pull-in exceeded: {exc}", file=sys.stderr)
        return EXIT_PULLIN
    except ConfigError as exc:
        key = f" [key: {exc.key}]" if exc.key else ""
        print(f"error: {exc}{key}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
