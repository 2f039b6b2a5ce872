"""Parameter sweeps, canned figure specs, and deterministic file output."""

from __future__ import annotations

import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import KEY_GROUP, ConfigError, SystemConfig
from .noise import binding_psd, flicker_coefficient
from .pipeline import evaluate

log = logging.getLogger(__name__)

OUTPUT_KINDS = ("sensitivity", "noise_psd", "snr", "capacity")
FREQUENCY = "frequency"
METRIC_COLUMNS = ("snr", "snr_db", "capacity_bits", "l_factor", "raw_capacity_bits")
MAX_OVERLAYS = 4


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    outputs: tuple
    overlays: tuple = ()
    name: Optional[str] = None

    @classmethod
    def from_dict(cls, doc) -> "SweepSpec":
        unknown = set(doc) - {"variable", "values", "outputs", "overlays", "name"}
        if unknown:
            raise ConfigError(f"unknown sweep-spec keys: {sorted(unknown)}")
        values = expand_values(doc.get("values", ()))
        spec = cls(
            variable=doc.get("variable"),
            values=tuple(values),
            outputs=tuple(doc.get("outputs", ())),
            overlays=tuple(dict(o) for o in doc.get("overlays", ())),
            name=doc.get("name"),
        )
        spec.validate()
        return spec

    def to_dict(self) -> dict:
        return {"name": self.name, "variable": self.variable, "values": list(self.values),
                "outputs": list(self.outputs), "overlays": [dict(o) for o in self.overlays]}

    def validate(self) -> None:
        if self.variable != FREQUENCY and self.variable not in KEY_GROUP:
            raise ConfigError(f"unknown sweep variable {self.variable!r}", self.variable)
        if not self.values:
            raise ConfigError("sweep values must be non-empty")
        v = np.asarray(self.values, dtype=float)
        d = np.diff(v)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ConfigError("sweep values must be strictly monotone")
        if not self.outputs or set(self.outputs) - set(OUTPUT_KINDS):
            raise ConfigError(f"outputs must be a non-empty subset of {OUTPUT_KINDS}")
        is_psd = self.variable == FREQUENCY
        if is_psd != (set(self.outputs) == {"noise_psd"}):
            raise ConfigError("noise_psd is produced by (and only by) a 'frequency' sweep")
        if is_psd and np.any(v <= 0):
            raise ConfigError("frequencies must be positive")
        if len(self.overlays) > MAX_OVERLAYS:
            raise ConfigError(f"at most {MAX_OVERLAYS} overlays")
        for ov in self.overlays:
            for key in ov:
                if key not in KEY_GROUP:
                    raise ConfigError(f"unknown overlay key {key!r}", key)


def expand_values(values):
    """Accept an explicit list or ``{"logspace": [a, b, n]}`` / ``{"linspace": [a, b, n]}``."""
    if isinstance(values, dict):
        if len(values) != 1:
            raise ConfigError("value range must have exactly one of logspace/linspace")
        (kind, args), = values.items()
        if kind == "logspace":
            return [float(x) for x in np.logspace(args[0], args[1], int(args[2]))]
        if kind == "linspace":
            return [float(x) for x in np.linspace(args[0], args[1], int(args[2]))]
        raise ConfigError(f"unknown value range {kind!r}")
    return [float(x) for x in values]


def overlay_label(overlay: dict) -> str:
    return ";".join(f"{k}={v:g}" for k, v in overlay.items())


def fmt(x) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# evaluation

def _point(args):
    base, overlay, variable, value = args
    cfg = base.with_overrides(overlay).with_overrides({variable: value})
    try:
        rep = evaluate(cfg)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        return None, f"{overlay_label(overlay) or 'base'} {variable}={value:g}: {exc}"
    m = rep.metrics
    return {
        "sensitivity": rep.transduction.sensitivity,
        "snr": m.snr,
        "snr_db": m.snr_db,
        "capacity_bits": m.capacity,
        "l_factor": m.l_factor,
        "raw_capacity_bits": m.raw_capacity,
    }, None


def _psd_columns(base, overlay, freqs):
    rep = evaluate(base.with_overrides(overlay))
    tr = rep.transduction
    s_ib = binding_psd(freqs, rep.binding, tr.single_ligand_potential, tr.transconductance)
    s_if = flicker_coefficient(rep.bias, rep.config, tr.transconductance) / freqs
    return s_ib, s_if, s_ib + s_if


@dataclass
class SweepResult:
    spec: SweepSpec
    tables: dict = field(default_factory=dict)  # filename -> (header, rows)
    failures: list = field(default_factory=list)


def run_sweep(spec: SweepSpec, base: SystemConfig, jobs: int = 1) -> SweepResult:
    """Evaluate every sweep point; results keep the order of the spec."""
    result = SweepResult(spec)
    overlays = list(spec.overlays) or [{}]
    labels = [overlay_label(o) for o in spec.overlays]

    if spec.variable == FREQUENCY:
        freqs = np.asarray(spec.values, dtype=float)
        header = ["f_hz"]
        cols = []
        for ov, lab in zip(overlays, labels or [None]):
            cols.extend(_psd_columns(base, ov, freqs))
            suffix = f"[{lab}]" if lab else ""
            header.extend(f"{c}{suffix}" for c in ("s_ib", "s_if", "s_total"))
        rows = [[f] + [c[i] for c in cols] for i, f in enumerate(freqs)]
        result.tables["noise_psd.csv"] = (header, rows)
        return result

    tasks = [(base, ov, spec.variable, v) for ov in overlays for v in spec.values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_point, tasks, chunksize=4))
    else:
        outcomes = [_point(t) for t in tasks]
    for _, err in outcomes:
        if err:
            log.warning("sweep point failed: %s", err)
            result.failures.append(err)

    n = len(spec.values)
    grid = [outcomes[i * n:(i + 1) * n] for i in range(len(overlays))]
    nan = math.nan

    def col(j, key):
        return [(r[key] if r else nan) for r, _ in grid[j]]

    for kind in ("sensitivity", "snr", "capacity"):
        if kind not in spec.outputs:
            continue
        key = "capacity_bits" if kind == "capacity" else kind
        header = [spec.variable] + (labels or [kind])
        columns = [col(j, key) for j in range(len(overlays))]
        rows = [[v] + [c[i] for c in columns] for i, v in enumerate(spec.values)]
        result.tables[f"{kind}.csv"] = (header, rows)

    if {"snr", "capacity"} & set(spec.outputs):
        header = [spec.variable, "overlay", *METRIC_COLUMNS]
        rows = []
        for j, lab in enumerate(labels or [""]):
            for v, (r, _) in zip(spec.values, grid[j]):
                rows.append([v, lab] + [(r[c] if r else nan) for c in METRIC_COLUMNS])
        result.tables["metrics.csv"] = (header, rows)
    return result


# --------------------------------------------------------------------------
# output

def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else fmt(c) for c in row))
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_result(result: SweepResult, out_dir: Path, svg: bool = False):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (header, rows) in result.tables.items():
        path = out_dir / name
        write_csv(path, header, rows)
        written.append(path)
        if svg and name != "metrics.csv":
            from .plotting import render_svg

            svg_path = path.with_suffix(".svg")
            render_svg(header, rows, svg_path, title=result.spec.name or name)
            written.append(svg_path)
    return written


def write_manifest(out_dir: Path, files, cfg: SystemConfig, specs, seed) -> Path:
    out_dir = Path(out_dir)
    manifest = {
        "tool": "flexfet_rx",
        "version": __version__,
        "config_sha256": cfg.sha256(),
        "config": cfg.to_dict(),
        "seed": seed,
        "specs": [s.to_dict() for s in specs],
        "files": [{"path": str(Path(f).relative_to(out_dir)), "sha256": sha256_file(f)}
                  for f in sorted(files)],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# --------------------------------------------------------------------------
# canned figure reproductions

def _log(a, b, n):
    return {"logspace": [a, b, n]}


def _lin(a, b, n):
    return {"linspace": [a, b, n]}


_ARRAYS_5_15 = [{"array_count": 5}, {"array_count": 15}]

FIGURES = {
    "fig6": {
        "sensitivity_vs_ligands": dict(
            variable="ligand_count", values=_log(6, 12, 25), outputs=["sensitivity"],
            overlays=[{"array_count": 5, "tx_rx_distance": 1e-3},
                      {"array_count": 5, "tx_rx_distance": 1e-2},
                      {"array_count": 10, "tx_rx_distance": 1e-3},
                      {"array_count": 10, "tx_rx_distance": 1e-2}]),
    },
    "fig7": {
        "noise_components": dict(variable=FREQUENCY, values=_log(-4, 4, 1601), outputs=["noise_psd"]),
    },
    "fig8": {
        "noise_vs_ligands": dict(
            variable=FREQUENCY, values=_log(-4, 4, 401), outputs=["noise_psd"],
            overlays=[{"ligand_count": n} for n in (1e6, 1e8, 1e10, 1e12)]),
    },
    "fig9": {
        "a_ligand_count": dict(variable="ligand_count", values=_log(6, 12, 25), outputs=["snr"]),
        "b_tx_rx_distance": dict(variable="tx_rx_distance", values=_log(-3, -1, 21), outputs=["snr"]),
        "c_flow_velocity": dict(variable="flow_velocity", values=_log(-6, -4, 21), outputs=["snr"]),
        "d_binding_rate": dict(variable="binding_rate", values=_log(-18, -14, 21), outputs=["snr"]),
        "e_receptor_density": dict(variable="receptor_density", values=_log(16, 20, 21), outputs=["snr"]),
        "f_oxide_trap_density": dict(variable="oxide_trap_density", values=_log(28, 32, 21), outputs=["snr"]),
        "g_nanowire_radius": dict(variable="nanowire_radius", values=_lin(5e-9, 40e-9, 15), outputs=["snr"]),
    },
    "fig10": {
        "a_n_tx_max": dict(variable="n_tx_max", values=_log(4, 12, 25), outputs=["capacity"],
                           overlays=_ARRAYS_5_15),
        "b_tx_rx_distance": dict(variable="tx_rx_distance", values=_log(-3, -1, 21), outputs=["capacity"],
                                 overlays=_ARRAYS_5_15),
        "c_binding_rate": dict(variable="binding_rate", values=_log(-18, -14, 21), outputs=["capacity"],
                               overlays=_ARRAYS_5_15),
        "d_receptor_density": dict(variable="receptor_density", values=_lin(1e18, 2e19, 20),
                                   outputs=["capacity"], overlays=_ARRAYS_5_15),
    },
}


def figure_specs(only=None):
    """Yield ``(figure, panel, SweepSpec)`` for the canned reproductions."""
    for fig, panels in FIGURES.items():
        if only and fig not in only:
            continue
        for panel, doc in panels.items():
            yield fig, panel, SweepSpec.from_dict(dict(doc, name=f"{fig}/{panel}"))


def run_figures(out_dir, base: SystemConfig, seed=0, svg=False, only=None, jobs=1):
    out_dir = Path(out_dir)
    files, specs, failures = [], [], []
    for fig, panel, spec in figure_specs(only):
        res = run_sweep(spec, base, jobs=jobs)
        files += write_result(res, out_dir / fig / panel, svg=svg)
        specs.append(spec)
        failures += res.failures
    write_manifest(out_dir, files, base, specs, seed)
    return files, failures
