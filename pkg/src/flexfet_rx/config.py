"""Model parameters.

Every quantity is stored in SI base units.  A configuration document is a
flat JSON object whose keys are the field names of the dataclasses below;
anything left out keeps its default.  Fields declared ``Optional`` default
to ``None`` and are then derived from other fields (see the ``*_area`` and
``oxide_capacitance`` properties of :class:`SystemConfig`).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .constants import EPS0


class ConfigError(ValueError):
    """Raised for unknown keys or violated parameter invariants."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class DeviceGeometry:
    nanowire_radius: float = 25e-9
    nanowire_length: float = 4e-6
    inter_wire_spacing: float = 100e-9
    array_count: int = 10
    initial_gap: float = 100e-9
    dielectric_thickness: float = 5e-9
    beam_thickness: float = 260e-9
    geometric_factor: float = 192.0
    effective_electrode_area: Optional[float] = None


@dataclass(frozen=True)
class MaterialElectrical:
    youngs_modulus: float = 4e9
    substrate_doping: float = 1e22  # 1e16 cm^-3
    substrate_rel_permittivity: float = 11.7
    dielectric_rel_permittivity: float = 3.9
    intrinsic_carrier_density: float = 1.45e16
    temperature: float = 300.0


@dataclass(frozen=True)
class ChannelConfig:
    microchannel_width: float = 4e-6
    microchannel_height: float = 3e-6
    tx_rx_distance: float = 10e-3
    flow_velocity: float = 10e-6
    base_diffusivity: float = 1e-10
    receiver_effective_width: Optional[float] = None


@dataclass(frozen=True)
class LigandReceptorConfig:
    ligand_count: float = 1e9
    binding_rate: float = 3e-16
    unbinding_rate: float = 20.0
    receptor_density: float = 5e18
    ligand_radius: float = 1e-9
    ligand_height: float = 2e-9
    effective_receptor_area: Optional[float] = None


@dataclass(frozen=True)
class FetNoiseConfig:
    tunneling_distance: float = 1e-10
    oxide_trap_density: float = 2.3e30  # 2.3e24 eV^-1 cm^-3, stored per eV per m^3
    channel_width: float = 1e-6
    channel_length: float = 1e-6
    oxide_capacitance_per_area: Optional[float] = None
    scattering_coeff: float = 1e4
    mobility: float = 0.045
    threshold_voltage: float = 0.4
    subthreshold_prefactor: float = 1e-9
    f_min: float = 1e-4
    f_max: float = 1e4


@dataclass(frozen=True)
class OperatingConfig:
    bias_fraction: float = 0.9
    n_tx_min: float = 1e3
    n_tx_max: float = 1e12


_GROUPS = {
    "geometry": DeviceGeometry,
    "material": MaterialElectrical,
    "channel": ChannelConfig,
    "ligand": LigandReceptorConfig,
    "fet": FetNoiseConfig,
    "operating": OperatingConfig,
}

# flat key -> group attribute name
KEY_GROUP = {f.name: group for group, cls in _GROUPS.items() for f in dataclasses.fields(cls)}
INTEGER_KEYS = {"array_count"}


@dataclass(frozen=True)
class SystemConfig:
    geometry: DeviceGeometry = field(default_factory=DeviceGeometry)
    material: MaterialElectrical = field(default_factory=MaterialElectrical)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    ligand: LigandReceptorConfig = field(default_factory=LigandReceptorConfig)
    fet: FetNoiseConfig = field(default_factory=FetNoiseConfig)
    operating: OperatingConfig = field(default_factory=OperatingConfig)

    # -- derived quantities -------------------------------------------------
    @property
    def electrode_area(self) -> float:
        """A_e; projected nanowire area N_array * 2R * L unless overridden."""
        g = self.geometry
        if g.effective_electrode_area is not None:
            return g.effective_electrode_area
        return g.array_count * 2.0 * g.nanowire_radius * g.nanowire_length

    @property
    def receptor_area(self) -> float:
        if self.ligand.effective_receptor_area is not None:
            return self.ligand.effective_receptor_area
        return self.electrode_area

    @property
    def receptor_count(self) -> float:
        return self.ligand.receptor_density * self.receptor_area

    @property
    def dissociation_constant(self) -> float:
        return self.ligand.unbinding_rate / self.ligand.binding_rate

    @property
    def cross_section_area(self) -> float:
        return self.channel.microchannel_width * self.channel.microchannel_height

    @property
    def receiver_width(self) -> float:
        if self.channel.receiver_effective_width is not None:
            return self.channel.receiver_effective_width
        return self.geometry.array_count * self.geometry.inter_wire_spacing

    @property
    def oxide_capacitance(self) -> float:
        if self.fet.oxide_capacitance_per_area is not None:
            return self.fet.oxide_capacitance_per_area
        return self.material.dielectric_rel_permittivity * EPS0 / self.geometry.dielectric_thickness

    def derived(self) -> dict:
        return {
            "dissociation_constant": self.dissociation_constant,
            "cross_section_area": self.cross_section_area,
            "electrode_area": self.electrode_area,
            "receptor_area": self.receptor_area,
            "receptor_count": self.receptor_count,
            "receiver_width": self.receiver_width,
            "oxide_capacitance": self.oxide_capacitance,
        }

    # -- (de)serialisation --------------------------------------------------
    def to_dict(self) -> dict:
        out = {}
        for group in _GROUPS:
            out.update(dataclasses.asdict(getattr(self, group)))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def sha256(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_overrides(self, overrides: Mapping[str, Any] = None, *, check=True, **kw) -> "SystemConfig":
        """Return a copy with flat-key overrides applied."""
        updates = dict(overrides or {}, **kw)
        per_group: dict = {}
        for key, value in updates.items():
            if key not in KEY_GROUP:
                raise ConfigError(f"unknown configuration key: {key!r}", key)
            per_group.setdefault(KEY_GROUP[key], {})[key] = _coerce(key, value)
        new = dataclasses.replace(
            self,
            **{g: dataclasses.replace(getattr(self, g), **vals) for g, vals in per_group.items()},
        )
        if check:
            new.validate()
        return new

    def validate(self) -> None:
        for name, ok, message, key in check_invariants(self):
            if not ok:
                raise ConfigError(f"invariant violated ({name}): {message}", key)


def _coerce(key, value):
    if value is None:
        if _is_optional(key):
            return None
        raise ConfigError(f"{key!r} may not be null", key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {value!r}", key)
    if key in INTEGER_KEYS:
        if float(value) != int(value):
            raise ConfigError(f"{key!r} must be an integer, got {value!r}", key)
        return int(value)
    return float(value)


def _is_optional(key):
    cls = _GROUPS[KEY_GROUP[key]]
    return next(f for f in dataclasses.fields(cls) if f.name == key).default is None


def check_invariants(cfg: SystemConfig):
    """Evaluate every parameter invariant.

    Returns a list of ``(name, ok, message, key)`` tuples; nothing is raised,
    so callers can report all failures at once.
    """
    g, m, c, lg, f, op = cfg.geometry, cfg.material, cfg.channel, cfg.ligand, cfg.fet, cfg.operating
    checks = []

    def add(name, ok, message, key=None):
        checks.append((name, bool(ok), message, key))

    def positive(key, value):
        ok = value is not None and math.isfinite(value) and value > 0
        add(f"{key} > 0", ok, f"{key} = {value!r}", key)

    for key in ("nanowire_radius", "nanowire_length", "inter_wire_spacing", "initial_gap",
                "dielectric_thickness", "beam_thickness", "geometric_factor"):
        positive(key, getattr(g, key))
    add("array_count >= 1", g.array_count >= 1, f"array_count = {g.array_count}", "array_count")
    if g.effective_electrode_area is not None:
        positive("effective_electrode_area", g.effective_electrode_area)
    add("inter_wire_spacing > 2*nanowire_radius", g.inter_wire_spacing > 2 * g.nanowire_radius,
        f"g = {g.inter_wire_spacing:g} m, 2R = {2 * g.nanowire_radius:g} m", "inter_wire_spacing")

    for key in ("youngs_modulus", "substrate_rel_permittivity", "dielectric_rel_permittivity",
                "intrinsic_carrier_density", "temperature"):
        positive(key, getattr(m, key))
    add("substrate_doping > intrinsic_carrier_density", m.substrate_doping > m.intrinsic_carrier_density,
        f"N_A = {m.substrate_doping:g}, n_i = {m.intrinsic_carrier_density:g}", "substrate_doping")

    for key in ("microchannel_width", "microchannel_height", "tx_rx_distance", "flow_velocity",
                "base_diffusivity"):
        positive(key, getattr(c, key))
    if c.receiver_effective_width is not None:
        positive("receiver_effective_width", c.receiver_effective_width)

    for key in ("ligand_count", "binding_rate", "unbinding_rate", "receptor_density",
                "ligand_radius", "ligand_height"):
        positive(key, getattr(lg, key))
    if lg.effective_receptor_area is not None:
        positive("effective_receptor_area", lg.effective_receptor_area)

    for key in ("tunneling_distance", "channel_width", "channel_length", "scattering_coeff",
                "mobility", "threshold_voltage", "subthreshold_prefactor"):
        positive(key, getattr(f, key))
    # zero trap density is admissible: it switches flicker noise off
    add("oxide_trap_density >= 0", f.oxide_trap_density >= 0,
        f"oxide_trap_density = {f.oxide_trap_density!r}", "oxide_trap_density")
    if f.oxide_capacitance_per_area is not None:
        positive("oxide_capacitance_per_area", f.oxide_capacitance_per_area)
    add("0 < f_min < f_max", 0 < f.f_min < f.f_max, f"band = [{f.f_min:g}, {f.f_max:g}] Hz", "f_min")

    add("0 < bias_fraction < 1", 0 < op.bias_fraction < 1, f"bias_fraction = {op.bias_fraction}",
        "bias_fraction")
    add("0 <= n_tx_min < n_tx_max", 0 <= op.n_tx_min < op.n_tx_max,
        f"n_tx range = [{op.n_tx_min:g}, {op.n_tx_max:g}]", "n_tx_min")
    return checks


def load_config(document: Any = None, *, check: bool = True) -> SystemConfig:
    """Build a :class:`SystemConfig` from a flat key/value document.

    ``document`` may be ``None`` (all defaults), a mapping, or JSON text.
    Unknown keys raise :class:`ConfigError` naming the key.  With
    ``check=False`` invariants are not enforced, which lets diagnostics
    report on a broken configuration instead of refusing it.
    """
    if document is None:
        document = {}
    elif isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config document is not valid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise ConfigError("config document must be a JSON object")
    return SystemConfig().with_overrides(document, check=check)


def load_config_file(path, *, check: bool = True) -> SystemConfig:
    return load_config(Path(path).read_text(), check=check)


def parse_assignment(text: str):
    """Parse a ``key=value`` override string; the value is read as JSON."""
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        raise ConfigError(f"cannot parse value for {key!r}: {raw!r}", key) from None
    return key, value
