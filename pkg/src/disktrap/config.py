"""Scenario assembly from a JSON document.

A document may be partial; it is merged onto the shipped default so presets
only need to state what differs. ``--set`` overrides address keys by dotted
path (``trap.blue.photons=6e5``).
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from . import units as U
from .core import (
    AtomSpecies,
    ConfigError,
    DiskGeometry,
    ModeCatalog,
    _require,
    default_config_path,
    load_geometry,
    load_species,
    mode_catalog,
    read_json,
)
from .fields import FieldProfile
from .potentials import LightField, MagneticTrap, TrapConfiguration, magnetic_trap

PRESET_DIR = Path(__file__).parent / "presets"


def deep_merge(base: Mapping, override: Mapping) -> dict:
    out = copy.deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), Mapping):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_override(text: str) -> tuple[list[str], Any]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_overrides(doc: dict, overrides) -> dict:
    doc = copy.deepcopy(doc)
    for text in overrides or ():
        path, value = parse_override(text)
        node = doc
        for part in path[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"unknown config key {'.'.join(path)!r}")
            node = node[part]
        if not isinstance(node, dict) or path[-1] not in node:
            raise ConfigError(f"unknown config key {'.'.join(path)!r}")
        node[path[-1]] = value
    return doc


def canonical_hash(doc: Mapping) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def resolve_path(path) -> Path:
    """A config path, or the name of a shipped preset (``fig3``)."""
    p = Path(path)
    if p.exists():
        return p
    candidate = PRESET_DIR / f"{path}.json"
    if candidate.exists():
        return candidate
    raise ConfigError(f"config {path!r} not found")


def load_document(path=None, overrides=()) -> dict:
    doc = read_json(default_config_path())
    if path is not None:
        try:
            user = read_json(resolve_path(path))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
        doc = deep_merge(doc, user)
    return apply_overrides(doc, overrides)


@dataclass(frozen=True)
class FeasibilitySpec:
    s_min: float = 5.0
    heating_max: float = 0.07
    tunnel_max: float = 0.02
    tolerance: float = 0.02

    def __post_init__(self):
        if self.s_min < 0:
            raise ConfigError("s_min must be >= 0")
        for name in ("heating_max", "tunnel_max"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if not 0 <= self.tolerance < 1:
            raise ConfigError("tolerance must lie in [0, 1)")


@dataclass(frozen=True)
class Scenario:
    document: dict
    species: AtomSpecies
    catalog: ModeCatalog
    geometry: DiskGeometry
    trap: TrapConfiguration
    tau: float
    feasibility: FeasibilitySpec

    @property
    def hash(self) -> str:
        return canonical_hash(self.document)

    def section(self, name: str) -> dict:
        return self.document.get(name) or {}


def _light(doc: Mapping, name: str, species, catalog, geometry, trap_doc, standing: bool) -> LightField | None:
    spec = trap_doc.get(name)
    if spec is None:
        return None
    mode = catalog.lookup(geometry.diameter, int(_require(spec, "l", f"trap.{name}")), int(spec.get("q", 1)))
    if "coupling_fraction" in spec:
        mode = replace(mode, coupling_fraction=spec["coupling_fraction"])
    profile = FieldProfile(
        mode=mode,
        photons=float(_require(spec, "photons", f"trap.{name}")),
        height=geometry.height,
        profile_kind=trap_doc.get("profile_kind", "exponential"),
        standing_wave=standing,
        alpha_convention=trap_doc.get("alpha_convention", "amplitude"),
    )
    return LightField(profile, species.transition(spec.get("transition", mode.target_transition)))


def _magnetic(doc: Mapping | None, species) -> tuple[MagneticTrap | None, float]:
    if not doc:
        return None, 150e-9
    offset = doc.get("offset_gauss")
    trap = magnetic_trap(
        species,
        current=float(_require(doc, "current_a", "trap.magnetic")),
        height=float(_require(doc, "height_um", "trap.magnetic")) * 1e-6,
        offset=None if offset is None else U.gauss(float(offset)),
    )
    return trap, float(doc.get("center_nm", 150.0)) * 1e-9


def build_scenario(doc: Mapping) -> Scenario:
    species = load_species(_require(doc, "species", "config"))
    catalog = mode_catalog(_require(doc, "modes", "config"))
    geometry = load_geometry(_require(doc, "geometry", "config"))
    trap_doc = doc.get("trap", {})
    standing = bool(trap_doc.get("standing_wave", True))
    try:
        blue = _light(doc, "blue", species, catalog, geometry, trap_doc, standing=False)
        red = _light(doc, "red", species, catalog, geometry, trap_doc, standing=standing)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    magnetic, center = _magnetic(trap_doc.get("magnetic"), species)
    trap = TrapConfiguration(
        species=species,
        geometry=geometry,
        blue=blue,
        red=red,
        surface=bool(trap_doc.get("surface", True)),
        magnetic=magnetic,
        magnetic_center=center,
        form=trap_doc.get("potential_form", "exact"),
    )
    if trap.form not in ("exact", "fardetuned"):
        raise ConfigError(f"unknown potential_form {trap.form!r}")
    tau = float(doc.get("detection", {}).get("tau_us", 75.0)) * 1e-6
    if not tau > 0:
        raise ConfigError("detection.tau_us must be positive")
    feas = FeasibilitySpec(**doc.get("feasibility", {}))
    return Scenario(dict(doc), species, catalog, geometry, trap, tau, feas)


def load_scenario(path=None, overrides=()) -> Scenario:
    return build_scenario(load_document(path, overrides))
