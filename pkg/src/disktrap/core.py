"""Domain types shared across the package: atomic species, resonator modes and disk geometry.

All fields are SI. The JSON loaders accept the I/O units documented in
the README config schema (nm, um, MHz, atomic units) and convert on the way in.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from scipy import constants as C

from . import units as U


class ConfigError(ValueError):
    """Raised for missing fields or values that violate a physical invariant."""


def _require(doc: Mapping, key: str, where: str):
    try:
        return doc[key]
    except KeyError:
        raise ConfigError(f"missing field '{key}' in {where}") from None


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ConfigError(f"non-positive constant: {name}={value!r}")
    return value


@dataclass(frozen=True)
class Transition:
    label: str
    wavelength: float  # m
    gamma: float  # half linewidth, rad/s; 2*gamma is the excited-state decay rate

    @property
    def omega(self) -> float:
        return 2 * math.pi * C.c / self.wavelength

    @property
    def wavenumber(self) -> float:
        return 2 * math.pi / self.wavelength


@dataclass(frozen=True)
class Zeeman:
    F: int
    m_F: int
    g_F: float


@dataclass(frozen=True)
class AtomSpecies:
    name: str
    mass: float
    transitions: tuple[Transition, ...]
    static_polarizability: float  # C^2 m^2 / J
    mean_square_radius: float  # m^2
    zeeman: Zeeman
    references: tuple[str, ...] = ()

    def __post_init__(self):
        _positive(self.mass, "mass")
        _positive(self.static_polarizability, "static_polarizability")
        _positive(self.mean_square_radius, "mean_square_radius")
        for t in self.transitions:
            _positive(t.wavelength, f"{t.label}.wavelength")
            _positive(t.gamma, f"{t.label}.gamma")
        labels = {t.label: t for t in self.transitions}
        if "D1" in labels and "D2" in labels:
            if not labels["D2"].wavelength < labels["D1"].wavelength:
                raise ConfigError("D2 wavelength must be shorter than D1 for an alkali species")

    def transition(self, label: str) -> Transition:
        for t in self.transitions:
            if t.label == label:
                return t
        raise KeyError(f"species {self.name} has no transition {label!r}")


@dataclass(frozen=True)
class ModeSpec:
    """One whispering-gallery mode.

    ``q_narrow`` and ``q_wide`` are the tabulated total quality factors at the
    two reference gaps of the disk geometry (0.5 um and 0.9 um by default).
    ``alpha`` is the tabulated evanescent decay constant; how it maps onto the
    field is set by the profile's ``alpha_convention``.
    """

    disk_diameter: float
    l: int
    wavelength: float
    q_narrow: float
    q_wide: float
    g0: float  # rad/s
    alpha: float  # 1/m
    target_transition: str
    q: int = 1
    coupling_fraction: float | None = None

    def __post_init__(self):
        _positive(self.disk_diameter, "disk_diameter")
        _positive(self.wavelength, "wavelength")
        _positive(self.q_narrow, "Q1")
        _positive(self.q_wide, "Q2")
        _positive(self.g0, "g0")
        _positive(self.alpha, "alpha")
        if self.coupling_fraction is not None and not 0 < self.coupling_fraction <= 1:
            raise ConfigError(f"coupling fraction must lie in (0, 1], got {self.coupling_fraction}")

    @property
    def key(self) -> tuple[float, int, int]:
        return (round(self.disk_diameter * 1e6, 6), self.l, self.q)

    @property
    def radius(self) -> float:
        return self.disk_diameter / 2

    @property
    def omega(self) -> float:
        return 2 * math.pi * C.c / self.wavelength

    def kappa(self, quality_factor: float | None = None) -> float:
        """Total field decay rate omega / (2Q), defaulting to the narrow-gap Q."""
        q = self.q_narrow if quality_factor is None else quality_factor
        return self.omega / (2 * q)

    def detuning(self, transition: Transition) -> float:
        """Mode frequency minus atomic transition frequency, rad/s."""
        return 2 * math.pi * C.c * (1 / self.wavelength - 1 / transition.wavelength)


@dataclass(frozen=True)
class DiskGeometry:
    diameter: float
    height: float = 1.8e-6
    gap: float = 0.5e-6
    refractive_index: float = 1.454
    coupling_decay: float = 14.0e6  # 1/m, gap dependence of the waveguide coupling rate
    intrinsic_q_scale: float = 1.0
    reference_gaps: tuple[float, float] = (0.5e-6, 0.9e-6)

    def __post_init__(self):
        _positive(self.diameter, "diameter")
        _positive(self.height, "height")
        _positive(self.coupling_decay, "coupling_decay")
        _positive(self.intrinsic_q_scale, "intrinsic_q_scale")
        if self.gap < 0:
            raise ConfigError("gap must be >= 0")
        if not self.refractive_index > 1:
            raise ConfigError("refractive index must exceed 1")

    @property
    def radius(self) -> float:
        return self.diameter / 2


# --- loaders -----------------------------------------------------------------


def load_species(doc: Mapping) -> AtomSpecies:
    """Build an :class:`AtomSpecies` from the ``species`` section of a config."""
    where = "species"
    transitions = []
    for t in _require(doc, "transitions", where):
        transitions.append(
            Transition(
                label=_require(t, "label", "transition"),
                wavelength=_positive(_require(t, "wavelength_nm", "transition"), "wavelength") * 1e-9,
                gamma=U.MHz(_positive(_require(t, "half_linewidth_mhz", "transition"), "half_linewidth")),
            )
        )
    z = _require(doc, "zeeman", where)
    return AtomSpecies(
        name=doc.get("name", "atom"),
        mass=_positive(_require(doc, "mass_kg", where), "mass"),
        transitions=tuple(transitions),
        static_polarizability=_positive(_require(doc, "static_polarizability_au", where), "static_polarizability")
        * U.au_polarizability,
        mean_square_radius=_positive(_require(doc, "mean_square_radius_a0sq", where), "mean_square_radius")
        * U.bohr_radius**2,
        zeeman=Zeeman(F=int(_require(z, "F", "zeeman")), m_F=int(_require(z, "m_F", "zeeman")), g_F=float(_require(z, "g_F", "zeeman"))),
        references=tuple(doc.get("references", ())),
    )


def load_mode(row: Mapping) -> ModeSpec:
    where = "mode row"
    return ModeSpec(
        disk_diameter=float(_require(row, "disk_diameter_um", where)) * 1e-6,
        l=int(_require(row, "l", where)),
        q=int(row.get("q", 1)),
        wavelength=float(_require(row, "wavelength_nm", where)) * 1e-9,
        q_narrow=float(_require(row, "Q1", where)),
        q_wide=float(_require(row, "Q2", where)),
        g0=U.MHz(float(_require(row, "g0_mhz", where))),
        alpha=float(_require(row, "alpha_per_um", where)) * 1e6,
        target_transition=_require(row, "target_transition", where),
        coupling_fraction=row.get("coupling_fraction"),
    )


@dataclass(frozen=True)
class ModeCatalog:
    rows: Mapping[tuple[float, int, int], ModeSpec] = field(default_factory=dict)

    def __getitem__(self, key) -> ModeSpec:
        return self.rows[key]

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows.values())

    def lookup(self, diameter: float, l: int, q: int = 1) -> ModeSpec:
        """Find a row by disk diameter (m), longitudinal and radial index."""
        key = (round(diameter * 1e6, 6), l, q)
        try:
            return self.rows[key]
        except KeyError:
            raise KeyError(f"no mode with D={diameter * 1e6:g} um, l={l}, q={q}") from None


def mode_catalog(table) -> ModeCatalog:
    """Validate a list of mode rows (dicts or ModeSpec) and key them by (D, l, q)."""
    rows: dict = {}
    for row in table:
        mode = row if isinstance(row, ModeSpec) else load_mode(row)
        if mode.key in rows:
            raise ConfigError(f"duplicate mode key {mode.key}")
        rows[mode.key] = mode
    return ModeCatalog(rows)


def load_geometry(doc: Mapping) -> DiskGeometry:
    where = "geometry"
    gaps = doc.get("reference_gaps_um", (0.5, 0.9))
    return DiskGeometry(
        diameter=float(_require(doc, "diameter_um", where)) * 1e-6,
        height=float(doc.get("height_um", 1.8)) * 1e-6,
        gap=float(doc.get("gap_um", 0.5)) * 1e-6,
        refractive_index=float(doc.get("refractive_index", 1.454)),
        coupling_decay=float(doc.get("coupling_decay_per_um", 14.0)) * 1e6,
        intrinsic_q_scale=float(doc.get("intrinsic_q_scale", 1.0)),
        reference_gaps=(gaps[0] * 1e-6, gaps[1] * 1e-6),
    )


def default_config_path() -> Path:
    return Path(str(resources.files("disktrap") / "data" / "rb87_microdisk.json"))


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
