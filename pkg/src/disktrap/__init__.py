"""Design and audit of bichromatic evanescent-wave atom traps near microdisk resonators."""

from .config import FeasibilitySpec, Scenario, load_scenario
from .core import AtomSpecies, ConfigError, DiskGeometry, ModeSpec, mode_catalog
from .fields import FieldProfile, coupling, mode_decay_rates, rabi_frequency
from .potentials import LightField, TrapConfiguration
from .trapology import TrapReport, characterize, find_trap

__version__ = "0.1.0"

__all__ = [
    "AtomSpecies",
    "ConfigError",
    "DiskGeometry",
    "FeasibilitySpec",
    "FieldProfile",
    "LightField",
    "ModeSpec",
    "Scenario",
    "TrapConfiguration",
    "TrapReport",
    "characterize",
    "coupling",
    "find_trap",
    "load_scenario",
    "mode_catalog",
    "mode_decay_rates",
    "rabi_frequency",
]
