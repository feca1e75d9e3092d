"""Potential-energy contributions on the atom: optical dipole, atom-surface and magnetic.

The combined potential is the sum V = V_light + V_AS + V_mag. The optical part
for two fields is the sum of the single-field steady-state potentials.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import constants as C
from scipy.integrate import quad

from .core import AtomSpecies, ConfigError, DiskGeometry, Transition
from .fields import FieldProfile, rabi_frequency

hbar = C.hbar
mu_B = C.physical_constants["Bohr magneton"][0]

EXACT = "exact"
FAR_DETUNED = "fardetuned"


class NoTrapWarning(UserWarning):
    """Two fields on the same side of resonance cannot form a radial trap."""


# --- two-level atom in a single field ---------------------------------------


@dataclass(frozen=True)
class TwoLevelSteadyState:
    rho11: float
    rho01_magnitude: float
    detuning: float


def steady_state(rabi, detuning, gamma):
    """Steady-state excited population and coherence magnitude of a driven two-level atom.

    ``gamma`` is half the population decay rate.
    """
    if np.any(np.asarray(gamma) <= 0):
        raise ValueError("gamma must be positive")
    rabi = np.asarray(rabi, dtype=float)
    denom = rabi**2 + 2 * detuning**2 + 2 * gamma**2
    rho11 = 0.5 * rabi**2 / denom
    rho01 = np.abs(rabi) * np.sqrt(gamma**2 + detuning**2) / denom
    return TwoLevelSteadyState(rho11=rho11, rho01_magnitude=rho01, detuning=detuning)


def excited_population(rabi, detuning, gamma):
    rabi = np.asarray(rabi, dtype=float)
    return 0.5 * rabi**2 / (rabi**2 + 2 * detuning**2 + 2 * gamma**2)


def optical_potential_exact(rabi, detuning, gamma):
    """Adiabatic dipole potential (hbar Delta / 2) ln(1 + Omega^2 / (2 Gamma^2 + 2 Delta^2)), in J."""
    rabi = np.asarray(rabi, dtype=float)
    return 0.5 * hbar * detuning * np.log1p(rabi**2 / (2 * gamma**2 + 2 * detuning**2))


def optical_potential_fardetuned(rabi, detuning):
    """Far-detuned limit hbar Omega^2 / (4 Delta), in J."""
    if detuning == 0:
        raise ValueError("far-detuned potential undefined at zero detuning")
    rabi = np.asarray(rabi, dtype=float)
    return hbar * rabi**2 / (4 * detuning)


@dataclass(frozen=True)
class LightField:
    """A cavity field together with the atomic transition it drives."""

    profile: FieldProfile
    transition: Transition

    @property
    def detuning(self) -> float:
        return self.profile.mode.detuning(self.transition)

    @property
    def gamma(self) -> float:
        return self.transition.gamma

    def rabi(self, r, y=0.0, z=None):
        return rabi_frequency(self.profile, r, y, z)

    def potential(self, r, y=0.0, z=None, form: str = EXACT):
        rabi = self.rabi(r, y, z)
        if form == EXACT:
            return optical_potential_exact(rabi, self.detuning, self.gamma)
        if form == FAR_DETUNED:
            return optical_potential_fardetuned(rabi, self.detuning)
        raise ConfigError(f"unknown potential form {form!r}")

    def excited_population(self, r, y=0.0, z=None):
        return excited_population(self.rabi(r, y, z), self.detuning, self.gamma)

    def with_photons(self, photons: float) -> "LightField":
        return LightField(self.profile.with_photons(photons), self.transition)


def bichromatic_potential(blue: LightField, red: LightField, r, y=0.0, z=None, form: str = EXACT):
    """Sum of the blue- and red-detuned single-field potentials."""
    if blue.detuning <= 0 or red.detuning >= 0:
        warnings.warn(
            f"detunings blue={blue.detuning:.3g}, red={red.detuning:.3g} rad/s do not bracket resonance; "
            "no radial trap can form",
            NoTrapWarning,
            stacklevel=2,
        )
    return blue.potential(r, y, z, form) + red.potential(r, y, z, form)


def light_force(potential, r, h: float = 1e-10):
    """Radial force -dV/dr by central differences; ``potential`` maps r (m) to J."""
    r = np.asarray(r, dtype=float)
    if np.any(r - h < 0):
        raise ValueError("finite-difference step straddles the disk surface")
    return -(potential(r + h) - potential(r - h)) / (2 * h)


# --- atom-surface interaction ------------------------------------------------


def _medium_factor(n: float) -> float:
    return (n * n - 1) / (n * n + 1)


def vdw_coefficient(species: AtomSpecies, n: float) -> float:
    """C3 in V = -C3 / r^3, J m^3."""
    return _medium_factor(n) * (4 / 3) * C.e**2 * species.mean_square_radius / (8 * math.pi * C.epsilon_0 * 8)


def vdw_potential(r, species: AtomSpecies, n: float):
    """Non-retarded van-der-Waals potential of a ground-state atom, J."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("atom-surface distance must be positive")
    return -vdw_coefficient(species, n) / r**3


@lru_cache(maxsize=64)
def c4_coefficients(n: float) -> tuple[float, float]:
    """Retarded-limit coefficients (c4_parallel, c4_perp) of a non-dispersive dielectric.

    Both vanish for n = 1 and tend to 1 for a perfect conductor. Computed from
    the Lifshitz retarded integral over p = kappa c / xi in [1, inf) with
    Fresnel coefficients at imaginary frequency.
    """
    if n < 1:
        raise ValueError("refractive index must be >= 1")
    eps = n * n

    def r_s(p):
        s = math.sqrt(eps - 1 + p * p)
        return (p - s) / (p + s)

    def r_p(p):
        s = math.sqrt(eps - 1 + p * p)
        return (eps * p - s) / (eps * p + s)

    par = quad(lambda p: (p * p * r_p(p) - r_s(p)) / p**4, 1, np.inf, epsabs=1e-14, epsrel=1e-12)[0]
    perp = quad(lambda p: (p * p - 1) * r_p(p) / p**4, 1, np.inf, epsabs=1e-14, epsrel=1e-12)[0]
    # perfect-conductor values of the two integrals are 4/3 and 2/3
    return par * 3 / 4, perp * 3 / 2


def cp_coefficient(species: AtomSpecies, n: float) -> float:
    """C4 in V = -C4 / r^4, J m^4."""
    c_par, c_perp = c4_coefficients(float(n))
    return species.static_polarizability * hbar * C.c / (2 * math.pi**2 * C.epsilon_0 * 16) * (2 * c_par + c_perp)


def casimir_polder_potential(r, species: AtomSpecies, n: float):
    """Retarded Casimir-Polder potential, J."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("atom-surface distance must be positive")
    return -cp_coefficient(species, n) / r**4


def vdw_force(r, species, n):
    """Magnitude of the attractive van-der-Waals force, N."""
    return 3 * vdw_coefficient(species, n) / np.asarray(r, dtype=float) ** 4


def cp_force(r, species, n):
    return 4 * cp_coefficient(species, n) / np.asarray(r, dtype=float) ** 5


def crossover_distance(species: AtomSpecies, n: float) -> float:
    """Distance at which the van-der-Waals and Casimir-Polder forces are equal."""
    c3 = vdw_coefficient(species, n)
    if c3 == 0:
        return math.inf
    return 4 * cp_coefficient(species, n) / (3 * c3)


def atom_surface_force(r, species, n):
    """Stitched attractive force magnitude: the weaker of the two asymptotic forms."""
    return np.minimum(vdw_force(r, species, n), cp_force(r, species, n))


def atom_surface_potential(r, species: AtomSpecies, n: float):
    """Potential whose gradient is the stitched force, with V(inf) = 0.

    Below the crossover distance it is the van-der-Waals form plus a constant,
    above it the Casimir-Polder form.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("atom-surface distance must be positive")
    c3 = vdw_coefficient(species, n)
    c4 = cp_coefficient(species, n)
    if c3 == 0:
        return np.zeros_like(r)
    xc = 4 * c4 / (3 * c3)
    offset = -c4 / xc**4 + c3 / xc**3
    return np.where(r < xc, -c3 / r**3 + offset, -c4 / r**4)


# --- magnetic wire trap ------------------------------------------------------

MU0_OVER_2PI = C.mu_0 / (2 * math.pi)


def magnetic_field(x, z, current: float, bias: float, offset: float):
    """Field (Bx, By, Bz) in T of a y-directed wire plus bias -B0 x_hat and offset B_off y_hat.

    Coordinates are measured from the wire center.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    rho2 = x * x + z * z
    if np.any(rho2 == 0):
        raise ValueError("field is singular on the wire axis")
    pref = MU0_OVER_2PI * current / rho2
    return np.stack(np.broadcast_arrays(pref * z - bias, np.full_like(x * z, offset), -pref * x))


def trap_height(current: float, bias: float) -> float:
    """Height above the wire where its field cancels the bias field."""
    return MU0_OVER_2PI * current / bias


@dataclass(frozen=True)
class MagneticTrap:
    species: AtomSpecies
    current: float
    height: float
    offset: float

    @property
    def bias(self) -> float:
        return MU0_OVER_2PI * self.current / self.height

    @property
    def gradient(self) -> float:
        """|dBx/dz| = |dBz/dx| at the trap center, T/m."""
        return MU0_OVER_2PI * self.current / self.height**2

    @property
    def moment(self) -> float:
        z = self.species.zeeman
        return z.m_F * z.g_F * mu_B

    def potential(self, x, z):
        b = magnetic_field(x, z, self.current, self.bias, self.offset)
        return self.moment * np.sqrt(np.sum(b * b, axis=0))

    def harmonic_potential(self, x, z):
        return self.moment * (self.offset + self.gradient**2 / (2 * self.offset) * (x * x + (z - self.height) ** 2))

    @property
    def omega(self) -> float:
        return self.gradient * math.sqrt(self.moment / (self.species.mass * self.offset))

    @property
    def omega_z_trap(self) -> float:
        """Oscillation frequency for the usual Z-trap choice B_offset = B0."""
        return math.sqrt(MU0_OVER_2PI * self.current * self.moment / (self.species.mass * self.height)) / self.height

    def splitting(self, delta_m: int = 1) -> float:
        """Energy between adjacent Zeeman levels at the trap center, J."""
        return delta_m * self.species.zeeman.g_F * mu_B * abs(self.offset)

    @property
    def max_force(self) -> float:
        return self.moment * self.gradient


def magnetic_trap(species: AtomSpecies, current: float, height: float, offset: float | None = None) -> MagneticTrap:
    """Wire trap at ``height`` above a wire carrying ``current``; offset defaults to B0."""
    z = species.zeeman
    if z.m_F * z.g_F <= 0:
        raise ConfigError("requested Zeeman state is not weak-field seeking (m_F g_F <= 0)")
    if offset is None:
        offset = MU0_OVER_2PI * current / height
    return MagneticTrap(species, current, height, offset)


# --- combined configuration --------------------------------------------------


@dataclass(frozen=True)
class TrapConfiguration:
    """Everything needed to evaluate V(r, y, z) near the disk.

    ``r`` is the distance from the disk side wall, ``y`` the arc length along
    the rim and ``z`` the height above the disk bottom.
    """

    species: AtomSpecies
    geometry: DiskGeometry
    blue: LightField | None
    red: LightField | None
    surface: bool = True
    magnetic: MagneticTrap | None = None
    magnetic_center: float = 150e-9
    form: str = EXACT

    def with_photons(self, blue: float | None = None, red: float | None = None) -> "TrapConfiguration":
        cfg = self
        if blue is not None:
            cfg = replace(cfg, blue=cfg.blue.with_photons(blue))
        if red is not None:
            cfg = replace(cfg, red=cfg.red.with_photons(red))
        return cfg

    @property
    def photons(self) -> tuple[float, float]:
        return (self.blue.profile.photons if self.blue else 0.0, self.red.profile.photons if self.red else 0.0)

    def terms(self, r, y=0.0, z=None) -> dict:
        r = np.asarray(r, dtype=float)
        zero = np.zeros(np.broadcast(r, np.asarray(y)).shape)
        out = {
            "blue": self.blue.potential(r, y, z, self.form) if self.blue else zero,
            "red": self.red.potential(r, y, z, self.form) if self.red else zero,
            "surface": atom_surface_potential(r, self.species, self.geometry.refractive_index) + zero if self.surface else zero,
        }
        if self.magnetic is not None:
            zc = self.magnetic.height + (0.0 if z is None else np.asarray(z) - self.geometry.height / 2)
            out["magnetic"] = self.magnetic.potential(r - self.magnetic_center, zc) + zero
        else:
            out["magnetic"] = zero
        out["total"] = out["blue"] + out["red"] + out["surface"] + out["magnetic"]
        return out

    def optical(self, r, y=0.0, z=None):
        t = self.terms(r, y, z)
        return t["blue"] + t["red"]

    def potential(self, r, y=0.0, z=None):
        return self.terms(r, y, z)["total"]

    def radial(self, r):
        """Total potential along the radial line through the trap (y = 0, z = H/2)."""
        return self.potential(r)


def total_potential(configuration: TrapConfiguration, r, y=0.0, z=None):
    return configuration.potential(r, y, z)
