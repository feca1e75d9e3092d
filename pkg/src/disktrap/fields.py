"""Evanescent field profiles of the disk modes and the resulting Rabi frequencies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import interpolate, optimize, special

from .core import ConfigError, DiskGeometry, ModeSpec

EXPONENTIAL = "exponential"
HANKEL = "hankel"

# How the tabulated decay constant alpha enters the field:
#   "amplitude": field (and g) decay as exp(-alpha r), intensity as exp(-2 alpha r)
#   "intensity": intensity decays as exp(-alpha r), field as exp(-alpha r / 2)
AMPLITUDE = "amplitude"
INTENSITY = "intensity"


def field_decay_constant(mode: ModeSpec, convention: str = AMPLITUDE) -> float:
    """Decay constant of the field amplitude outside the disk, 1/m."""
    if convention == AMPLITUDE:
        return mode.alpha
    if convention == INTENSITY:
        return mode.alpha / 2
    raise ConfigError(f"unknown alpha convention {convention!r}")


class HankelEnvelope:
    """Normalized outgoing-wave radial envelope |H_l(k rho)| / |H_l(k R)|.

    The wavenumber k is fixed by requiring the logarithmic derivative at the
    disk surface to equal ``-decay``; ``n_eff = k / k0`` is reported.
    """

    def __init__(self, l: int, radius: float, decay: float, wavelength: float, r_max: float = 5e-6):
        self.l = l
        self.radius = radius
        self.decay = decay
        self.k = self._solve_k()
        self.n_eff = self.k * wavelength / (2 * math.pi)
        r = np.linspace(0.0, r_max, 2001)
        logenv = self._log_abs_h(self.k * (radius + r)) - self._log_abs_h(self.k * radius)
        self._spline = interpolate.CubicSpline(r, logenv)
        self.r_max = r_max

    def _log_abs_h(self, x):
        return np.log(np.abs(special.hankel1(self.l, x)))

    def _log_derivative(self, k):
        x = k * self.radius
        dx = 1e-6 * x
        return k * (self._log_abs_h(x + dx) - self._log_abs_h(x - dx)) / (2 * dx)

    def _solve_k(self):
        lo, hi = 0.05 * self.l / self.radius, 0.999 * self.l / self.radius
        return optimize.brentq(lambda k: self._log_derivative(k) + self.decay, lo, hi, xtol=1e-12 * hi)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r > self.r_max):
            raise ValueError("Hankel envelope evaluated beyond its tabulated range")
        return np.exp(self._spline(r))


@dataclass(frozen=True)
class FieldProfile:
    mode: ModeSpec
    photons: float
    height: float = 1.8e-6
    profile_kind: str = EXPONENTIAL
    standing_wave: bool = False
    alpha_convention: str = AMPLITUDE

    def __post_init__(self):
        if self.photons < 0:
            raise ConfigError("photon number must be >= 0")
        if self.profile_kind not in (EXPONENTIAL, HANKEL):
            raise ConfigError(f"unknown profile kind {self.profile_kind!r}")
        field_decay_constant(self.mode, self.alpha_convention)

    @property
    def decay(self) -> float:
        """Field amplitude decay constant, 1/m."""
        return field_decay_constant(self.mode, self.alpha_convention)

    @property
    def potential_decay(self) -> float:
        """Decay constant of the intensity (and of a far-detuned potential), 1/m."""
        return 2 * self.decay

    @cached_property
    def hankel(self) -> HankelEnvelope:
        return HankelEnvelope(self.mode.l, self.mode.radius, self.decay, self.mode.wavelength)

    def radial_envelope(self, r):
        """Field amplitude relative to its value at the disk surface."""
        r = np.asarray(r, dtype=float)
        if self.profile_kind == EXPONENTIAL:
            return np.exp(-self.decay * r)
        return self.hankel(r)

    def with_photons(self, photons: float) -> "FieldProfile":
        return FieldProfile(self.mode, photons, self.height, self.profile_kind, self.standing_wave, self.alpha_convention)

    def peak_rabi(self) -> float:
        """Rabi frequency at the disk surface, mid-height, traveling wave: 2 g0 sqrt(N)."""
        return 2 * self.mode.g0 * math.sqrt(self.photons)


def _spatial_factor(profile: FieldProfile, r, y, z):
    r = np.asarray(r, dtype=float)
    H = profile.height
    if r.min(initial=0.0) < 0:
        raise ValueError("position inside the disk (r < 0)")
    if z is None:  # mid-height, where the axial factor is 1
        factor = profile.radial_envelope(r)
    else:
        z = np.asarray(z, dtype=float)
        if np.min(z) < 0 or np.max(z) > H:
            raise ValueError("z outside [0, H]")
        factor = profile.radial_envelope(r) * np.cos(np.pi * (z - H / 2) / H)
    if profile.standing_wave and np.any(y):
        factor = factor * np.cos(profile.mode.l * np.asarray(y, dtype=float) / profile.mode.radius)
    return factor


def coupling(profile: FieldProfile, r, y=0.0, z=None):
    """Single-photon Rabi frequency g(x) in rad/s."""
    return profile.mode.g0 * _spatial_factor(profile, r, y, z)


def rabi_frequency(profile: FieldProfile, r, y=0.0, z=None):
    """Rabi frequency 2 g(x) sqrt(N) at radial distance r from the surface.

    ``y`` is the arc length along the rim, ``z`` the height above the disk
    bottom (defaults to mid-height H/2).
    """
    return profile.peak_rabi() * _spatial_factor(profile, r, y, z)


# --- cavity decay rates ------------------------------------------------------


@dataclass(frozen=True)
class GapModel:
    """Gap dependence of the total Q for one mode.

    1/Q(gap) = 1/Q_int + 1/Q_c(gap) with an intrinsic part and a waveguide
    coupling part decaying as exp(-gamma * gap). The two tabulated Q values fix
    Q_int and the coupling prefactor; gamma comes from the geometry.
    """

    mode: ModeSpec
    geometry: DiskGeometry
    _coeffs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g1, g2 = self.geometry.reference_gaps
        gamma = self.geometry.coupling_decay
        b = (1 / self.mode.q_narrow - 1 / self.mode.q_wide) / (1 - math.exp(-gamma * (g2 - g1)))
        a = 1 / self.mode.q_narrow - b
        if a <= 0 or b <= 0:
            raise ConfigError(f"tabulated Q values of mode l={self.mode.l} are inconsistent with the gap model")
        object.__setattr__(self, "_coeffs", (a / self.geometry.intrinsic_q_scale, b))

    @property
    def supported_range(self) -> tuple[float, float]:
        g1, g2 = self.geometry.reference_gaps
        return (g1 - 0.2e-6, g2 + 0.3e-6)

    def _check(self, gap):
        lo, hi = self.supported_range
        if not lo - 1e-15 <= gap <= hi + 1e-15:
            raise ConfigError(f"gap {gap * 1e6:g} um outside supported range [{lo * 1e6:g}, {hi * 1e6:g}] um")

    def intrinsic_q(self) -> float:
        return 1 / self._coeffs[0]

    def coupling_q(self, gap: float) -> float:
        self._check(gap)
        g1 = self.geometry.reference_gaps[0]
        return math.exp(self.geometry.coupling_decay * (gap - g1)) / self._coeffs[1]

    def quality_factor(self, gap: float) -> float:
        return 1 / (1 / self.intrinsic_q() + 1 / self.coupling_q(gap))

    def coupling_fraction(self, gap: float) -> float:
        return self.quality_factor(gap) / self.coupling_q(gap)


def mode_decay_rates(mode: ModeSpec, geometry: DiskGeometry, gap: float | None = None) -> tuple[float, float]:
    """Total and waveguide-coupling field decay rates (kappa, kappa_T) in rad/s."""
    gap = geometry.gap if gap is None else gap
    model = GapModel(mode, geometry)
    kappa = mode.kappa(model.quality_factor(gap))
    fraction = mode.coupling_fraction if mode.coupling_fraction is not None else model.coupling_fraction(gap)
    return kappa, fraction * kappa
