"""Detection figures of merit and spontaneous-emission heating."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants as C
from scipy import special

from .core import AtomSpecies, DiskGeometry
from .fields import coupling, mode_decay_rates
from .potentials import LightField, TrapConfiguration, mu_B

hbar = C.hbar

# regime limits for the closed-form signal-to-noise ratio
MAX_SATURATION = 0.05
MIN_DETUNING_RATIO = 10.0
# transfer fraction above which Raman spin flips are considered harmful
RAMAN_UNSAFE_TRANSFER = 0.1


def snr(tau: float, a_in: float, kappa_t: float, kappa: float, detuning: float, g: float) -> float:
    """Signal-to-noise ratio 4 sqrt(tau) |A_in| kappa_T g^2 / (|Delta| kappa^2)."""
    if kappa_t > kappa * (1 + 1e-12):
        raise ValueError("kappa_T cannot exceed kappa")
    return 4 * math.sqrt(tau) * abs(a_in) * kappa_t * g * g / (abs(detuning) * kappa * kappa)


def regime_issues(rho11: float, detuning: float, gamma: float, kappa: float) -> tuple[str, ...]:
    """Reasons why the closed-form SNR may not apply; empty when it does."""
    issues = []
    if rho11 >= MAX_SATURATION:
        issues.append(f"saturated: rho11={rho11:.3g} >= {MAX_SATURATION}")
    if abs(detuning) < MIN_DETUNING_RATIO * max(gamma, kappa):
        issues.append("detuning not large compared to gamma and kappa")
    return tuple(issues)


def required_flux(s: float, tau: float, kappa_t: float, kappa: float, detuning: float, g: float) -> float:
    """Input photon flux |A_in|^2 (photons/s) that yields signal-to-noise ``s``."""
    a = s * abs(detuning) * kappa * kappa / (4 * math.sqrt(tau) * kappa_t * g * g)
    return a * a


def cavity_photons(a_in_sq: float, kappa_t: float, kappa: float) -> float:
    """Steady-state intracavity photon number 2 |A_in|^2 kappa_T / kappa^2."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return 2 * a_in_sq * kappa_t / (kappa * kappa)


def input_flux(photons: float, kappa_t: float, kappa: float) -> float:
    return photons * kappa * kappa / (2 * kappa_t)


def scattering_events(gamma: float, rho11: float, tau: float) -> float:
    return 2 * gamma * tau * rho11


def scattered_photons(fields, r: float, tau: float, y: float = 0.0, z=None) -> float:
    """Total spontaneous emissions during ``tau`` summed over the given fields."""
    return float(sum(scattering_events(f.gamma, f.excited_population(r, y, z), tau) for f in fields))


def recoil_energy(species: AtomSpecies, wavelength: float) -> float:
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    k = 2 * math.pi / wavelength
    return (hbar * k) ** 2 / (2 * species.mass)


def ground_state_radius(omegas, mass: float) -> float:
    if any(not w > 0 for w in omegas):
        raise ValueError("all trap frequencies must be positive")
    return math.sqrt(hbar / (2 * mass) * sum(1 / w for w in omegas))


def survival_per_emission(kr0: float) -> float:
    """Direction-averaged probability to stay in the motional ground state after one emission."""
    if kr0 < 1e-6:
        return 1 - kr0 * kr0 / 3
    return math.sqrt(math.pi) / 2 * special.erf(kr0) / kr0


@dataclass(frozen=True)
class Survival:
    p0: tuple[float, ...]
    p_other: float
    p_other_linear: float


def ground_state_survival(omegas, mass: float, emissions) -> Survival:
    """Heating probability after a set of emissions.

    ``emissions`` is a sequence of (wavelength, M) pairs, one per transition.
    """
    r0 = ground_state_radius(omegas, mass)
    p0s, log_stay, linear = [], 0.0, 0.0
    for wavelength, m_events in emissions:
        k = 2 * math.pi / wavelength
        p0 = survival_per_emission(k * r0)
        p0s.append(p0)
        log_stay += m_events * math.log(p0)
        linear += m_events * k * k * r0 * r0 / 3
    return Survival(tuple(p0s), -math.expm1(log_stay), linear)


@dataclass(frozen=True)
class RamanAssessment:
    omega_eff: float
    delta: float
    transfer_fraction: float
    t_flip: float
    unsafe: bool


def raman_assessment(photons: float, g: float, detuning: float, offset_field: float, species: AtomSpecies) -> RamanAssessment:
    """Compare the light-induced Raman coupling with the Zeeman splitting in the offset field."""
    if detuning == 0:
        raise ValueError("detuning must be nonzero")
    omega_eff = abs(photons * g * g / detuning)
    delta = abs(species.zeeman.g_F * mu_B * offset_field) / hbar
    if omega_eff == 0:
        transfer = 0.0
    else:
        transfer = omega_eff**2 / (omega_eff**2 + delta**2)
    t_flip = math.pi / (2 * omega_eff) if omega_eff > 0 else math.inf
    return RamanAssessment(omega_eff, delta, transfer, t_flip, transfer >= RAMAN_UNSAFE_TRANSFER)


@dataclass(frozen=True)
class DetectionReport:
    s: float
    tau: float
    a_in_sq: float
    n_cavity: float
    kappa: float
    kappa_t: float
    m_scattered: float
    m_per_field: tuple[float, ...]
    p_heating: float
    p_heating_linear: float
    recoil_heating: float
    issues: tuple[str, ...] = field(default=())

    @property
    def in_regime(self) -> bool:
        return not self.issues


def detect(cfg: TrapConfiguration, r: float, omegas, tau: float, probe: str = "blue", geometry: DiskGeometry | None = None) -> DetectionReport:
    """Detection report for an atom held at distance ``r``.

    The probe field is the one whose photons define the input flux; g is its
    coupling at the trap center.
    """
    geometry = geometry or cfg.geometry
    fld: LightField = getattr(cfg, probe)
    kappa, kappa_t = mode_decay_rates(fld.profile.mode, geometry)
    g = float(coupling(fld.profile, r))
    a_sq = input_flux(fld.profile.photons, kappa_t, kappa)
    s = snr(tau, math.sqrt(a_sq), kappa_t, kappa, fld.detuning, g)
    fields = [f for f in (cfg.blue, cfg.red) if f is not None]
    per = tuple(scattering_events(f.gamma, float(f.excited_population(r)), tau) for f in fields)
    rho = float(fld.excited_population(r))
    issues = regime_issues(rho, fld.detuning, fld.gamma, kappa)
    if all(w > 0 for w in omegas):
        surv = ground_state_survival(omegas, cfg.species.mass, [(f.transition.wavelength, m) for f, m in zip(fields, per)])
        p_heat, p_lin = surv.p_other, surv.p_other_linear
    else:
        p_heat, p_lin = 1.0, math.inf
        issues += ("no confinement along one axis; heating probability set to 1",)
    recoil = sum(m * recoil_energy(cfg.species, f.transition.wavelength) for f, m in zip(fields, per))
    return DetectionReport(
        s=s,
        tau=tau,
        a_in_sq=a_sq,
        n_cavity=fld.profile.photons,
        kappa=kappa,
        kappa_t=kappa_t,
        m_scattered=float(sum(per)),
        m_per_field=per,
        p_heating=p_heat,
        p_heating_linear=p_lin,
        recoil_heating=recoil,
        issues=issues,
    )

