"""Trap characterization: minimum, depth, frequencies, ground state and tunneling.

Also holds the analytic two-exponential model used for cross-checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import constants as C
from scipy import optimize

from .potentials import TrapConfiguration, optical_potential_fardetuned

hbar = C.hbar

DEFAULT_WINDOW = (10e-9, 1000e-9)
DEFAULT_STEP = 1e-9
MIN_SAFE_DISTANCE = 80e-9


class NoTrapError(ValueError):
    """The requested configuration does not produce a potential minimum."""


class ShallowTrapWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TrapReport:
    """Radial and 3D characterization of one trap.

    ``depth`` is the smaller of the inner barrier (toward the disk) and the
    outer barrier (toward large r); both are kept separately.
    """

    exists: bool
    r_min: float = math.nan
    v_min: float = math.nan
    depth: float = 0.0
    inner_barrier: float = 0.0
    outer_barrier: float = 0.0
    barrier_position: float = math.nan
    curvature: float = math.nan
    omega_x: float = 0.0
    omega_y: float = 0.0
    omega_z: float = 0.0
    ground_state_energy: float = math.nan
    sizes: tuple[float, float, float] = (math.nan, math.nan, math.nan)
    tunneling_probability: float = math.nan
    above_barrier: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def frequencies(self) -> tuple[float, float, float]:
        return (self.omega_x, self.omega_y, self.omega_z)


NO_TRAP = TrapReport(exists=False)


def _second_derivative(f, x, h):
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def _scalar(f):
    return lambda x: float(f(np.asarray(x, dtype=float)))


def find_trap(potential, window=DEFAULT_WINDOW, step=DEFAULT_STEP, mass: float | None = None) -> TrapReport:
    """Locate the deepest interior minimum of a radial potential on ``window``.

    The potential is sampled on a grid of spacing ``step``; the best bracket is
    refined by golden-section search. ``mass`` enables omega_x.
    """
    lo, hi = window
    if not hi > lo + 2 * step:
        raise ValueError("search window too small for the grid step")
    r = np.arange(lo, hi + 0.5 * step, step)
    v = np.asarray(potential(r), dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("potential is not finite on the search window")
    interior = np.where((v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:]))[0] + 1
    if interior.size == 0:
        return NO_TRAP
    i = int(interior[np.argmin(v[interior])])
    f = _scalar(potential)
    res = optimize.minimize_scalar(f, bracket=(r[i - 1], r[i], r[i + 1]), method="golden", tol=1e-12)
    r_min = float(res.x) if r[i - 1] <= res.x <= r[i + 1] else float(r[i])
    v_min = f(r_min)

    j = int(np.argmax(v[: i + 1]))
    if 0 < j < i:
        br = optimize.minimize_scalar(lambda x: -f(x), bracket=(r[j - 1], r[j], r[j + 1]), method="golden", tol=1e-12)
        barrier_position, barrier = float(br.x), -float(br.fun)
    else:
        barrier_position, barrier = float(r[j]), float(v[j])
    inner = barrier - v_min
    k = i + int(np.argmax(v[i:]))
    outer = float(v[k]) - v_min
    if 0 < k < len(r) - 1 and k > i:
        ob = optimize.minimize_scalar(lambda x: -f(x), bracket=(r[k - 1], r[k], r[k + 1]), method="golden", tol=1e-12)
        outer = max(outer, -float(ob.fun) - v_min)

    h = min(step / 2, r_min / 4)
    curvature = _second_derivative(f, r_min, h)
    depth = min(inner, outer)
    if not (curvature > 0 and depth > 0):
        return NO_TRAP
    notes = []
    if r_min < MIN_SAFE_DISTANCE * (1 - 1e-6) and lo < MIN_SAFE_DISTANCE < hi and hi < 1e-3:
        notes.append(f"trap center {r_min * 1e9:.1f} nm is closer than {MIN_SAFE_DISTANCE * 1e9:.0f} nm to the surface")
    omega_x = math.sqrt(curvature / mass) if mass else 0.0
    return TrapReport(
        exists=True,
        r_min=r_min,
        v_min=v_min,
        depth=depth,
        inner_barrier=inner,
        outer_barrier=outer,
        barrier_position=barrier_position,
        curvature=curvature,
        omega_x=omega_x,
        notes=tuple(notes),
    )


# --- analytic two-exponential model ------------------------------------------


@dataclass(frozen=True)
class ExponentialTrapModel:
    """V(r) = V_b0 exp(-alpha_b r) + V_r0 exp(-alpha_r r) with V_b0 > 0 > V_r0."""

    v_b0: float
    v_r0: float
    alpha_b: float
    alpha_r: float

    def __post_init__(self):
        if not (self.v_b0 > 0 and self.v_r0 < 0):
            raise ValueError("need V_b0 > 0 and V_r0 < 0")
        if not (self.alpha_b > 0 and self.alpha_r > 0):
            raise ValueError("decay constants must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.v_b0 * np.exp(-self.alpha_b * r) + self.v_r0 * np.exp(-self.alpha_r * r)

    @classmethod
    def from_configuration(cls, cfg: TrapConfiguration) -> "ExponentialTrapModel":
        """Far-detuned exponential approximation of the two light fields."""
        def amp(fld):
            return optical_potential_fardetuned(fld.profile.peak_rabi(), fld.detuning)

        return cls(float(amp(cfg.blue)), float(amp(cfg.red)), cfg.blue.profile.potential_decay, cfg.red.profile.potential_decay)


@dataclass(frozen=True)
class AnalyticTrap:
    r_min: float
    v_min: float
    omega: float
    depth: float


def analytic_trap(model: ExponentialTrapModel, mass: float, r_inner: float = 0.0) -> AnalyticTrap:
    """Closed-form minimum; the depth is measured against V(r_inner) and V(inf) = 0."""
    if not model.alpha_b > model.alpha_r or not model.alpha_b * model.v_b0 > model.alpha_r * abs(model.v_r0):
        raise NoTrapError("repulsive force does not dominate near the surface; no minimum")
    da = model.alpha_b - model.alpha_r
    r_min = math.log(model.v_b0 * model.alpha_b / (abs(model.v_r0) * model.alpha_r)) / da
    v_min = -model.v_b0 * math.exp(-model.alpha_b * r_min) * da / model.alpha_r
    omega = math.sqrt(model.alpha_r * model.alpha_b * abs(v_min) / mass)
    depth = min(float(model(r_inner)), 0.0) - v_min
    return AnalyticTrap(r_min, v_min, omega, depth)


def sensitivity(model: ExponentialTrapModel, fraction: float) -> float:
    """Shift of r_min when |V_r0| changes by ``fraction``; a stronger red field moves the trap inward."""
    da = model.alpha_b - model.alpha_r
    if da == 0:
        raise ValueError("equal decay constants: r_min is undefined")
    return fraction / da


# --- 3D confinement ----------------------------------------------------------


def frequencies_3d(cfg: TrapConfiguration, report: TrapReport) -> tuple[float, float, float]:
    """(omega_x, omega_y, omega_z) at the trap center.

    omega_z follows from the cos^2 height profile of the total optical
    potential; omega_y from the standing-wave modulation of the red field.
    """
    if not report.exists:
        raise NoTrapError("no trap to characterize")
    if not report.curvature > 0:
        raise NoTrapError("negative curvature at the trap center (saddle)")
    m = cfg.species.mass
    omega_x = math.sqrt(report.curvature / m)
    terms = cfg.terms(report.r_min)
    v_opt = float(terms["blue"] + terms["red"])
    omega_z = math.pi / cfg.geometry.height * math.sqrt(abs(v_opt) / m)
    omega_y = 0.0
    if cfg.red is not None and cfg.red.profile.standing_wave:
        mode = cfg.red.profile.mode
        omega_y = mode.l / mode.radius * math.sqrt(abs(float(terms["red"])) / m)
    return omega_x, omega_y, omega_z


def ground_state_sizes(omegas, mass):
    return tuple(math.sqrt(hbar / (2 * mass * w)) if w > 0 else math.inf for w in omegas)


# --- tunneling ---------------------------------------------------------------


@lru_cache(maxsize=8)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def wkb_exponent(potential, a: float, b: float, energy: float, mass: float, nodes: int = 256) -> float:
    """2 / hbar * integral of sqrt(2 m (V - E)) over [a, b], clipped where V < E.

    The substitution x = a + (b - a)(1 - cos t)/2 removes the square-root
    behavior at the turning points, so Gauss-Legendre on t converges fast.
    """
    if b <= a:
        return 0.0
    u, w = _gauss_legendre(nodes)
    t = 0.5 * math.pi * (u + 1)
    x = a + 0.5 * (b - a) * (1 - np.cos(t))
    jac = 0.25 * math.pi * (b - a) * np.sin(t)
    v = np.asarray(potential(x), dtype=float)
    integrand = np.sqrt(np.clip(2 * mass * (v - energy), 0.0, None))
    return 2 * float(np.sum(w * integrand * jac)) / hbar


@dataclass(frozen=True)
class TunnelingResult:
    probability: float
    transmission: float
    energy: float
    turning_points: tuple[float, float]
    above_barrier: bool = False


def tunneling_probability(potential, report: TrapReport, tau: float, mass: float) -> TunnelingResult:
    """Probability to tunnel through the inner barrier during ``tau``.

    Uses the ground-state energy of radial motion and an attempt rate
    omega_x / 2pi.
    """
    if not report.exists:
        raise NoTrapError("no trap")
    omega_x = math.sqrt(report.curvature / mass)
    energy = report.v_min + 0.5 * hbar * omega_x
    f = _scalar(potential)
    top = report.barrier_position
    if energy >= report.v_min + report.inner_barrier:
        return TunnelingResult(1.0, 1.0, energy, (top, top), above_barrier=True)
    right = optimize.brentq(lambda x: f(x) - energy, top, report.r_min, xtol=1e-15)
    left = 0.0
    x = top
    while x > 1e-12:
        x_next = x / 2
        if f(x_next) < energy:
            left = optimize.brentq(lambda s: f(s) - energy, x_next, x, xtol=1e-15)
            break
        x = x_next
    exponent = wkb_exponent(potential, left, right, energy, mass)
    transmission = math.exp(-exponent)
    prob = -math.expm1(-omega_x / (2 * math.pi) * transmission * tau)
    return TunnelingResult(prob, transmission, energy, (left, right))


# --- full characterization ---------------------------------------------------


def characterize(cfg: TrapConfiguration, tau: float | None = None, window=DEFAULT_WINDOW, step=DEFAULT_STEP) -> TrapReport:
    """Radial search plus 3D frequencies, ground state and (if ``tau``) tunneling."""
    m = cfg.species.mass
    report = find_trap(cfg.radial, window, step, mass=m)
    if not report.exists:
        return report
    wx, wy, wz = frequencies_3d(cfg, report)
    energy = 0.5 * hbar * (wx + wy + wz)
    sizes = ground_state_sizes((wx, wy, wz), m)
    prob, above = math.nan, False
    if tau is not None:
        t = tunneling_probability(cfg.radial, report, tau, m)
        prob, above = t.probability, t.above_barrier
    for note in report.notes:
        warnings.warn(note, ShallowTrapWarning, stacklevel=2)
    return replace(
        report,
        omega_x=wx,
        omega_y=wy,
        omega_z=wz,
        ground_state_energy=energy,
        sizes=sizes,
        tunneling_probability=prob,
        above_barrier=above,
    )


__all__ = [
    "AnalyticTrap",
    "ExponentialTrapModel",
    "NoTrapError",
    "TrapReport",
    "TunnelingResult",
    "analytic_trap",
    "characterize",
    "find_trap",
    "frequencies_3d",
    "ground_state_sizes",
    "sensitivity",
    "tunneling_probability",
    "wkb_exponent",
]
