"""Independent scalar re-implementations used as test oracles.

Written with plain ``math`` and hard-coded CODATA values so they share no code
with the package.
"""

import math

C_LIGHT = 299792458.0
HBAR = 1.054571817e-34
KB = 1.380649e-23
E_CHARGE = 1.602176634e-19
EPS0 = 8.8541878128e-12
A0 = 5.29177210903e-11
MU_B = 9.2740100783e-24
MU0 = 1.25663706212e-6
AU_POL = 1.64877727436e-41
M_RB87 = 1.443160648e-25


def two_pi_mhz(nu):
    return 2 * math.pi * nu * 1e6


def rabi(g0_mhz, photons, decay_per_um, r_nm):
    """Omega(r) at mid-height for a traveling wave with field decay ``decay_per_um``."""
    return 2 * two_pi_mhz(g0_mhz) * math.sqrt(photons) * math.exp(-decay_per_um * r_nm * 1e-3)


def kappa(q, wavelength_nm):
    return 2 * math.pi * C_LIGHT / (wavelength_nm * 1e-9) / (2 * q)


def detuning(mode_nm, atom_nm):
    return 2 * math.pi * C_LIGHT * (1 / (mode_nm * 1e-9) - 1 / (atom_nm * 1e-9))


def rho11(om, de, ga):
    return 0.5 * om * om / (om * om + 2 * de * de + 2 * ga * ga)


def v_exact(om, de, ga):
    return HBAR * de / 2 * math.log(1 + om * om / (2 * ga * ga + 2 * de * de))


def c3(r2_a0sq, n):
    return (n * n - 1) / (n * n + 1) * 4 / 3 * E_CHARGE**2 * r2_a0sq * A0**2 / (8 * math.pi * EPS0 * 8)


def c4_midpoint(n, steps=400000, pmax=4000.0):
    """c4 coefficients by a crude midpoint rule on p in [1, pmax] plus a 1/p^3 tail."""
    e = n * n
    par = perp = 0.0
    dp = (pmax - 1) / steps
    for i in range(steps):
        p = 1 + (i + 0.5) * dp
        s = math.sqrt(e - 1 + p * p)
        rs = (p - s) / (p + s)
        rp = (e * p - s) / (e * p + s)
        par += (p * p * rp - rs) / p**4 * dp
        perp += (p * p - 1) * rp / p**4 * dp
    # for large p: r_p -> (e-1)/(e+1), r_s -> 0
    rinf = (e - 1) / (e + 1)
    par += rinf / pmax
    perp += rinf / pmax
    return par * 0.75, perp * 1.5


def c4(alpha_au, n):
    cpar, cperp = c4_midpoint(n)
    return alpha_au * AU_POL * HBAR * C_LIGHT / (2 * math.pi**2 * EPS0 * 16) * (2 * cpar + cperp)


def wire_trap(current, z0, mf_gf, mass=M_RB87):
    """(omega, splitting in J for delta m = 1 at g_F = mf_gf/m_F = 1/2, max force) for B_off = B0."""
    b0 = MU0 * current / (2 * math.pi * z0)
    grad = b0 / z0
    omega = grad * math.sqrt(mf_gf * MU_B / (mass * b0))
    return omega, b0, mf_gf * MU_B * grad


def recoil(wavelength_nm, mass=M_RB87):
    k = 2 * math.pi / (wavelength_nm * 1e-9)
    return (HBAR * k) ** 2 / (2 * mass)


def p0_direction_average(kr0, n=20001):
    """Average of exp(-(k r0 cos theta)^2) over the unit sphere by Simpson's rule in u = cos theta."""
    h = 2.0 / (n - 1)
    total = 0.0
    for i in range(n):
        u = -1 + i * h
        w = 1 if i in (0, n - 1) else (4 if i % 2 else 2)
        total += w * math.exp(-((kr0 * u) ** 2))
    return total * h / 3 / 2


def rectangular_wkb(height, width, mass):
    """WKB exponent 2 w sqrt(2 m V0) / hbar for a flat barrier of height V0 above E."""
    return 2 * width * math.sqrt(2 * mass * height) / HBAR
