"""Conversions between the SI values used internally and the units used for I/O.

Everything inside the package is SI (J, m, s, rad/s, T, kg). Lengths are read
and written in nm or um, energies as temperatures (uK, mK), frequencies as
nu = omega / 2pi in MHz, and magnetic fields in Gauss.
"""

import math

from scipy import constants as C

k_B = C.k
hbar = C.hbar
h = C.h
mu_B_J_per_T = C.physical_constants["Bohr magneton"][0]
GAUSS = 1e-4  # T
bohr_radius = C.physical_constants["Bohr radius"][0]
au_polarizability = C.physical_constants["atomic unit of electric polarizability"][0]


def nm(x):
    return x * 1e-9


def to_nm(x):
    return x / 1e-9


def um(x):
    return x * 1e-6


def to_um(x):
    return x / 1e-6


def uK(x):
    """Energy given as a temperature in microkelvin -> J."""
    return x * 1e-6 * k_B


def to_uK(energy):
    return energy / (1e-6 * k_B)


def mK(x):
    return x * 1e-3 * k_B


def to_mK(energy):
    return energy / (1e-3 * k_B)


def MHz(nu):
    """Cyclic frequency nu in MHz -> angular frequency in rad/s."""
    return 2 * math.pi * nu * 1e6


def to_MHz(omega):
    return omega / (2 * math.pi * 1e6)


def kHz(nu):
    return 2 * math.pi * nu * 1e3


def to_kHz(omega):
    return omega / (2 * math.pi * 1e3)


def gauss(b):
    return b * GAUSS


def to_gauss(b):
    return b / GAUSS


def force_to_uK_per_nm(force):
    """Force in N expressed as uK/nm, the unit used for surface and light forces."""
    return force * 1e-9 / (1e-6 * k_B)


def energy_to_MHz(energy):
    """Energy expressed as the cyclic frequency E/h in MHz."""
    return energy / h / 1e6
