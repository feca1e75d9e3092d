"""Backscattering into the counter-propagating mode and the resulting trap-depth fluctuations.

The interference of the pumped and backscattered waves modulates the
intensity by a fraction 2 sqrt(I-/I+), which is taken as the trap-depth
fluctuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InfeasibleRequirement(ValueError):
    """No coupling fraction in (0, 1] meets the fluctuation budget."""


@dataclass(frozen=True)
class BackscatterModel:
    """Counter-propagating coupling ``epsilon`` (real, >= 0), decay rates and pump, all in rad/s."""

    epsilon: float
    kappa: float
    kappa_t: float
    pump: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if not 0 <= self.kappa_t <= self.kappa:
            raise ValueError("need 0 <= kappa_T <= kappa")

    @property
    def kappa_int(self) -> float:
        return self.kappa - self.kappa_t

    @classmethod
    def from_ratios(cls, eps_over_kappa_int: float, coupling_fraction: float, kappa: float = 1.0, pump: float = 1.0):
        # (1 - f) kappa rather than kappa - f kappa: no cancellation as f -> 1
        return cls(eps_over_kappa_int * (1 - coupling_fraction) * kappa, kappa, coupling_fraction * kappa, pump)


def steady_state_amplitudes(model: BackscatterModel) -> tuple[float, float]:
    """(alpha_plus, alpha_minus) with alpha_- = (eps / kappa) alpha_+."""
    x = model.epsilon / model.kappa
    plus = model.pump / (model.kappa * (1 + x * x))
    return plus, x * plus


def amplitude_ratio(model: BackscatterModel) -> float:
    """sqrt(I-/I+) = eps / kappa."""
    return model.epsilon / model.kappa


def amplitude_ratio_from_ratios(eps_over_kappa_int: float, coupling_fraction: float) -> float:
    """sqrt(I-/I+) = (eps / kappa_int)(1 - kappa_T / kappa)."""
    return eps_over_kappa_int * (1 - coupling_fraction)


def intensity_ratio(model: BackscatterModel) -> float:
    if model.kappa_int == 0 and model.epsilon > 0:
        raise ValueError("kappa_int = 0 with eps > 0: eps / kappa_int undefined")
    return amplitude_ratio(model) ** 2


def depth_fluctuation(amplitude: float) -> float:
    """Fractional trap-depth modulation from two-wave interference."""
    return 2 * amplitude


def stability_requirement(eps_over_kappa_int: float, budget: float) -> float:
    """Smallest kappa_T / kappa keeping depth fluctuations within +-``budget``.

    Returns 0 when any coupling fraction satisfies the budget.
    """
    if not budget > 0:
        raise ValueError("budget must be positive")
    if eps_over_kappa_int <= 0 or math.isinf(budget):
        return 0.0
    required = 1 - (budget / 2) / eps_over_kappa_int
    if required < 0:
        return 0.0
    if required >= 1:
        raise InfeasibleRequirement("budget cannot be met for kappa_T / kappa <= 1")
    return required
