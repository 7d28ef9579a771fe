"""Slot-energy integration, threshold selection, and bit decisions.

The detector never learns the transmit scheme: it integrates energy per slot
and compares against a single threshold. Ties decide 0. Threshold selection
offers the midpoint rule and the Gaussian maximum-likelihood crossing; when
the ML quadratic has no root between the class means the midpoint is used and
a ThresholdFallbackWarning is emitted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from thzook.waveform import SampledWaveform

__all__ = [
    "EnergyModel",
    "SlotEnergyReport",
    "ThresholdFallbackWarning",
    "slot_energies",
    "noise_energy_mean",
    "threshold_midpoint",
    "threshold_optimal",
    "decide_bits",
]


class ThresholdFallbackWarning(UserWarning):
    """ML threshold quadratic had no usable root; midpoint substituted."""


@dataclass(frozen=True)
class EnergyModel:
    """Gaussian per-slot energy statistics under each bit hypothesis."""

    mu1: float
    sigma1: float
    mu0: float
    sigma0: float

    def __post_init__(self) -> None:
        if self.sigma1 <= 0.0 or self.sigma0 <= 0.0:
            raise ValueError("energy standard deviations must be positive")
        if self.mu1 <= self.mu0:
            raise ValueError("hypothesis means must satisfy mu1 > mu0")


@dataclass(frozen=True)
class SlotEnergyReport:
    """Per-slot energies with the threshold and decisions that produced them."""

    energies: np.ndarray
    threshold: float
    decisions: np.ndarray
    n_errors: int = 0

    def dump_csv(self, path) -> None:
        arr = np.column_stack(
            [np.arange(len(self.energies)), self.energies, self.decisions]
        )
        np.savetxt(
            path,
            arr,
            delimiter=",",
            header="slot,energy_j,decision",
            comments="",
            fmt=["%d", "%.12e", "%d"],
        )


def slot_energies(w: SampledWaveform, t_s: float) -> np.ndarray:
    """Riemann sums of squared samples over consecutive slots of length t_s."""
    per_slot = w.f_s * t_s
    n_slots = len(w.samples) / per_slot
    if abs(per_slot - round(per_slot)) > 1e-6 or abs(n_slots - round(n_slots)) > 1e-9:
        raise ValueError(
            f"waveform does not frame into whole slots ({n_slots:.6f} slots)"
        )
    per_slot = round(per_slot)
    grid = w.samples.reshape(round(n_slots), per_slot)
    return np.sum(grid * grid, axis=1) / w.f_s


def noise_energy_mean(n0: float, bandwidth: float, t_s: float) -> float:
    """Expected noise energy collected per slot: N0 * B * T_s."""
    if n0 < 0.0 or bandwidth <= 0.0 or t_s <= 0.0:
        raise ValueError("noise PSD must be >= 0; bandwidth and slot must be > 0")
    return n0 * bandwidth * t_s


def threshold_midpoint(mu1: float, mu0: float) -> float:
    """Arithmetic mean of the class means."""
    if mu1 <= mu0:
        raise ValueError("degenerate model: mu1 must exceed mu0")
    return 0.5 * (mu1 + mu0)


def threshold_optimal(model: EnergyModel) -> float:
    """Gaussian ML crossing: the root of equal class likelihoods in [mu0, mu1].

    Solves (g - mu1)^2 sigma0^2 - (g - mu0)^2 sigma1^2
    = sigma0^2 sigma1^2 ln(sigma0^2/sigma1^2). Equal variances reduce this to
    the midpoint. A missing in-range root falls back to the midpoint with a
    ThresholdFallbackWarning.
    """
    mu1, s1, mu0, s0 = model.mu1, model.sigma1, model.mu0, model.sigma0
    if math.isclose(s1, s0, rel_tol=1e-12):
        return threshold_midpoint(mu1, mu0)
    v1, v0 = s1 * s1, s0 * s0
    a = v0 - v1
    b = -2.0 * (mu1 * v0 - mu0 * v1)
    c = mu1 * mu1 * v0 - mu0 * mu0 * v1 - v0 * v1 * math.log(v0 / v1)
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        root = math.sqrt(disc)
        for g in ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a)):
            if mu0 <= g <= mu1:
                return g
    warnings.warn(
        "no likelihood crossing between the class means; using midpoint",
        ThresholdFallbackWarning,
    )
    return threshold_midpoint(mu1, mu0)


def decide_bits(energies, gamma: float) -> np.ndarray:
    """Elementwise strict comparison: bit = 1 iff energy > gamma."""
    return (np.asarray(energies) > gamma).astype(int)
