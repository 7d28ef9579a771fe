"""THz line-of-sight channel: spreading loss, molecular absorption, broadening.

Amplitude-domain conventions throughout: spreading and absorption are gains
in (0, 1], the phase term has unit magnitude, and the broadened impulse
response is summarized by a single Gaussian standard deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "TWO_SQRT_2LN2",
    "AbsorptionTable",
    "ChannelParams",
    "BroadeningModel",
    "spreading_loss",
    "absorption_coefficient",
    "molecular_loss",
    "transfer_function",
    "broadening_factor",
    "gaussian_sigma",
]

SPEED_OF_LIGHT = 299_792_458.0
# full-width-half-maximum to Gaussian-sigma conversion, 2*sqrt(2*ln 2)
TWO_SQRT_2LN2 = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class AbsorptionTable:
    """Tabulated absorption coefficient k(f), linearly interpolated.

    Parameters
    ----------
    freq_hz : tuple of float
        Strictly increasing grid frequencies in Hz.
    k_per_m : tuple of float
        Non-negative absorption coefficients in 1/m at each grid frequency.
    """

    freq_hz: tuple[float, ...]
    k_per_m: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.freq_hz) == 0:
            raise ValueError("absorption table must be non-empty")
        if len(self.freq_hz) != len(self.k_per_m):
            raise ValueError("frequency and coefficient columns differ in length")
        f = np.asarray(self.freq_hz, dtype=float)
        if len(f) > 1 and not np.all(np.diff(f) > 0.0):
            raise ValueError("frequencies must be strictly increasing")
        if np.any(np.asarray(self.k_per_m, dtype=float) < 0.0):
            raise ValueError("absorption coefficients must be non-negative")

    @classmethod
    def constant(cls, k: float, f_lo: float = 1e9, f_hi: float = 1e14) -> "AbsorptionTable":
        """Degenerate two-row table with constant k over [f_lo, f_hi]."""
        return cls(freq_hz=(f_lo, f_hi), k_per_m=(k, k))

    @classmethod
    def from_gas_mixture(
        cls,
        gases: list[tuple[np.ndarray, np.ndarray, float]],
        p: float,
        p0: float,
        temperature: float,
        t_stp: float,
    ) -> "AbsorptionTable":
        """Build k(f) = (p/p0)(T_STP/T) * sum_q Q_q sigma_q(f) from per-gas tables.

        Each entry of ``gases`` is (freq_hz, sigma_m2, number_density_per_m3);
        all gas tables must share one frequency grid.
        """
        if not gases:
            raise ValueError("at least one gas table required")
        grid = np.asarray(gases[0][0], dtype=float)
        k = np.zeros_like(grid)
        for freq, sigma, q in gases:
            if not np.array_equal(np.asarray(freq, dtype=float), grid):
                raise ValueError("gas tables must share one frequency grid")
            k += q * np.asarray(sigma, dtype=float)
        k *= (p / p0) * (t_stp / temperature)
        return cls(freq_hz=tuple(grid), k_per_m=tuple(k))


@dataclass(frozen=True)
class ChannelParams:
    """Link geometry and noise parameters.

    tau_s defaults to d/c; tests may override it to probe the phase term.
    """

    f_c: float = 1.12e12
    bandwidth: float = 45e9
    d: float = 10.0
    eta_br: float = 0.2
    g_tx_dbi: float = 20.0
    g_rx_dbi: float = 20.0
    n0: float = 1e-21
    tau_s: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.d <= 0.0:
            raise ValueError("distance must be positive")
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        if self.eta_br < 0.0:
            raise ValueError("broadening rate must be non-negative")
        if self.tau_s is None:
            object.__setattr__(self, "tau_s", self.d / SPEED_OF_LIGHT)

    @property
    def beta_br(self) -> float:
        return broadening_factor(self.eta_br, self.d)


@dataclass(frozen=True)
class BroadeningModel:
    """Gaussian summary of the broadened channel response for one pulse width."""

    beta_br: float
    sigma: float

    def __post_init__(self) -> None:
        if self.beta_br < 1.0:
            raise ValueError("broadening factor must be >= 1")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")

    @classmethod
    def for_width(cls, beta_br: float, t_p: float) -> "BroadeningModel":
        return cls(beta_br=beta_br, sigma=gaussian_sigma(beta_br, t_p))


def spreading_loss(f: float, d: float) -> float:
    """Free-space amplitude gain c/(4 pi f d).

    Parameters
    ----------
    f : float
        Frequency in Hz, > 0.
    d : float
        Distance in m, > 0.
    """
    if f <= 0.0 or d <= 0.0:
        raise ValueError("frequency and distance must be positive")
    return SPEED_OF_LIGHT / (4.0 * math.pi * f * d)


def absorption_coefficient(table: AbsorptionTable, f: float) -> float:
    """Interpolate k(f) in 1/m; refuses to extrapolate outside the grid."""
    lo, hi = table.freq_hz[0], table.freq_hz[-1]
    if f < lo or f > hi:
        raise ValueError(
            f"frequency {f:.6g} Hz outside table range [{lo:.6g}, {hi:.6g}] Hz"
        )
    return float(np.interp(f, table.freq_hz, table.k_per_m))


def molecular_loss(k: float, d: float) -> float:
    """Absorption amplitude gain exp(-k d / 2)."""
    if k < 0.0:
        raise ValueError("absorption coefficient must be non-negative")
    if d <= 0.0:
        raise ValueError("distance must be positive")
    return math.exp(-0.5 * k * d)


def transfer_function(params: ChannelParams, table: AbsorptionTable, f) -> complex:
    """Complex channel gain H(f) = H_spread * H_abs * exp(-j 2 pi f tau).

    Accepts a scalar or an array of frequencies; vectorizes over the array.
    """
    f_arr = np.asarray(f, dtype=float)
    if np.any(f_arr <= 0.0):
        raise ValueError("frequency must be positive")
    lo, hi = table.freq_hz[0], table.freq_hz[-1]
    if np.any(f_arr < lo) or np.any(f_arr > hi):
        raise ValueError("frequency outside absorption table range")
    h_s = SPEED_OF_LIGHT / (4.0 * math.pi * f_arr * params.d)
    k = np.interp(f_arr, table.freq_hz, table.k_per_m)
    h_a = np.exp(-0.5 * k * params.d)
    phase = np.exp(-2j * math.pi * f_arr * params.tau_s)
    h = h_s * h_a * phase
    return complex(h) if np.isscalar(f) or f_arr.ndim == 0 else h


def broadening_factor(eta_br: float, d: float) -> float:
    """Pulse-width stretch factor 1 + eta_br * d, always >= 1."""
    if eta_br < 0.0 or d < 0.0:
        raise ValueError("broadening rate and distance must be non-negative")
    return 1.0 + eta_br * d


def gaussian_sigma(beta_br: float, t_p: float) -> float:
    """Std of the Gaussian received pulse: beta_br * T_p / (2 sqrt(2 ln 2))."""
    if beta_br < 1.0:
        raise ValueError("broadening factor must be >= 1")
    if t_p <= 0.0:
        raise ValueError("pulse width must be positive")
    return beta_br * t_p / TWO_SQRT_2LN2
