"""Sampled-signal synthesis, propagation, and noise injection.

Sampling convention: sample k of a waveform starting at t0 represents time
t0 + (k + 1/2)/F_s. Midpoint sampling makes slot sums of symmetric pulses
mirror-symmetric at machine precision, which the detector tests rely on.

Two propagation routes exist. ``propagate_frequency_domain`` filters the
sampled signal with the tabulated transfer function around the carrier.
``synthesize_gauss_approx`` skips filtering and directly emits the analytic
Gaussian approximation of each broadened pulse: a transmitted rectangle of
amplitude A and width w becomes A*w/(sigma sqrt(2 pi)) * exp(...), the
wide-sigma limit of ``broadened_amplitude_exact``. The Gaussian carries the
rectangle's amplitude-area A*w, so a width-shrunk pulse arrives with 1/beta
of the conventional pulse's energy, which is exactly the SNR penalty the
alternating-bit BER model assumes. The 1/(sigma sqrt(2 pi)) normalization
does not conserve the transmitted energy A^2*w; that quirk is kept on
purpose because every closed form downstream assumes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from thzook.channel import ChannelParams, TWO_SQRT_2LN2, gaussian_sigma, transfer_function

__all__ = [
    "PulseConfig",
    "SampledWaveform",
    "AnalyticPulse",
    "synthesize_frame",
    "synthesize_gauss_approx",
    "propagate_frequency_domain",
    "broadened_amplitude_exact",
    "broadened_amplitude_approx",
    "add_awgn",
]

# received-pulse tails are truncated this many sigmas from the center when
# sampling analytic pulses; the neglected mass fraction is below 1e-15
GAUSS_WINDOW_SIGMAS = 8.0


@dataclass(frozen=True)
class PulseConfig:
    """Timing and power parameters of the OOK pulse train.

    t_s is derived as n_f * t_f. f_s must make the slot span an integer
    number of samples so the detector can frame slots exactly.
    """

    t_p: float = 0.5e-9
    t_f: float = 2.5e-9
    n_f: int = 1
    p_a: float = 0.01
    f_s: float = 64.0 / 2.5e-9

    def __post_init__(self) -> None:
        if self.t_p <= 0.0 or self.t_f <= 0.0:
            raise ValueError("pulse and repetition intervals must be positive")
        if self.t_p > self.t_f:
            raise ValueError("pulse width cannot exceed the repetition interval")
        if self.n_f < 1:
            raise ValueError("repetitions per bit must be >= 1")
        if self.p_a <= 0.0:
            raise ValueError("pulse power must be positive")
        n = self.f_s * self.t_s
        if abs(n - round(n)) > 1e-6:
            raise ValueError(
                f"sample rate must give an integer sample count per slot, got {n:.6f}"
            )

    @property
    def t_s(self) -> float:
        return self.n_f * self.t_f

    @property
    def samples_per_slot(self) -> int:
        return round(self.f_s * self.t_s)

    @classmethod
    def for_oversampling(
        cls,
        t_p: float = 0.5e-9,
        t_f: float = 2.5e-9,
        n_f: int = 1,
        p_a: float = 0.01,
        beta_max: float = 1.0,
        oversampling: int = 16,
    ) -> "PulseConfig":
        """Pick f_s so the narrowest shrunk pulse T_p/beta_max spans at least
        ``oversampling`` samples, rounded up to an integer per-slot count."""
        t_slot = n_f * t_f
        per_slot = math.ceil(oversampling * beta_max * t_slot / t_p)
        return cls(t_p=t_p, t_f=t_f, n_f=n_f, p_a=p_a, f_s=per_slot / t_slot)

    def check_resolvable(self, beta_max: float, oversampling: int = 16) -> None:
        if self.f_s * (self.t_p / beta_max) < oversampling:
            raise ValueError(
                "sample rate too low to resolve the narrowest shrunk pulse"
            )


@dataclass(frozen=True)
class SampledWaveform:
    """Real amplitude sequence sampled at midpoints of 1/f_s intervals."""

    samples: np.ndarray
    f_s: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("waveform contains non-finite samples")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.f_s

    def times(self) -> np.ndarray:
        return self.t0 + (np.arange(len(self.samples)) + 0.5) / self.f_s

    def energy(self) -> float:
        return float(np.sum(self.samples**2) / self.f_s)

    def dump_csv(self, path) -> None:
        np.savetxt(
            path,
            np.column_stack([self.times(), self.samples]),
            delimiter=",",
            header="t_s,amplitude",
            comments="",
        )


@dataclass(frozen=True)
class AnalyticPulse:
    """Gaussian received pulse: amplitude/(sigma sqrt(2 pi)) peak scaling.

    ``amplitude`` is the Gaussian's area; for a broadened rectangle that is
    the transmit amplitude times width_tx, recorded here for provenance.
    """

    center: float
    sigma: float
    amplitude: float
    width_tx: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")

    def value(self, t) -> np.ndarray:
        return broadened_amplitude_approx(t, self.center, self.sigma, 1.0) * (
            self.amplitude
        )

    def energy(self) -> float:
        # integral of the squared Gaussian amplitude over the whole line
        return self.amplitude**2 / (2.0 * math.sqrt(math.pi) * self.sigma)

    def slot_energy(self, a: float, b: float) -> float:
        """Noiseless energy received in window [a, b]."""
        coeff = self.amplitude**2 / (2.0 * math.sqrt(math.pi) * self.sigma)
        return coeff * 0.5 * (
            erf((b - self.center) / self.sigma) - erf((a - self.center) / self.sigma)
        )


def _check_disjoint(pulses) -> None:
    spans = sorted((c - w / 2.0, c + w / 2.0) for c, w, _ in pulses)
    for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
        if a1 < b0 - 1e-18:
            raise ValueError("plan contains overlapping pulses")


def synthesize_frame(bits, plan, cfg: PulseConfig) -> SampledWaveform:
    """Render a pulse plan as rectangles on the sample grid.

    A sample at time t takes a pulse's amplitude iff t lies in
    [center - width/2, center + width/2). The frame spans len(bits) slots.
    """
    bits = np.asarray(bits)
    if plan.n_bits != len(bits):
        raise ValueError("plan and bit stream lengths disagree")
    pulses = list(plan.pulses)
    if any(w <= 0.0 for _, w, _ in pulses):
        raise ValueError("pulse widths must be positive")
    _check_disjoint(pulses)

    n = len(bits) * cfg.samples_per_slot
    samples = np.zeros(n)
    dt = 1.0 / cfg.f_s
    for center, width, amplitude in pulses:
        # first sample index whose midpoint time is >= center - width/2
        lo = max(0, math.ceil((center - width / 2.0) / dt - 0.5 - 1e-9))
        hi = min(n, math.ceil((center + width / 2.0) / dt - 0.5 - 1e-9))
        samples[lo:hi] += amplitude
    return SampledWaveform(samples=samples, f_s=cfg.f_s)


def synthesize_gauss_approx(
    plan,
    cfg: PulseConfig,
    beta_br: float,
    n_slots: int | None = None,
    t0: float = 0.0,
) -> SampledWaveform:
    """Render the received waveform under the Gaussian broadening model.

    Each transmitted rectangle (center, width, amplitude) becomes a Gaussian
    with sigma = beta_br * width / (2 sqrt(2 ln 2)) carrying the rectangle's
    amplitude-area: peak = amplitude * width / (sigma sqrt(2 pi)). Pulses are
    evaluated over +-8 sigma windows on the sample grid and superpose as
    amplitudes.
    """
    if n_slots is None:
        n_slots = plan.n_bits
    n = n_slots * cfg.samples_per_slot
    samples = np.zeros(n)
    dt = 1.0 / cfg.f_s
    for center, width, amplitude in plan.pulses:
        sigma = gaussian_sigma(beta_br, width)
        half = GAUSS_WINDOW_SIGMAS * sigma
        lo = max(0, int((center - half - t0) / dt) - 1)
        hi = min(n, int((center + half - t0) / dt) + 2)
        if hi <= lo:
            continue
        t = t0 + (np.arange(lo, hi) + 0.5) * dt
        samples[lo:hi] += (
            amplitude
            * width
            / (sigma * math.sqrt(2.0 * math.pi))
            * np.exp(-((t - center) ** 2) / (2.0 * sigma**2))
        )
    return SampledWaveform(samples=samples, f_s=cfg.f_s, t0=t0)


def propagate_frequency_domain(
    w: SampledWaveform,
    ch: ChannelParams,
    table,
    transfer=None,
) -> SampledWaveform:
    """Filter a baseband waveform with the channel around the carrier.

    DFT bins at baseband offset f_k are scaled by H(f_c + f_k); the real part
    of the inverse transform is returned. ``transfer`` may supply a synthetic
    H(f) callable for tests; otherwise the tabulated channel is used and the
    occupied band f_c +- F_s/2 must lie inside the absorption table.
    """
    n = len(w.samples)
    f_k = np.fft.fftfreq(n, d=1.0 / w.f_s)
    if transfer is None:
        f_abs = ch.f_c + f_k
        lo, hi = table.freq_hz[0], table.freq_hz[-1]
        if f_abs.min() < lo or f_abs.max() > hi:
            raise ValueError("occupied band exceeds absorption table coverage")
        h = transfer_function(ch, table, f_abs)
    else:
        h = np.asarray(transfer(f_k), dtype=complex)
        if h.shape != f_k.shape:
            raise ValueError("transfer callable must return one gain per bin")
    spectrum = np.fft.fft(w.samples) * h
    out = np.fft.ifft(spectrum).real
    return SampledWaveform(samples=out, f_s=w.f_s, t0=w.t0)


def broadened_amplitude_exact(t, center: float, t_p: float, sigma: float, p_a: float):
    """Rectangle convolved with a unit-mass Gaussian filter of std sigma."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    t = np.asarray(t, dtype=float)
    root2 = math.sqrt(2.0)
    val = math.sqrt(p_a) * 0.5 * (
        erf((t - center + t_p / 2.0) / (sigma * root2))
        - erf((t - center - t_p / 2.0) / (sigma * root2))
    )
    return float(val) if val.ndim == 0 else val


def broadened_amplitude_approx(t, center_mid: float, sigma: float, p_a: float):
    """Pure-Gaussian approximation with 1/(sigma sqrt(2 pi)) peak scaling."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    t = np.asarray(t, dtype=float)
    val = (
        math.sqrt(p_a)
        / (sigma * math.sqrt(2.0 * math.pi))
        * np.exp(-((t - center_mid) ** 2) / (2.0 * sigma**2))
    )
    return float(val) if val.ndim == 0 else val


def add_awgn(w: SampledWaveform, n0: float, rng: np.random.Generator) -> SampledWaveform:
    """Add white Gaussian noise of per-sample variance N0 * F_s / 2."""
    if n0 < 0.0:
        raise ValueError("noise PSD must be non-negative")
    if n0 == 0.0:
        return SampledWaveform(samples=w.samples.copy(), f_s=w.f_s, t0=w.t0)
    std = math.sqrt(n0 * w.f_s / 2.0)
    noisy = w.samples + rng.normal(0.0, std, size=len(w.samples))
    return SampledWaveform(samples=noisy, f_s=w.f_s, t0=w.t0)
