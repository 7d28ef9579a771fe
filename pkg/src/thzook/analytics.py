"""Closed-form slot energies, ISI powers, BER models, EE gains, complexity.

Every energy expression here is an evaluation of one primitive,
``gaussian_slot_energy``: the kernel P_a/(pi sigma^2) exp(-((v-c)/sigma)^2)
integrated over a window, whose antiderivative is the erf bracket
P_a/(2 sqrt(pi) sigma) [erf((b-c)/sigma) - erf((a-c)/sigma)]. The adaptive
Simpson oracle in :mod:`thzook.quadrature` integrates the kernel directly,
so closed form and oracle agree to roundoff rather than to a model tolerance.

BER models follow the Gaussian energy-statistics convention: under each
hypothesis the slot energy is N(mu, sigma^2) with sigma^2 =
(E_w^2 + E_sig^2) / T_s, where the T_s divisor acts as a dimensionless
slot-count normalization (its unit inconsistency cancels inside Phi ratios).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erf, erfc
from scipy.stats import norm

from thzook.channel import TWO_SQRT_2LN2
from thzook.detector import EnergyModel, threshold_midpoint, threshold_optimal

__all__ = [
    "GaussianSlotQuery",
    "BerInputs",
    "BerComponents",
    "EePrediction",
    "ComplexityModel",
    "gaussian_slot_energy",
    "isi_power_conventional",
    "isi_power_shrunk",
    "isi_alpha_from_geometry",
    "extended_energy",
    "captured_fraction_extended",
    "ber_conventional",
    "ber_conventional_high_snr",
    "ber_alternating",
    "ber_cob",
    "ber_average",
    "ee_gains",
    "ee_decomposition",
    "complexity_model",
]


@dataclass(frozen=True)
class GaussianSlotQuery:
    """Window [a, b] of the squared-Gaussian energy kernel."""

    a: float
    b: float
    center: float
    sigma: float
    p_a: float

    def __post_init__(self) -> None:
        if self.a >= self.b:
            raise ValueError("window must satisfy a < b")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class BerInputs:
    """Inputs of the analytical BER models.

    t_s is the dimensionless normalization dividing the energy variances;
    t_p (same units as t_s) sets the broadening width for the collapsed-pair
    model and defaults to t_s.
    """

    e_signal: float
    e_w: float
    alpha: float = 0.0
    beta_br: float = 1.0
    t_s: float = 1.0
    n_f: int = 1
    scheme: str = "conventional"
    t_p: float | None = None

    def __post_init__(self) -> None:
        if self.e_signal < 0.0 or self.e_w < 0.0:
            raise ValueError("energies must be non-negative")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("ISI fraction must lie in [0, 1)")
        if self.beta_br < 1.0:
            raise ValueError("broadening factor must be >= 1")
        if self.t_s <= 0.0:
            raise ValueError("slot normalization must be positive")
        if self.t_p is None:
            object.__setattr__(self, "t_p", self.t_s)


class BerComponents:
    """Per-pattern error probabilities entering the stream average."""

    __slots__ = ("cob", "alternating", "noise_only")

    def __init__(self, cob: float, alternating: float, noise_only: float):
        self.cob = cob
        self.alternating = alternating
        self.noise_only = noise_only


@dataclass(frozen=True)
class EePrediction:
    """Pattern-level and average energy-saving fractions.

    Three average variants are first-class because they genuinely disagree
    and no single one subsumes the others: ``avg_linear`` (0.5 - 1/beta),
    ``avg_halved`` (0.5 - 0.5/beta, half the lone-one gain), and
    ``avg_exact`` (the disjoint-pairs accounting identity). Reports surface
    all three rather than silently picking one.
    """

    eta_11: float
    eta_10: float
    avg_linear: float
    avg_halved: float
    avg_exact: float
    p: float
    beta_br: float


@dataclass(frozen=True)
class ComplexityModel:
    conventional_ops: float
    conventional_tx: float
    proposed_ops: float
    proposed_tx: float


def gaussian_slot_energy(q: GaussianSlotQuery) -> float:
    """Closed-form energy of the Gaussian kernel over [a, b]."""
    coeff = q.p_a / (2.0 * math.sqrt(math.pi) * q.sigma)
    return coeff * (
        erf((q.b - q.center) / q.sigma) - erf((q.a - q.center) / q.sigma)
    )


def isi_power_conventional(
    t_s: float, t_p: float, sigma: float, p_a: float, a_prev: int
) -> float:
    """Energy a previous-slot pulse leaks into the next slot.

    The leaking pulse sits at the origin of the shifted coordinate; the next
    slot occupies [T_s - T_p/2, 2 T_s - T_p/2].
    """
    if t_p > 2.0 * t_s:
        raise ValueError("pulse wider than two slots is outside the model")
    if a_prev == 0:
        return 0.0
    q = GaussianSlotQuery(
        a=t_s - t_p / 2.0, b=2.0 * t_s - t_p / 2.0, center=0.0, sigma=sigma, p_a=p_a
    )
    return a_prev * a_prev * gaussian_slot_energy(q)


def isi_power_shrunk(t_s: float, t_p: float, beta_br: float, p_a: float) -> float:
    """Next-slot leakage of a width-T_p/beta pulse whose broadened copy has
    the original T_p-equivalent Gaussian width."""
    if beta_br < 1.0:
        raise ValueError("broadening factor must be >= 1")
    t_p_shrunk = t_p / beta_br
    sigma_shrunk = t_p / TWO_SQRT_2LN2
    return isi_power_conventional(t_s, t_p_shrunk, sigma_shrunk, p_a, 1)


def isi_alpha_from_geometry(t_s: float, t_p: float, sigma: float) -> float:
    """ISI fraction shortcut: erfc((T_s - T_p/2)/sigma), the kernel-convention
    ratio of all leaked energy to the in-slot bracket."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return float(erfc((t_s - t_p / 2.0) / sigma))


def extended_energy(k: int, t_s: float, sigma: float, p_a: float, center: float) -> float:
    """Energy captured by slot k, i.e. the window [k T_s, (k+1) T_s], for a
    pulse at ``center``. Any integer k is allowed; summing k over a wide
    range recovers the total mass."""
    q = GaussianSlotQuery(
        a=k * t_s, b=(k + 1) * t_s, center=center, sigma=sigma, p_a=p_a
    )
    return gaussian_slot_energy(q)


def captured_fraction_extended(t_s: float, sigma: float) -> float:
    """Fraction 1/2 [erf(3 T_s/2 sigma) - erf(T_s/2 sigma)] of a pulse's mass
    falling in the slot after next, one slot past the pulse center. Rises
    with sigma until sigma = T_s sqrt(2/ln 3), then falls."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return 0.5 * float(
        erf(3.0 * t_s / (2.0 * sigma)) - erf(t_s / (2.0 * sigma))
    )


def _ber_from_model(model: EnergyModel, gamma_rule: str) -> float:
    if gamma_rule == "midpoint":
        gamma = threshold_midpoint(model.mu1, model.mu0)
    elif gamma_rule == "optimal":
        gamma = threshold_optimal(model)
    else:
        raise ValueError(f"unknown threshold rule {gamma_rule!r}")
    miss = norm.cdf((gamma - model.mu1) / model.sigma1)
    false_alarm = 1.0 - norm.cdf((gamma - model.mu0) / model.sigma0)
    return 0.5 * (miss + false_alarm)


def _variance(e_w: float, e_sig: float, t_s_norm: float) -> float:
    return (e_w * e_w + e_sig * e_sig) / t_s_norm


def conventional_energy_model(inputs: BerInputs) -> EnergyModel:
    e, ew, a = inputs.e_signal, inputs.e_w, inputs.alpha
    return EnergyModel(
        mu1=(1.0 + a) * e + ew,
        sigma1=math.sqrt(_variance(ew, (1.0 + a) * e, inputs.t_s)),
        mu0=a * e + ew,
        sigma0=math.sqrt(_variance(ew, a * e, inputs.t_s)),
    )


def ber_conventional(inputs: BerInputs, gamma_rule: str = "midpoint") -> float:
    """Per-bit error probability with ISI folded in as E_ISI = alpha E."""
    if inputs.e_signal == 0.0:
        return 0.5
    if inputs.e_w == 0.0 and inputs.alpha == 0.0:
        raise ValueError("degenerate model: both hypotheses are noiseless points")
    return _ber_from_model(conventional_energy_model(inputs), gamma_rule)


def ber_conventional_high_snr(inputs: BerInputs) -> float:
    """The high-SNR shortcut 1 - Phi((1 - alpha) E / (2 sigma0)).

    Kept separate because it does not coincide with the midpoint evaluation
    of the full model (whose Phi argument is E/(2 sigma0) regardless of
    alpha); the shortcut folds the ISI penalty into the numerator instead.
    """
    if inputs.e_signal == 0.0:
        return 0.5
    model = conventional_energy_model(inputs)
    arg = (1.0 - inputs.alpha) * inputs.e_signal / (2.0 * model.sigma0)
    return 1.0 - norm.cdf(arg)


def alternating_energy_model(inputs: BerInputs) -> EnergyModel:
    e_alt = inputs.e_signal / inputs.beta_br
    ew = inputs.e_w
    return EnergyModel(
        mu1=e_alt + ew,
        sigma1=math.sqrt(_variance(ew, e_alt, inputs.t_s)),
        mu0=ew,
        sigma0=math.sqrt(_variance(ew, 0.0, inputs.t_s)),
    )


def ber_alternating(inputs: BerInputs, gamma_rule: str = "midpoint") -> float:
    """Isolated-1 (shrunk pulse) error probability; the received energy is
    E_signal/beta_br and the slot sees no ISI."""
    if inputs.e_signal == 0.0:
        return 0.5
    return _ber_from_model(alternating_energy_model(inputs), gamma_rule)


def cob_energy_model(inputs: BerInputs) -> EnergyModel:
    sigma = inputs.beta_br * inputs.t_p / TWO_SQRT_2LN2
    e_con = inputs.e_signal * captured_fraction_extended(inputs.t_s, sigma)
    ew = inputs.e_w
    return EnergyModel(
        mu1=e_con + ew,
        sigma1=math.sqrt(_variance(ew, e_con, inputs.t_s)),
        mu0=ew,
        sigma0=math.sqrt(_variance(ew, 0.0, inputs.t_s)),
    )


def ber_cob(inputs: BerInputs, gamma_rule: str = "midpoint") -> float:
    """Second-bit error probability of a collapsed `11` pair: detection rides
    on the extended energy reaching the following slot."""
    sigma = inputs.beta_br * inputs.t_p / TWO_SQRT_2LN2
    e_con = inputs.e_signal * captured_fraction_extended(inputs.t_s, sigma)
    if e_con == 0.0:
        return 0.5
    return _ber_from_model(cob_energy_model(inputs), gamma_rule)


def ber_average(p: float, components: BerComponents) -> float:
    """Average stream BER as a pattern-probability mixture over disjoint
    pairs: p^2 collapsed, 2p(1-p) alternating, (1-p)^2 noise-only."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("bit probability must lie in [0, 1]")
    return (
        p * p * components.cob
        + 2.0 * p * (1.0 - p) * components.alternating
        + (1.0 - p) * (1.0 - p) * components.noise_only
    )


def noise_only_error(inputs: BerInputs, gamma_rule: str = "midpoint") -> float:
    """False-alarm probability of an all-zero pair under the alternating
    model's threshold."""
    model = alternating_energy_model(inputs)
    if gamma_rule == "midpoint":
        gamma = threshold_midpoint(model.mu1, model.mu0)
    else:
        gamma = threshold_optimal(model)
    return 1.0 - norm.cdf((gamma - model.mu0) / model.sigma0)


def ee_gains(p: float, beta_br: float) -> EePrediction:
    """Pattern and average energy-saving fractions of the adaptive scheme."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("bit probability must lie in [0, 1]")
    if beta_br < 1.0:
        raise ValueError("broadening factor must be >= 1")
    eta_11 = 0.5
    eta_10 = 1.0 - 1.0 / beta_br
    if p == 0.0:
        return EePrediction(eta_11, eta_10, 0.0, 0.0, 0.0, p, beta_br)
    avg_exact = 1.0 - (p * p + 2.0 * p * (1.0 - p) / beta_br) / (2.0 * p)
    return EePrediction(
        eta_11=eta_11,
        eta_10=eta_10,
        avg_linear=0.5 - 1.0 / beta_br,
        avg_halved=0.5 - 0.5 / beta_br,
        avg_exact=avg_exact,
        p=p,
        beta_br=beta_br,
    )


def ee_decomposition(p: float, beta_br: float, normalization: str = "per-bit"):
    """Split the average saving into collapse and shrink contributions.

    "per-bit" counts savings in units of one pulse energy per bit (collapse
    term p^2/2, constant in beta); "vs-conventional" divides by the
    conventional scheme's mean energy p per bit. Both decompose additively.
    """
    if normalization == "per-bit":
        collapse = p * p / 2.0
        shrink = p * (1.0 - p) * (1.0 - 1.0 / beta_br)
    elif normalization == "vs-conventional":
        collapse = p / 2.0
        shrink = (1.0 - p) * (1.0 - 1.0 / beta_br)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return collapse, shrink


def complexity_model(n: int, p: float) -> ComplexityModel:
    """Operation and expected-transmission counts for an N-bit stream."""
    if n < 1:
        raise ValueError("stream length must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("bit probability must lie in [0, 1]")
    return ComplexityModel(
        conventional_ops=2.0 * n,
        conventional_tx=n * p,
        proposed_ops=2.0 * n,
        proposed_tx=n * (p - p * p / 2.0),
    )
