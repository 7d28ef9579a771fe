"""Link-level Monte Carlo sweeps and the closed-form validation suite.

Simulation model: the transmitter emits the pulse plan of the selected
scheme, the channel broadens each pulse by beta_br and scales the amplitude
by the flat gain at the carrier, and the receiver integrates slot energies
and thresholds them. Symbol timing is assumed perfect, so the propagation
delay never enters; the carrier-level magnitude does, although it cancels
from every BER once the noise floor is anchored to the received reference
energy.

Sweeps use common random numbers: each trial draws one bit stream and one
unit-variance noise stream, both reused across every sweep point and every
scheme. Curves from the same run are therefore directly comparable and the
whole report is reproducible bit for bit from the seed.

Threshold rules:

``separating``
    Midpoint of the extreme noiseless slot energies of the two bit classes,
    measured once per scheme on a calibration stream (all 256 byte patterns
    plus a random tail), then shifted by the mean noise energy per slot.
    This is the default; class-mean midpoints place the threshold between
    the modes of multimodal energy distributions and misread entire pattern
    classes, collapsed pairs worst of all.
``midpoint``
    Midpoint of the noiseless class means plus the mean noise energy.
``optimal``
    Gaussian likelihood crossing of the two-class energy model built from
    the calibration moments and the chi-square noise statistics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from thzook.analytics import (
    GaussianSlotQuery,
    ee_decomposition,
    ee_gains,
    gaussian_slot_energy,
)
from thzook.channel import (
    AbsorptionTable,
    ChannelParams,
    TWO_SQRT_2LN2,
    absorption_coefficient,
    gaussian_sigma,
    molecular_loss,
    spreading_loss,
)
from thzook.detector import (
    EnergyModel,
    decide_bits,
    noise_energy_mean,
    slot_energies,
    threshold_optimal,
)
from thzook.quadrature import gaussian_power_integral
from thzook.txscheme import (
    EncoderConfig,
    count_transmissions,
    encode_adaptive,
    encode_conventional,
    plan_energy,
)
from thzook.waveform import (
    GAUSS_WINDOW_SIGMAS,
    PulseConfig,
    SampledWaveform,
    propagate_frequency_domain,
    synthesize_frame,
    synthesize_gauss_approx,
)

__all__ = [
    "SCHEMES",
    "SweepPoint",
    "ExperimentReport",
    "ExperimentConfig",
    "Calibration",
    "ByteRoundtrip",
    "ValidationCheck",
    "ValidationReport",
    "wilson_interval",
    "normal_interval",
    "channel_amplitude_gain",
    "reference_pulse_energy",
    "calibrate_threshold",
    "model_ber_mc",
    "run_ber_vs_snr",
    "run_ber_vs_power",
    "run_ee_vs_beta",
    "run_energy_vs_n",
    "run_tx_events",
    "run_byte_roundtrip",
    "run_validation_suite",
]

SCHEMES = ("conventional", "adaptive", "adaptive-ec")

# 95% two-sided normal quantile used by every interval in the reports
Z_95 = 1.959963984540054


def wilson_interval(k: int, n: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion k/n."""
    if n <= 0:
        return 0.0, 1.0
    p_hat = k / n
    denom = 1.0 + z * z / n
    center = (p_hat + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z * z / (4.0 * n * n)) / denom
    # the exact algebra pins the boundary cases; rounding must not move them
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def normal_interval(mean: float, std: float, n: int, z: float = Z_95) -> tuple[float, float]:
    """Normal CI for a sample mean from n draws with sample std."""
    if n <= 1:
        return mean, mean
    half = z * std / math.sqrt(n)
    return mean - half, mean + half


@dataclass(frozen=True)
class SweepPoint:
    x: float
    scheme: str
    mean: float
    std: float
    ci_lo: float
    ci_hi: float
    n: int


@dataclass(frozen=True)
class ExperimentReport:
    """Sweep result: one row per (x, scheme) plus run metadata.

    Rows with n == 0 are analytic model curves, not measurements.
    """

    kind: str
    x_label: str
    rows: tuple[SweepPoint, ...]
    meta: dict

    def schemes(self) -> tuple[str, ...]:
        seen = []
        for row in self.rows:
            if row.scheme not in seen:
                seen.append(row.scheme)
        return tuple(seen)

    def series(self, scheme: str) -> dict[str, np.ndarray]:
        rows = [r for r in self.rows if r.scheme == scheme]
        if not rows:
            raise KeyError(f"no rows for scheme {scheme!r}")
        return {
            "x": np.array([r.x for r in rows]),
            "mean": np.array([r.mean for r in rows]),
            "std": np.array([r.std for r in rows]),
            "ci_lo": np.array([r.ci_lo for r in rows]),
            "ci_hi": np.array([r.ci_hi for r in rows]),
            "n": np.array([r.n for r in rows]),
        }

    def dump_csv(self, path) -> None:
        with open(path, "w") as fh:
            sha = self.meta.get("config_sha256")
            if sha is not None:
                # comment line so csv readers that skip '#' still see the table
                fh.write(f"# config_sha256={sha}\n")
            fh.write("x,scheme,mean,std,ci_lo,ci_hi,n\n")
            for r in self.rows:
                fh.write(
                    f"{r.x:.10g},{r.scheme},{r.mean:.12e},{r.std:.12e},"
                    f"{r.ci_lo:.12e},{r.ci_hi:.12e},{r.n}\n"
                )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "x_label": self.x_label,
            "meta": self.meta,
            "rows": [
                {
                    "x": r.x,
                    "scheme": r.scheme,
                    "mean": r.mean,
                    "std": r.std,
                    "ci_lo": r.ci_lo,
                    "ci_hi": r.ci_hi,
                    "n": r.n,
                }
                for r in self.rows
            ],
        }

    def dump_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs: link parameters, grids, and run controls."""

    channel: ChannelParams = field(default_factory=ChannelParams)
    absorption: AbsorptionTable = field(default_factory=lambda: AbsorptionTable.constant(0.0))
    pulse: PulseConfig = field(default_factory=lambda: PulseConfig.for_oversampling(beta_max=3.0))
    encoder_mode: str = "disjoint-pairs"
    n_max: int = 2
    early_center: bool = False
    propagation_mode: str = "gauss-approx"
    schemes: tuple[str, ...] = SCHEMES
    snr_db: tuple[float, ...] = (8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0)
    power_dbm: tuple[float, ...] = (0.0, 3.0, 6.0, 9.0, 12.0)
    snr_ref_db: float = 8.0
    beta_grid: tuple[float, ...] = (1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0)
    n_grid: tuple[int, ...] = (1000, 5000, 10000)
    p_grid: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    p_one: float = 0.5
    n_bits: int = 4096
    n_trials: int = 25
    seed: int = 20260823
    gamma_rule: str = "separating"
    guard_slots: int = 12
    cost_per_event_j: float = 1e-12

    def __post_init__(self) -> None:
        if not 0.0 < self.p_one < 1.0:
            raise ValueError("p_one must lie strictly between 0 and 1")
        if self.n_bits < 2 or self.n_trials < 1:
            raise ValueError("need at least 2 bits and 1 trial")
        if self.guard_slots < 1:
            raise ValueError("at least one guard slot is required")
        if self.gamma_rule not in ("separating", "midpoint", "optimal"):
            raise ValueError(f"unknown threshold rule {self.gamma_rule!r}")
        if self.propagation_mode not in ("gauss-approx", "exact-fd"):
            raise ValueError(f"unknown propagation mode {self.propagation_mode!r}")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes {sorted(unknown)}; pick from {SCHEMES}")

    def encoder(self, conserve_energy: bool) -> EncoderConfig:
        return EncoderConfig(
            beta_br=self.channel.beta_br,
            conserve_energy=conserve_energy,
            mode=self.encoder_mode,
            n_max=self.n_max,
            early_center=self.early_center,
        )

    def describe(self) -> dict:
        return {
            "seed": self.seed,
            "n_bits": self.n_bits,
            "n_trials": self.n_trials,
            "p_one": self.p_one,
            "guard_slots": self.guard_slots,
            "schemes": list(self.schemes),
            "encoder_mode": self.encoder_mode,
            "propagation_mode": self.propagation_mode,
            "gamma_rule": self.gamma_rule,
            "d_m": self.channel.d,
            "eta_br_per_m": self.channel.eta_br,
            "beta_br": self.channel.beta_br,
            "f_c_hz": self.channel.f_c,
            "bandwidth_hz": self.channel.bandwidth,
            "n0_w_per_hz": self.channel.n0,
            "t_p_s": self.pulse.t_p,
            "t_f_s": self.pulse.t_f,
            "n_f": self.pulse.n_f,
            "t_s_s": self.pulse.t_s,
            "p_a_w": self.pulse.p_a,
            "f_s_hz": self.pulse.f_s,
            "samples_per_slot": self.pulse.samples_per_slot,
        }


def channel_amplitude_gain(ch: ChannelParams, table: AbsorptionTable) -> float:
    """Flat received-amplitude factor at the carrier, antenna gains included."""
    k = absorption_coefficient(table, ch.f_c)
    h = spreading_loss(ch.f_c, ch.d) * molecular_loss(k, ch.d)
    return 10.0 ** ((ch.g_tx_dbi + ch.g_rx_dbi) / 20.0) * h


def _encode(scheme: str, bits: np.ndarray, cfg: ExperimentConfig):
    if scheme == "conventional":
        return encode_conventional(bits, cfg.pulse)
    if scheme == "adaptive":
        return encode_adaptive(bits, cfg.pulse, cfg.encoder(conserve_energy=False))
    if scheme == "adaptive-ec":
        return encode_adaptive(bits, cfg.pulse, cfg.encoder(conserve_energy=True))
    raise ValueError(f"unknown scheme {scheme!r}; pick from {SCHEMES}")


def _propagate(bits, plan, cfg: ExperimentConfig, guard: int) -> SampledWaveform:
    """Receive a pulse plan through the configured propagation mode.

    Both modes assume perfect symbol timing, so the line-of-sight delay is
    dropped; the exact-fd path keeps the per-bin magnitude of H instead of
    the flat carrier gain, on top of a rectangle synthesis.
    """
    t_s = cfg.pulse.t_s
    if cfg.propagation_mode == "exact-fd":
        base = synthesize_frame(bits, plan, cfg.pulse)
        pad = guard * cfg.pulse.samples_per_slot
        padded = SampledWaveform(
            samples=np.concatenate([np.zeros(pad), base.samples, np.zeros(pad)]),
            f_s=base.f_s,
            t0=-guard * t_s,
        )
        out = propagate_frequency_domain(
            padded, replace(cfg.channel, tau_s=0.0), cfg.absorption
        )
        g = 10.0 ** ((cfg.channel.g_tx_dbi + cfg.channel.g_rx_dbi) / 20.0)
        return SampledWaveform(samples=g * out.samples, f_s=out.f_s, t0=out.t0)
    w = synthesize_gauss_approx(
        plan,
        cfg.pulse,
        cfg.channel.beta_br,
        n_slots=len(bits) + 2 * guard,
        t0=-guard * t_s,
    )
    g = channel_amplitude_gain(cfg.channel, cfg.absorption)
    return SampledWaveform(samples=g * w.samples, f_s=w.f_s, t0=w.t0)


def _received_waveform(bits: np.ndarray, scheme: str, cfg: ExperimentConfig) -> SampledWaveform:
    plan = _encode(scheme, bits, cfg)
    return _propagate(bits, plan, cfg, cfg.guard_slots)


def reference_pulse_energy(cfg: ExperimentConfig) -> float:
    """Received energy of one isolated conventional bit, integrated numerically.

    This anchors the SNR definition: SNR = E_ref / (N0 B_eff T_s) with
    B_eff = F_s / 2, so the mean noise energy per slot is E_ref / SNR.
    """
    sigma = gaussian_sigma(cfg.channel.beta_br, cfg.pulse.t_p)
    guard = max(
        cfg.guard_slots,
        math.ceil(GAUSS_WINDOW_SIGMAS * sigma / cfg.pulse.t_s) + 1,
    )
    bits = np.array([1])
    plan = encode_conventional(bits, cfg.pulse)
    return _propagate(bits, plan, cfg, guard).energy()


def _noise_psd_for_snr(cfg: ExperimentConfig, e_ref: float, snr_db: float) -> float:
    b_eff = cfg.pulse.f_s / 2.0
    return e_ref / (10.0 ** (snr_db / 10.0) * b_eff * cfg.pulse.t_s)


@dataclass(frozen=True)
class Calibration:
    """Noiseless slot-energy statistics of one scheme on the reference stream."""

    scheme: str
    max_zero: float
    min_one: float
    mean_zero: float
    mean_one: float
    var_zero: float
    var_one: float

    @property
    def gamma0(self) -> float:
        return 0.5 * (self.max_zero + self.min_one)

    @property
    def separable(self) -> bool:
        return self.min_one > self.max_zero


def _calibration_bits(cfg: ExperimentConfig) -> np.ndarray:
    """All 256 byte patterns, zero padded, then a seeded random tail."""
    blocks = []
    for pattern in range(256):
        blocks.extend((pattern >> (7 - j)) & 1 for j in range(8))
        blocks.extend((0, 0))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x5EED]))
    tail = (rng.random(cfg.n_bits) < cfg.p_one).astype(int)
    return np.concatenate([np.array(blocks, dtype=int), tail])


def calibrate_threshold(scheme: str, cfg: ExperimentConfig) -> Calibration:
    bits = _calibration_bits(cfg)
    w = _received_waveform(bits, scheme, cfg)
    e = slot_energies(w, cfg.pulse.t_s)[cfg.guard_slots : cfg.guard_slots + len(bits)]
    ones = e[bits == 1]
    zeros = e[bits == 0]
    return Calibration(
        scheme=scheme,
        max_zero=float(zeros.max()),
        min_one=float(ones.min()),
        mean_zero=float(zeros.mean()),
        mean_one=float(ones.mean()),
        var_zero=float(zeros.var()),
        var_one=float(ones.var()),
    )


def _threshold(cal: Calibration, energy_scale: float, n0: float, cfg: ExperimentConfig) -> float:
    f_s = cfg.pulse.f_s
    e_w = noise_energy_mean(n0, f_s / 2.0, cfg.pulse.t_s)
    if cfg.gamma_rule == "separating":
        return energy_scale * cal.gamma0 + e_w
    if cfg.gamma_rule == "midpoint":
        return energy_scale * 0.5 * (cal.mean_one + cal.mean_zero) + e_w
    if n0 <= 0.0:
        return energy_scale * cal.gamma0 + e_w
    # chi-square noise statistics per slot: base term from the squared noise,
    # cross term proportional to the slot's noiseless signal energy
    per_var = n0 * f_s / 2.0
    s = cfg.pulse.samples_per_slot
    var_base = 2.0 * s * (per_var / f_s) ** 2
    mu1 = energy_scale * cal.mean_one
    mu0 = energy_scale * cal.mean_zero
    sigma1 = math.sqrt(energy_scale**2 * cal.var_one + var_base + 4.0 * mu1 * per_var / f_s)
    sigma0 = math.sqrt(energy_scale**2 * cal.var_zero + var_base + 4.0 * mu0 * per_var / f_s)
    model = EnergyModel(mu1=mu1 + e_w, sigma1=sigma1, mu0=mu0 + e_w, sigma0=sigma0)
    return threshold_optimal(model)


def _ber_engine(cfg: ExperimentConfig, xs, amp_scale_fn, n0_fn):
    """Shared BER sweep core.

    amp_scale_fn(x) scales the received amplitude relative to the configured
    power; n0_fn(x) gives the noise PSD at sweep point x. Returns pooled
    error counts and per-trial BERs keyed by (scheme, x), plus calibrations.
    """
    cfg.pulse.check_resolvable(cfg.channel.beta_br)
    t_s = cfg.pulse.t_s
    guard = cfg.guard_slots
    cals = {scheme: calibrate_threshold(scheme, cfg) for scheme in cfg.schemes}
    acc = {(scheme, x): [0, 0, []] for scheme in cfg.schemes for x in xs}

    trial_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trials)
    n_samples = (cfg.n_bits + 2 * guard) * cfg.pulse.samples_per_slot
    for seed in trial_seeds:
        bits_ss, noise_ss = seed.spawn(2)
        bits = (np.random.default_rng(bits_ss).random(cfg.n_bits) < cfg.p_one).astype(int)
        z = np.random.default_rng(noise_ss).standard_normal(n_samples)
        for scheme in cfg.schemes:
            w = _received_waveform(bits, scheme, cfg)
            for x in xs:
                a = amp_scale_fn(x)
                n0 = n0_fn(x)
                std = math.sqrt(n0 * cfg.pulse.f_s / 2.0) if n0 > 0.0 else 0.0
                noisy = SampledWaveform(a * w.samples + std * z, cfg.pulse.f_s, w.t0)
                e = slot_energies(noisy, t_s)[guard : guard + cfg.n_bits]
                gamma = _threshold(cals[scheme], a * a, n0, cfg)
                errors = int(np.count_nonzero(decide_bits(e, gamma) != bits))
                cell = acc[(scheme, x)]
                cell[0] += errors
                cell[1] += cfg.n_bits
                cell[2].append(errors / cfg.n_bits)
    return acc, cals


def _ber_rows(cfg: ExperimentConfig, xs, acc) -> tuple[SweepPoint, ...]:
    rows = []
    for scheme in cfg.schemes:
        for x in xs:
            errors, total, per_trial = acc[(scheme, x)]
            mean = errors / total
            std = float(np.std(per_trial, ddof=1)) if len(per_trial) > 1 else 0.0
            lo, hi = wilson_interval(errors, total)
            rows.append(SweepPoint(x, scheme, mean, std, lo, hi, total))
    return tuple(rows)


def _calibration_meta(cals: dict[str, Calibration]) -> dict:
    return {
        scheme: {
            "gamma0_j": cal.gamma0,
            "max_zero_j": cal.max_zero,
            "min_one_j": cal.min_one,
            "separable": cal.separable,
        }
        for scheme, cal in cals.items()
    }


def run_ber_vs_snr(cfg: ExperimentConfig) -> ExperimentReport:
    """BER against per-slot SNR in dB for every configured scheme."""
    e_ref = reference_pulse_energy(cfg)
    xs = tuple(cfg.snr_db)
    n0_by_x = {x: _noise_psd_for_snr(cfg, e_ref, x) for x in xs}
    acc, cals = _ber_engine(cfg, xs, lambda x: 1.0, lambda x: n0_by_x[x])
    meta = cfg.describe()
    meta.update(
        {
            "e_ref_j": e_ref,
            "n0_w_per_hz_by_point": {f"{x:g}": n0_by_x[x] for x in xs},
            "calibration": _calibration_meta(cals),
        }
    )
    return ExperimentReport("ber-vs-snr", "snr_db", _ber_rows(cfg, xs, acc), meta)


def run_ber_vs_power(cfg: ExperimentConfig) -> ExperimentReport:
    """BER against transmit power in dBm at a fixed noise floor.

    The noise PSD is anchored so the lowest power in the sweep sees
    snr_ref_db; higher powers then scan upward from that reference.
    """
    e_ref = reference_pulse_energy(cfg)
    xs = tuple(cfg.power_dbm)
    p_cfg = cfg.pulse.p_a
    powers_w = {x: 10.0 ** ((x - 30.0) / 10.0) for x in xs}
    p_anchor = min(powers_w.values())
    n0 = _noise_psd_for_snr(cfg, e_ref * p_anchor / p_cfg, cfg.snr_ref_db)
    acc, cals = _ber_engine(
        cfg, xs, lambda x: math.sqrt(powers_w[x] / p_cfg), lambda x: n0
    )
    meta = cfg.describe()
    meta.update(
        {
            "e_ref_j_at_config_power": e_ref,
            "n0_w_per_hz": n0,
            "snr_ref_db": cfg.snr_ref_db,
            "anchor_power_dbm": min(xs, key=lambda x: powers_w[x]),
            "calibration": _calibration_meta(cals),
        }
    )
    return ExperimentReport("ber-vs-power", "power_dbm", _ber_rows(cfg, xs, acc), meta)


def run_ee_vs_beta(cfg: ExperimentConfig) -> ExperimentReport:
    """Measured transmit-energy saving of the adaptive scheme against the
    broadening factor, with the analytic gain variants alongside.

    Measured rows divide plan energies, so they are exact per stream; model
    rows (n == 0) carry the three closed-form averages plus the collapse and
    shrink shares of the exact one, which sum to it.
    """
    trial_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trials)
    all_bits = [
        (np.random.default_rng(s.spawn(2)[0]).random(cfg.n_bits) < cfg.p_one).astype(int)
        for s in trial_seeds
    ]
    e_conv = [plan_energy(encode_conventional(b, cfg.pulse)) for b in all_bits]

    rows = []
    for beta in cfg.beta_grid:
        enc = EncoderConfig(
            beta_br=beta, conserve_energy=False, mode=cfg.encoder_mode, n_max=cfg.n_max
        )
        gains = [
            1.0 - plan_energy(encode_adaptive(b, cfg.pulse, enc)) / e
            for b, e in zip(all_bits, e_conv)
        ]
        mean = float(np.mean(gains))
        std = float(np.std(gains, ddof=1)) if len(gains) > 1 else 0.0
        lo, hi = normal_interval(mean, std, len(gains))
        rows.append(SweepPoint(beta, "measured", mean, std, lo, hi, len(gains)))
    for beta in cfg.beta_grid:
        pred = ee_gains(cfg.p_one, beta)
        collapse, shrink = ee_decomposition(cfg.p_one, beta, normalization="vs-conventional")
        for scheme, value in (
            ("model-exact", pred.avg_exact),
            ("model-linear", pred.avg_linear),
            ("model-halved", pred.avg_halved),
            ("model-collapse", collapse),
            ("model-shrink", shrink),
        ):
            rows.append(SweepPoint(beta, scheme, value, 0.0, value, value, 0))
    meta = cfg.describe()
    meta["variant_note"] = (
        "model-linear (0.5 - 1/beta) and model-halved (0.5 - 0.5/beta) are "
        "simplified averages that disagree with the exact disjoint-pairs "
        "accounting (model-exact); measured rows adjudicate between them"
    )
    return ExperimentReport("ee-vs-beta", "beta_br", tuple(rows), meta)


def run_energy_vs_n(cfg: ExperimentConfig) -> ExperimentReport:
    """Total transmission-event energy against stream length.

    Every pattern-level event costs cost_per_event_j; measured rows average
    over seeded streams, model rows scale the expected event counts.
    """
    rows = []
    trial_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trials)
    enc = cfg.encoder(conserve_energy=False)
    for n in cfg.n_grid:
        per_scheme = {"conventional": [], "adaptive": []}
        for seed in trial_seeds:
            bits = (np.random.default_rng(seed.spawn(2)[0]).random(n) < cfg.p_one).astype(int)
            per_scheme["conventional"].append(
                count_transmissions(encode_conventional(bits, cfg.pulse)) * cfg.cost_per_event_j
            )
            per_scheme["adaptive"].append(
                count_transmissions(encode_adaptive(bits, cfg.pulse, enc)) * cfg.cost_per_event_j
            )
        for scheme, values in per_scheme.items():
            mean = float(np.mean(values))
            std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
            lo, hi = normal_interval(mean, std, len(values))
            rows.append(SweepPoint(float(n), scheme, mean, std, lo, hi, len(values)))
    p = cfg.p_one
    for n in cfg.n_grid:
        rows.append(_model_row(float(n), "model-conventional", n * p * cfg.cost_per_event_j))
        rows.append(
            _model_row(float(n), "model-adaptive", n * (p - p * p / 2.0) * cfg.cost_per_event_j)
        )
    meta = cfg.describe()
    meta["cost_per_event_j"] = cfg.cost_per_event_j
    return ExperimentReport("energy-vs-n", "n_bits", tuple(rows), meta)


def _model_row(x: float, scheme: str, value: float) -> SweepPoint:
    return SweepPoint(x, scheme, value, 0.0, value, value, 0)


def run_tx_events(cfg: ExperimentConfig) -> ExperimentReport:
    """Transmission events per bit against the 1-probability p.

    The adaptive pair encoder fires p - p^2/2 events per bit on average; the
    conventional encoder fires p.
    """
    rows = []
    trial_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trials)
    enc = cfg.encoder(conserve_energy=False)
    for p in cfg.p_grid:
        per_scheme = {"conventional": [], "adaptive": []}
        for seed in trial_seeds:
            bits = (np.random.default_rng(seed.spawn(2)[0]).random(cfg.n_bits) < p).astype(int)
            per_scheme["conventional"].append(
                count_transmissions(encode_conventional(bits, cfg.pulse)) / cfg.n_bits
            )
            per_scheme["adaptive"].append(
                count_transmissions(encode_adaptive(bits, cfg.pulse, enc)) / cfg.n_bits
            )
        for scheme, values in per_scheme.items():
            mean = float(np.mean(values))
            std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
            lo, hi = normal_interval(mean, std, len(values))
            rows.append(SweepPoint(p, scheme, mean, std, lo, hi, len(values)))
    for p in cfg.p_grid:
        rows.append(_model_row(p, "model-conventional", p))
        rows.append(_model_row(p, "model-adaptive", p - p * p / 2.0))
    meta = cfg.describe()
    return ExperimentReport("tx-events", "p_one", tuple(rows), meta)


def model_ber_mc(
    model: EnergyModel, gamma: float, n: int, rng: np.random.Generator
) -> tuple[int, int]:
    """Draw slot energies from the two-Gaussian model with equal priors and
    count threshold errors. Returns (errors, n)."""
    bits = rng.random(n) < 0.5
    e = np.where(
        bits,
        rng.normal(model.mu1, model.sigma1, n),
        rng.normal(model.mu0, model.sigma0, n),
    )
    errors = int(np.count_nonzero((e > gamma) != bits))
    return errors, n


@dataclass(frozen=True)
class ByteRoundtrip:
    """Noiseless encode/decode result over all 256 byte patterns."""

    min_one: float
    max_zero: float
    threshold: float
    n_pattern_failures: int
    n_bit_errors: int

    @property
    def separable(self) -> bool:
        return self.min_one > self.max_zero


def run_byte_roundtrip(
    pulse: PulseConfig | None = None,
    beta_br: float = 3.0,
    mode: str = "disjoint-pairs",
    guard_slots: int | None = None,
) -> ByteRoundtrip:
    """Encode every 8-bit pattern, synthesize it noiselessly, and decode it
    back with one shared threshold from the global class extremes."""
    if pulse is None:
        pulse = PulseConfig.for_oversampling(t_p=2.5e-9, t_f=2.5e-9, beta_max=beta_br)
    if guard_slots is None:
        sigma = gaussian_sigma(beta_br, pulse.t_p)
        guard_slots = math.ceil(GAUSS_WINDOW_SIGMAS * sigma / pulse.t_s) + 1
    enc = EncoderConfig(beta_br=beta_br, mode=mode)

    decoded = []
    ones, zeros = [], []
    for pattern in range(256):
        bits = np.array([(pattern >> (7 - j)) & 1 for j in range(8)])
        plan = encode_adaptive(bits, pulse, enc)
        w = synthesize_gauss_approx(
            plan, pulse, beta_br, n_slots=8 + 2 * guard_slots, t0=-guard_slots * pulse.t_s
        )
        e = slot_energies(w, pulse.t_s)[guard_slots : guard_slots + 8]
        decoded.append((bits, e))
        ones.extend(e[bits == 1])
        zeros.extend(e[bits == 0])
    min_one = float(min(ones))
    max_zero = float(max(zeros))
    gamma = 0.5 * (min_one + max_zero)

    failures = 0
    bit_errors = 0
    for bits, e in decoded:
        wrong = int(np.count_nonzero(decide_bits(e, gamma) != bits))
        bit_errors += wrong
        failures += wrong > 0
    return ByteRoundtrip(
        min_one=min_one,
        max_zero=max_zero,
        threshold=gamma,
        n_pattern_failures=failures,
        n_bit_errors=bit_errors,
    )


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool
    note: str = ""

    def __post_init__(self) -> None:
        # keep the record JSON-clean even when checks hand over numpy scalars
        object.__setattr__(self, "measured", float(self.measured))
        object.__setattr__(self, "expected", float(self.expected))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "passed", bool(self.passed))


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = (
                f"[{status}] {c.name}: measured={c.measured:.6e} "
                f"expected={c.expected:.6e} tol={c.tolerance:.1e}"
            )
            if c.note:
                line += f" ({c.note})"
            lines.append(line)
        return lines

    def dump_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("name,measured,expected,tolerance,passed,note\n")
            for c in self.checks:
                fh.write(
                    f"{c.name},{c.measured:.12e},{c.expected:.12e},"
                    f"{c.tolerance:.3e},{int(c.passed)},{c.note}\n"
                )

    def to_json(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [
                {
                    "name": c.name,
                    "measured": c.measured,
                    "expected": c.expected,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                    "note": c.note,
                }
                for c in self.checks
            ],
        }

    def dump_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _check_closed_forms_vs_quadrature(rng: np.random.Generator) -> ValidationCheck:
    from thzook.analytics import (
        extended_energy,
        isi_power_conventional,
        isi_power_shrunk,
    )

    worst = 0.0
    for _ in range(25):
        t_s = rng.uniform(0.5, 2.0)
        t_p = rng.uniform(0.8, 1.0) * t_s
        beta = rng.uniform(2.0, 6.0)
        p_a = rng.uniform(0.5, 2.0)

        sig = beta * t_p / TWO_SQRT_2LN2
        pairs = [
            (
                isi_power_conventional(t_s, t_p, sig, p_a, 1),
                gaussian_power_integral(t_s - t_p / 2, 2 * t_s - t_p / 2, 0.0, sig, p_a),
            ),
            (
                isi_power_shrunk(t_s, t_p, beta, p_a),
                gaussian_power_integral(
                    t_s - t_p / (2 * beta),
                    2 * t_s - t_p / (2 * beta),
                    0.0,
                    t_p / TWO_SQRT_2LN2,
                    p_a,
                ),
            ),
        ]
        sig_e = rng.uniform(0.3, 2.0) * t_s
        pairs.append(
            (
                extended_energy(1, t_s, sig_e, p_a, t_s / 2.0),
                gaussian_power_integral(t_s, 2 * t_s, t_s / 2.0, sig_e, p_a),
            )
        )
        k = int(rng.integers(1, 4))
        sig_m = rng.uniform((2 * k + 1) / 7.0, (2 * k + 1) / 2.0) * t_s
        pairs.append(
            (
                gaussian_slot_energy(
                    GaussianSlotQuery(
                        (2 * k - 1) * t_s / 2, (2 * k + 1) * t_s / 2, 0.0, sig_m, p_a
                    )
                ),
                gaussian_power_integral(
                    (2 * k - 1) * t_s / 2, (2 * k + 1) * t_s / 2, 0.0, sig_m, p_a
                ),
            )
        )
        for got, want in pairs:
            worst = max(worst, abs(got - want) / abs(want))
    return ValidationCheck(
        name="closed-form-vs-quadrature",
        measured=worst,
        expected=0.0,
        tolerance=1e-9,
        passed=worst <= 1e-9,
        note="max relative gap over a 100-integral randomized grid",
    )


def _check_shrunk_arguments() -> ValidationCheck:
    from thzook.analytics import isi_power_shrunk

    sig = 1.0 / TWO_SQRT_2LN2
    worst = 0.0
    for beta in (2.0, 3.0, 4.0):
        lo = TWO_SQRT_2LN2 * (1.0 - 1.0 / (2.0 * beta))
        hi = TWO_SQRT_2LN2 * (2.0 - 1.0 / (2.0 * beta))
        closed = (math.erf(hi) - math.erf(lo)) / (2.0 * math.sqrt(math.pi) * sig)
        got = isi_power_shrunk(1.0, 1.0, beta, 1.0)
        worst = max(worst, abs(got - closed) / closed)
    return ValidationCheck(
        name="shrunk-window-erf-arguments",
        measured=worst,
        expected=0.0,
        tolerance=1e-12,
        passed=worst <= 1e-12,
        note="reduced arguments at T_p = T_s, beta in {2, 3, 4}",
    )


def _check_pair_symmetry() -> tuple[ValidationCheck, ValidationCheck]:
    worst = 0.0
    for ratio in (0.2, 0.5, 1.0, 2.0):
        left = gaussian_slot_energy(GaussianSlotQuery(-1.0, 0.0, 0.0, ratio, 1.0))
        right = gaussian_slot_energy(GaussianSlotQuery(0.0, 1.0, 0.0, ratio, 1.0))
        worst = max(worst, abs(left - right) / right)
    boundary = ValidationCheck(
        name="pair-collapse-slot-symmetry",
        measured=worst,
        expected=0.0,
        tolerance=1e-12,
        passed=worst <= 1e-12,
        note="pulse on the shared slot edge, sigma/T_s in {0.2, 0.5, 1, 2}",
    )
    # start-of-run centering leaves the pulse inside the first slot; report
    # the resulting imbalance without judging it
    sigma = 3.0 / TWO_SQRT_2LN2
    own = gaussian_slot_energy(GaussianSlotQuery(-0.5, 0.5, 0.0, sigma, 1.0))
    neighbor = gaussian_slot_energy(GaussianSlotQuery(0.5, 1.5, 0.0, sigma, 1.0))
    asym = (own - neighbor) / own
    informational = ValidationCheck(
        name="pair-collapse-start-centered-asymmetry",
        measured=asym,
        expected=0.0,
        tolerance=math.inf,
        passed=True,
        note="informational: first-slot centering favors the first slot",
    )
    return boundary, informational


def _check_partition_of_unity() -> ValidationCheck:
    from thzook.analytics import extended_energy

    sigma, t_s, p_a = 0.9, 0.5, 2.0
    big_k = int(10 * sigma / t_s) + 2
    total = sum(extended_energy(k, t_s, sigma, p_a, 0.2) for k in range(-big_k, big_k + 1))
    want = p_a / (math.sqrt(math.pi) * sigma)
    err = abs(total - want) / want
    return ValidationCheck(
        name="slot-partition-total-mass",
        measured=err,
        expected=0.0,
        tolerance=1e-9,
        passed=err <= 1e-9,
        note="slot energies sum to the kernel mass",
    )


def _check_threshold_density_equality() -> ValidationCheck:
    model = EnergyModel(mu1=3.0, sigma1=0.5, mu0=1.0, sigma0=0.25)
    gamma = threshold_optimal(model)
    p1 = norm.pdf(gamma, model.mu1, model.sigma1)
    p0 = norm.pdf(gamma, model.mu0, model.sigma0)
    err = abs(p1 - p0) / p0
    return ValidationCheck(
        name="optimal-threshold-density-equality",
        measured=err,
        expected=0.0,
        tolerance=1e-9,
        passed=err <= 1e-9,
        note="both class densities match at the crossing",
    )


def _check_capture_peak() -> ValidationCheck:
    # stationary point of the extended-slot capture: 3 exp(-9/(4 s^2)) equals
    # exp(-1/(4 s^2)), solved numerically and against sqrt(2 / ln 3)
    peak = brentq(
        lambda s: 3.0 * math.exp(-9.0 / (4.0 * s * s)) - math.exp(-1.0 / (4.0 * s * s)),
        0.5,
        3.0,
    )
    want = math.sqrt(2.0 / math.log(3.0))
    err = abs(peak - want) / want
    return ValidationCheck(
        name="extended-capture-peak-location",
        measured=err,
        expected=0.0,
        tolerance=1e-6,
        passed=err <= 1e-6,
        note=f"capture rises until sigma = {want:.4f} T_s, then falls",
    )


def run_validation_suite() -> ValidationReport:
    """Adjudicate the closed forms against independent numerical routes."""
    rng = np.random.default_rng(97)
    boundary, informational = _check_pair_symmetry()
    checks = (
        _check_closed_forms_vs_quadrature(rng),
        _check_shrunk_arguments(),
        boundary,
        informational,
        _check_partition_of_unity(),
        _check_threshold_density_equality(),
        _check_capture_peak(),
    )
    return ValidationReport(checks=checks)
