"""OOK encoders: conventional per-bit pulses and the pattern-aware scheme.

The adaptive encoder works on disjoint bit pairs by default: a `11` pair
collapses into one full-width pulse, a single 1 inside a pair shrinks to
width T_p/beta_br so its broadened copy still fits one slot, and `00` sends
nothing. Run-length mode generalizes the collapse to maximal 1-runs up to
n_max. Energy accounting is exact: per-pulse energy is amplitude^2 * width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from thzook.waveform import PulseConfig

__all__ = [
    "PulsePlan",
    "EncoderConfig",
    "encode_conventional",
    "encode_adaptive",
    "count_transmissions",
    "plan_energy",
]


@dataclass(frozen=True)
class PulsePlan:
    """Ordered transmit schedule: (center, width, amplitude) triples.

    ``n_events`` counts pattern-level transmissions (one per collapsed run or
    isolated bit), which is what the complexity model tracks; with N_f > 1
    each event is rendered as N_f replicated pulses.
    """

    pulses: tuple[tuple[float, float, float], ...]
    n_bits: int
    scheme: str
    pairing: str = "none"
    n_events: int = 0

    def __post_init__(self) -> None:
        if any(w <= 0.0 for _, w, _ in self.pulses):
            raise ValueError("pulse widths must be positive")

    def dump_csv(self, path) -> None:
        arr = np.array(self.pulses, dtype=float).reshape(-1, 3)
        np.savetxt(
            path, arr, delimiter=",", header="center_s,width_s,amplitude", comments=""
        )


@dataclass(frozen=True)
class EncoderConfig:
    """Adaptive-encoder knobs.

    early_center places collapsed pulses at run_start + (n-1) T_s / 2 instead
    of the geometric midpoint run_start + n T_s / 2; it exists to measure the
    slot-energy asymmetry that the midpoint convention avoids.
    """

    beta_br: float = 1.0
    conserve_energy: bool = False
    mode: str = "disjoint-pairs"
    n_max: int = 2
    early_center: bool = False

    def __post_init__(self) -> None:
        if self.beta_br < 1.0:
            raise ValueError("broadening factor must be >= 1")
        if self.mode not in ("disjoint-pairs", "run-length"):
            raise ValueError(f"unknown encoder mode {self.mode!r}")
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2")


def _replicate(center: float, width: float, amplitude: float, cfg: PulseConfig):
    """Render one event as N_f pulses spaced T_f apart, symmetric about center."""
    n_f = cfg.n_f
    if n_f == 1:
        return [(center, width, amplitude)]
    offset0 = -(n_f - 1) / 2.0 * cfg.t_f
    return [(center + offset0 + m * cfg.t_f, width, amplitude) for m in range(n_f)]


def encode_conventional(bits, cfg: PulseConfig) -> PulsePlan:
    """One full-width pulse per 1-bit, centered in its slot."""
    if cfg.t_p > cfg.t_s:
        raise ValueError("pulse width cannot exceed the slot duration")
    bits = np.asarray(bits).astype(int)
    amp = math.sqrt(cfg.p_a)
    pulses = []
    n_events = 0
    for i in np.flatnonzero(bits):
        center = i * cfg.t_s + cfg.t_s / 2.0
        pulses.extend(_replicate(center, cfg.t_p, amp, cfg))
        n_events += 1
    return PulsePlan(
        pulses=tuple(pulses),
        n_bits=len(bits),
        scheme="conventional",
        n_events=n_events,
    )


def _shrunk_amplitude(cfg: PulseConfig, enc: EncoderConfig) -> float:
    if enc.conserve_energy:
        return math.sqrt(cfg.p_a * enc.beta_br)
    return math.sqrt(cfg.p_a)


def _encode_pairs(bits: np.ndarray, cfg: PulseConfig, enc: EncoderConfig):
    t_s = cfg.t_s
    amp = math.sqrt(cfg.p_a)
    amp_shrunk = _shrunk_amplitude(cfg, enc)
    w_shrunk = cfg.t_p / enc.beta_br
    events = []
    n = len(bits)
    for i in range(0, n - 1, 2):
        b1, b2 = bits[i], bits[i + 1]
        if b1 and b2:
            if enc.early_center:
                center = i * t_s + t_s / 2.0
            else:
                center = (i + 1) * t_s
            events.append((center, cfg.t_p, amp))
        elif b1:
            events.append((i * t_s + t_s / 2.0, w_shrunk, amp_shrunk))
        elif b2:
            events.append(((i + 1) * t_s + t_s / 2.0, w_shrunk, amp_shrunk))
    if n % 2 == 1 and bits[n - 1]:
        events.append(((n - 1) * t_s + t_s / 2.0, w_shrunk, amp_shrunk))
    return events


def _encode_runs(bits: np.ndarray, cfg: PulseConfig, enc: EncoderConfig):
    t_s = cfg.t_s
    amp = math.sqrt(cfg.p_a)
    amp_shrunk = _shrunk_amplitude(cfg, enc)
    w_shrunk = cfg.t_p / enc.beta_br
    events = []
    i = 0
    n = len(bits)
    while i < n:
        if not bits[i]:
            i += 1
            continue
        run = i
        while run < n and bits[run]:
            run += 1
        length = run - i
        start = i
        # greedy split of long runs into n_max-sized collapses
        while length > 0:
            m = min(length, enc.n_max)
            if m == 1:
                events.append((start * t_s + t_s / 2.0, w_shrunk, amp_shrunk))
            else:
                if enc.early_center:
                    center = start * t_s + (m - 1) * t_s / 2.0
                else:
                    center = start * t_s + m * t_s / 2.0
                events.append((center, cfg.t_p, amp))
            start += m
            length -= m
        i = run
    return events


def encode_adaptive(bits, cfg: PulseConfig, enc: EncoderConfig) -> PulsePlan:
    """Pattern-aware encoder: collapse 1-runs, shrink isolated 1s."""
    if cfg.t_p > cfg.t_s:
        raise ValueError("pulse width cannot exceed the slot duration")
    bits = np.asarray(bits).astype(int)
    if enc.mode == "disjoint-pairs":
        events = _encode_pairs(bits, cfg, enc)
    else:
        events = _encode_runs(bits, cfg, enc)
    pulses = []
    for center, width, amplitude in events:
        pulses.extend(_replicate(center, width, amplitude, cfg))
    return PulsePlan(
        pulses=tuple(pulses),
        n_bits=len(bits),
        scheme="adaptive",
        pairing=enc.mode,
        n_events=len(events),
    )


def count_transmissions(plan: PulsePlan) -> int:
    """Number of pattern-level transmission events in a plan."""
    return plan.n_events


def plan_energy(plan: PulsePlan) -> float:
    """Total transmitted energy: sum of amplitude^2 * width over pulses."""
    return float(sum(a * a * w for _, w, a in plan.pulses))
