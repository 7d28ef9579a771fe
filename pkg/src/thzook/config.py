"""INI experiment configs with explicit unit suffixes.

An empty file yields the full default link: 1.12 THz carrier, 45 GHz band,
10 dBm transmit power, 20 dBi antennas, 1e-21 W/Hz noise floor, 2.5 ns
repetition interval, 0.5 ns pulse, 10 m range. Every key is optional;
unknown sections or keys are rejected so a typo cannot silently fall back
to a default. All diagnostics for one file are collected and reported
together.

Sections and keys:

[channel]   fc, bandwidth, distance, eta_br, gain_tx, gain_rx, noise_psd,
            delay, absorption_k, absorption_table, absorption_points
[pulse]     tp, tf, nf, power, sample_rate, oversampling, beta_max
[encoder]   mode, n_max, early_center
[run]       seed, n_bits, n_trials, p_one, gamma_rule, guard_slots,
            propagation, cost_per_event, schemes
[sweep]     snr_db, power_dbm, snr_ref_db, beta_grid, n_grid, p_grid

Quantities take an explicit unit suffix (``tp = 0.5ns``, ``power = 10dBm``,
``noise_psd = -90dBm/GHz``) and are converted to SI on parse. A bare number
means the SI base unit of the key. ``serialize`` emits SI suffixes with
full-precision floats, so parse(serialize(config)) reproduces the config
exactly; ``config_hash`` digests that canonical text.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import re
from pathlib import Path

import numpy as np

from thzook.channel import AbsorptionTable, ChannelParams
from thzook.montecarlo import ExperimentConfig
from thzook.waveform import PulseConfig

__all__ = [
    "ConfigError",
    "parse_quantity",
    "parse_config",
    "parse_config_text",
    "serialize",
    "config_hash",
]


class ConfigError(ValueError):
    """Invalid experiment config; ``diagnostics`` lists every problem found."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("invalid config:\n" + "\n".join(f"  - {d}" for d in diagnostics))


_FACTORS = {
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "freq": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12},
    "distance": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3},
    "power": {"w": 1.0, "mw": 1e-3, "uw": 1e-6},
    "energy": {"j": 1.0, "mj": 1e-3, "uj": 1e-6, "nj": 1e-9, "pj": 1e-12, "fj": 1e-15},
    "psd": {"w/hz": 1.0},
    "gain": {"db": 1.0, "dbi": 1.0},
    "plain": {},
}

_QUANTITY_RE = re.compile(r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([a-zA-Z/]*)")


def parse_quantity(text: str, kind: str) -> float:
    """Convert ``0.5ns``-style text of the given kind to an SI float.

    Decibel forms are handled per kind: dBm becomes watts, dBm/GHz becomes
    W/Hz, dB and dBi stay on the decibel scale.
    """
    m = _QUANTITY_RE.fullmatch(text.strip())
    if m is None:
        raise ValueError(f"cannot parse quantity {text!r}")
    value = float(m.group(1))
    suffix = m.group(2).lower()
    if suffix == "":
        return value
    if kind == "power" and suffix == "dbm":
        return 10.0 ** ((value - 30.0) / 10.0)
    if kind == "psd" and suffix == "dbm/ghz":
        return 10.0 ** (value / 10.0) * 1e-3 * 1e-9
    if kind == "psd" and suffix == "dbm/hz":
        return 10.0 ** (value / 10.0) * 1e-3
    factors = _FACTORS[kind]
    if suffix not in factors:
        allowed = sorted(factors)
        raise ValueError(f"unit {m.group(2)!r} not valid here; use one of {allowed}")
    return value * factors[suffix]


# key -> kind of value; "int", "bool", "str" and the list kinds are parsed
# without unit handling
_SCHEMA = {
    "channel": {
        "fc": "freq",
        "bandwidth": "freq",
        "distance": "distance",
        "eta_br": "plain",
        "gain_tx": "gain",
        "gain_rx": "gain",
        "noise_psd": "psd",
        "delay": "time",
        "absorption_k": "plain",
        "absorption_table": "str",
        "absorption_points": "points",
    },
    "pulse": {
        "tp": "time",
        "tf": "time",
        "nf": "int",
        "power": "power",
        "sample_rate": "freq",
        "oversampling": "int",
        "beta_max": "plain",
    },
    "encoder": {
        "mode": "str",
        "n_max": "int",
        "early_center": "bool",
    },
    "run": {
        "seed": "int",
        "n_bits": "int",
        "n_trials": "int",
        "p_one": "plain",
        "gamma_rule": "str",
        "guard_slots": "int",
        "propagation": "str",
        "cost_per_event": "energy",
        "schemes": "strlist",
    },
    "sweep": {
        "snr_db": "floatlist",
        "power_dbm": "floatlist",
        "snr_ref_db": "plain",
        "beta_grid": "floatlist",
        "n_grid": "intlist",
        "p_grid": "floatlist",
    },
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class _Reader:
    """Schema-checked access to one parsed INI file, collecting diagnostics."""

    def __init__(self, cp: configparser.ConfigParser, diagnostics: list[str]):
        self.cp = cp
        self.diagnostics = diagnostics
        for section in cp.sections():
            if section not in _SCHEMA:
                diagnostics.append(f"unknown section [{section}]")
                continue
            for key in cp[section]:
                if key not in _SCHEMA[section]:
                    diagnostics.append(f"unknown key {key!r} in [{section}]")

    def has(self, section: str, key: str) -> bool:
        return self.cp.has_option(section, key)

    def get(self, section: str, key: str, default):
        if not self.cp.has_option(section, key):
            return default
        raw = self.cp.get(section, key).strip()
        kind = _SCHEMA[section][key]
        try:
            if kind == "int":
                return int(raw)
            if kind == "bool":
                low = raw.lower()
                if low in _TRUE:
                    return True
                if low in _FALSE:
                    return False
                raise ValueError(f"cannot parse boolean {raw!r}")
            if kind == "str":
                return raw
            if kind == "strlist":
                return tuple(part.strip() for part in raw.split(",") if part.strip())
            if kind == "floatlist":
                return tuple(float(part) for part in raw.split(","))
            if kind == "intlist":
                return tuple(int(part) for part in raw.split(","))
            if kind == "points":
                points = []
                for part in raw.split(","):
                    f_text, sep, k_text = part.partition(":")
                    if not sep:
                        raise ValueError(f"expected freq:coefficient, got {part!r}")
                    points.append(
                        (parse_quantity(f_text, "freq"), float(k_text))
                    )
                return tuple(points)
            return parse_quantity(raw, kind)
        except ValueError as exc:
            self.diagnostics.append(f"[{section}] {key}: {exc}")
            return default


def _load_absorption_csv(path: str) -> AbsorptionTable:
    """Two-column CSV (frequency in Hz, coefficient in 1/m), header optional."""
    target = Path(path)
    if not target.exists():
        raise ValueError(f"absorption table {path!r} does not exist")
    try:
        data = np.loadtxt(target, delimiter=",", ndmin=2)
    except ValueError:
        data = np.loadtxt(target, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"absorption table {path!r} must have two columns")
    return AbsorptionTable(freq_hz=tuple(data[:, 0]), k_per_m=tuple(data[:, 1]))


def _build_absorption(reader: _Reader, diagnostics: list[str]) -> AbsorptionTable:
    sources = [
        key
        for key in ("absorption_k", "absorption_table", "absorption_points")
        if reader.has("channel", key)
    ]
    if len(sources) > 1:
        diagnostics.append(f"[channel] pick one absorption source, got {sources}")
    fallback = AbsorptionTable.constant(0.0)
    try:
        if reader.has("channel", "absorption_points"):
            points = reader.get("channel", "absorption_points", ())
            if points:
                return AbsorptionTable(
                    freq_hz=tuple(f for f, _ in points),
                    k_per_m=tuple(k for _, k in points),
                )
            return fallback
        if reader.has("channel", "absorption_table"):
            return _load_absorption_csv(reader.get("channel", "absorption_table", ""))
        return AbsorptionTable.constant(reader.get("channel", "absorption_k", 0.0))
    except ValueError as exc:
        diagnostics.append(f"[channel] absorption: {exc}")
        return fallback


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse INI text into a validated ExperimentConfig.

    Raises ConfigError listing every unknown key, malformed value, and
    violated invariant found, rather than stopping at the first.
    """
    cp = configparser.ConfigParser(interpolation=None)
    diagnostics: list[str] = []
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"not well-formed INI: {exc}"]) from exc
    reader = _Reader(cp, diagnostics)

    channel = ChannelParams()
    try:
        channel = ChannelParams(
            f_c=reader.get("channel", "fc", 1.12e12),
            bandwidth=reader.get("channel", "bandwidth", 45e9),
            d=reader.get("channel", "distance", 10.0),
            eta_br=reader.get("channel", "eta_br", 0.2),
            g_tx_dbi=reader.get("channel", "gain_tx", 20.0),
            g_rx_dbi=reader.get("channel", "gain_rx", 20.0),
            n0=reader.get("channel", "noise_psd", 1e-21),
            tau_s=reader.get("channel", "delay", None),
        )
    except ValueError as exc:
        diagnostics.append(f"[channel] {exc}")
    absorption = _build_absorption(reader, diagnostics)

    pulse = PulseConfig()
    try:
        t_p = reader.get("pulse", "tp", 0.5e-9)
        t_f = reader.get("pulse", "tf", 2.5e-9)
        n_f = reader.get("pulse", "nf", 1)
        p_a = reader.get("pulse", "power", 0.01)
        if reader.has("pulse", "sample_rate"):
            if reader.has("pulse", "oversampling") or reader.has("pulse", "beta_max"):
                diagnostics.append(
                    "[pulse] sample_rate fixes the grid; drop oversampling/beta_max"
                )
            pulse = PulseConfig(
                t_p=t_p, t_f=t_f, n_f=n_f, p_a=p_a,
                f_s=reader.get("pulse", "sample_rate", 0.0),
            )
        else:
            pulse = PulseConfig.for_oversampling(
                t_p=t_p,
                t_f=t_f,
                n_f=n_f,
                p_a=p_a,
                beta_max=reader.get("pulse", "beta_max", max(1.0, channel.beta_br)),
                oversampling=reader.get("pulse", "oversampling", 16),
            )
    except ValueError as exc:
        diagnostics.append(f"[pulse] {exc}")

    kwargs = dict(
        channel=channel,
        absorption=absorption,
        pulse=pulse,
        encoder_mode=reader.get("encoder", "mode", "disjoint-pairs"),
        n_max=reader.get("encoder", "n_max", 2),
        early_center=reader.get("encoder", "early_center", False),
        propagation_mode=reader.get("run", "propagation", "gauss-approx"),
        snr_db=reader.get("sweep", "snr_db", ExperimentConfig.snr_db),
        power_dbm=reader.get("sweep", "power_dbm", ExperimentConfig.power_dbm),
        snr_ref_db=reader.get("sweep", "snr_ref_db", 8.0),
        beta_grid=reader.get("sweep", "beta_grid", ExperimentConfig.beta_grid),
        n_grid=reader.get("sweep", "n_grid", ExperimentConfig.n_grid),
        p_grid=reader.get("sweep", "p_grid", ExperimentConfig.p_grid),
        p_one=reader.get("run", "p_one", 0.5),
        n_bits=reader.get("run", "n_bits", 4096),
        n_trials=reader.get("run", "n_trials", 25),
        seed=reader.get("run", "seed", 20260823),
        gamma_rule=reader.get("run", "gamma_rule", "separating"),
        guard_slots=reader.get("run", "guard_slots", 12),
        cost_per_event_j=reader.get("run", "cost_per_event", 1e-12),
    )
    if reader.has("run", "schemes"):
        schemes = reader.get("run", "schemes", ())
        if not schemes:
            diagnostics.append("[run] schemes must name at least one scheme")
        else:
            kwargs["schemes"] = schemes

    for label, grid in (
        ("beta_grid", kwargs["beta_grid"]),
        ("n_grid", kwargs["n_grid"]),
        ("snr_db", kwargs["snr_db"]),
        ("power_dbm", kwargs["power_dbm"]),
        ("p_grid", kwargs["p_grid"]),
    ):
        if len(grid) == 0:
            diagnostics.append(f"[sweep] {label} must not be empty")
    if any(not 0.0 < p < 1.0 for p in kwargs["p_grid"]):
        diagnostics.append("[sweep] p_grid entries must lie strictly between 0 and 1")
    if any(b < 1.0 for b in kwargs["beta_grid"]):
        diagnostics.append("[sweep] beta_grid entries must be >= 1")
    if any(n < 2 for n in kwargs["n_grid"]):
        diagnostics.append("[sweep] n_grid entries must be >= 2")

    config = None
    try:
        config = ExperimentConfig(**kwargs)
    except ValueError as exc:
        diagnostics.append(f"[run] {exc}")
    if diagnostics:
        raise ConfigError(diagnostics)
    return config


def parse_config(path) -> ExperimentConfig:
    """Parse the INI file at ``path``; see parse_config_text."""
    target = Path(path)
    if not target.exists():
        raise ConfigError([f"config file {str(path)!r} does not exist"])
    return parse_config_text(target.read_text())


def serialize(config: ExperimentConfig) -> str:
    """Render a config as canonical INI text with SI unit suffixes.

    Floats are written at full precision, so parsing the result reproduces
    the config bit for bit. The absorption table is inlined as
    frequency:coefficient points.
    """
    ch = config.channel
    pu = config.pulse
    points = ", ".join(
        f"{f!r}:{k!r}" for f, k in zip(config.absorption.freq_hz, config.absorption.k_per_m)
    )
    out = io.StringIO()
    out.write("[channel]\n")
    out.write(f"fc = {ch.f_c!r}Hz\n")
    out.write(f"bandwidth = {ch.bandwidth!r}Hz\n")
    out.write(f"distance = {ch.d!r}m\n")
    out.write(f"eta_br = {ch.eta_br!r}\n")
    out.write(f"gain_tx = {ch.g_tx_dbi!r}dBi\n")
    out.write(f"gain_rx = {ch.g_rx_dbi!r}dBi\n")
    out.write(f"noise_psd = {ch.n0!r}W/Hz\n")
    out.write(f"delay = {ch.tau_s!r}s\n")
    out.write(f"absorption_points = {points}\n")
    out.write("\n[pulse]\n")
    out.write(f"tp = {pu.t_p!r}s\n")
    out.write(f"tf = {pu.t_f!r}s\n")
    out.write(f"nf = {pu.n_f}\n")
    out.write(f"power = {pu.p_a!r}W\n")
    out.write(f"sample_rate = {pu.f_s!r}Hz\n")
    out.write("\n[encoder]\n")
    out.write(f"mode = {config.encoder_mode}\n")
    out.write(f"n_max = {config.n_max}\n")
    out.write(f"early_center = {str(config.early_center).lower()}\n")
    out.write("\n[run]\n")
    out.write(f"seed = {config.seed}\n")
    out.write(f"n_bits = {config.n_bits}\n")
    out.write(f"n_trials = {config.n_trials}\n")
    out.write(f"p_one = {config.p_one!r}\n")
    out.write(f"gamma_rule = {config.gamma_rule}\n")
    out.write(f"guard_slots = {config.guard_slots}\n")
    out.write(f"propagation = {config.propagation_mode}\n")
    out.write(f"cost_per_event = {config.cost_per_event_j!r}J\n")
    out.write(f"schemes = {', '.join(config.schemes)}\n")
    out.write("\n[sweep]\n")
    out.write(f"snr_db = {', '.join(repr(x) for x in config.snr_db)}\n")
    out.write(f"power_dbm = {', '.join(repr(x) for x in config.power_dbm)}\n")
    out.write(f"snr_ref_db = {config.snr_ref_db!r}\n")
    out.write(f"beta_grid = {', '.join(repr(x) for x in config.beta_grid)}\n")
    out.write(f"n_grid = {', '.join(str(x) for x in config.n_grid)}\n")
    out.write(f"p_grid = {', '.join(repr(x) for x in config.p_grid)}\n")
    return out.getvalue()


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical serialization; tags every report."""
    return hashlib.sha256(serialize(config).encode()).hexdigest()
