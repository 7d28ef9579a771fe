"""Encoders: pulse placement, event counts, and energy accounting."""

import math

import numpy as np
import pytest

from thzook.txscheme import (
    EncoderConfig,
    PulsePlan,
    count_transmissions,
    encode_adaptive,
    encode_conventional,
    plan_energy,
)
from thzook.waveform import PulseConfig


def unit_cfg(t_p=1.0, t_f=1.0, n_f=1, p_a=1.0, per_slot=64):
    t_slot = n_f * t_f
    return PulseConfig(t_p=t_p, t_f=t_f, n_f=n_f, p_a=p_a, f_s=per_slot / t_slot)


class TestConventional:
    def test_all_zero_stream_is_silent(self):
        plan = encode_conventional([0, 0, 0], unit_cfg())
        assert plan.pulses == ()
        assert count_transmissions(plan) == 0

    def test_two_ones_two_pulses(self):
        cfg = unit_cfg(t_p=0.5)
        plan = encode_conventional([1, 1], cfg)
        assert len(plan.pulses) == 2
        np.testing.assert_allclose(plan_energy(plan), 2.0 * 1.0 * 0.5)

    def test_slot_centering(self):
        cfg = unit_cfg(t_p=0.25)
        plan = encode_conventional([1, 0, 1], cfg)
        centers = [c for c, _, _ in plan.pulses]
        np.testing.assert_allclose(centers, [0.5, 2.5])

    def test_pulse_count_tracks_binomial_mean(self):
        """Pulse count over random bits stays inside a 3-sigma binomial band."""
        rng = np.random.default_rng(5150)
        n = 10_000
        bits = rng.integers(0, 2, n)
        plan = encode_conventional(bits, unit_cfg())
        k = count_transmissions(plan)
        sigma = math.sqrt(n * 0.25)
        assert abs(k - 0.5 * n) <= 3.0 * sigma

    def test_frame_repetitions(self):
        cfg = unit_cfg(t_p=0.25, t_f=1.0, n_f=3)
        plan = encode_conventional([1], cfg)
        assert len(plan.pulses) == 3
        assert count_transmissions(plan) == 1
        centers = sorted(c for c, _, _ in plan.pulses)
        # symmetric about the slot center 1.5, spaced t_f apart
        np.testing.assert_allclose(centers, [0.5, 1.5, 2.5])
        np.testing.assert_allclose(plan_energy(plan), 3 * 0.25)

    def test_wide_pulse_rejected(self):
        with pytest.raises(ValueError):
            PulseConfig(t_p=3e-9, t_f=2e-9, n_f=1, p_a=1.0, f_s=32 / 2e-9)


class TestAdaptivePairs:
    def test_pair_collapse_single_pulse(self):
        plan = encode_adaptive([1, 1], unit_cfg(), EncoderConfig(beta_br=2.0))
        assert len(plan.pulses) == 1
        center, width, amp = plan.pulses[0]
        assert center == pytest.approx(1.0)  # geometric midpoint of the two slots
        assert width == pytest.approx(1.0)
        np.testing.assert_allclose(plan_energy(plan), 1.0)

    def test_collapse_saves_half_energy(self):
        cfg = unit_cfg(t_p=0.5)
        conv = encode_conventional([1, 1], cfg)
        prop = encode_adaptive([1, 1], cfg, EncoderConfig(beta_br=3.0))
        assert plan_energy(prop) == pytest.approx(0.5 * plan_energy(conv))

    def test_isolated_one_shrinks(self):
        plan = encode_adaptive([1, 0], unit_cfg(), EncoderConfig(beta_br=2.0))
        assert len(plan.pulses) == 1
        center, width, _ = plan.pulses[0]
        assert center == pytest.approx(0.5)
        assert width == pytest.approx(0.5)
        np.testing.assert_allclose(plan_energy(plan), 0.5)

    def test_second_slot_isolated_one(self):
        plan = encode_adaptive([0, 1], unit_cfg(), EncoderConfig(beta_br=4.0))
        center, width, _ = plan.pulses[0]
        assert center == pytest.approx(1.5)
        assert width == pytest.approx(0.25)

    def test_beta_one_degenerates_to_full_width(self):
        plan = encode_adaptive([1, 0], unit_cfg(), EncoderConfig(beta_br=1.0))
        assert plan.pulses[0][1] == pytest.approx(1.0)

    def test_energy_conserving_amplitude(self):
        plan = encode_adaptive(
            [1, 0], unit_cfg(), EncoderConfig(beta_br=3.0, conserve_energy=True)
        )
        _, width, amp = plan.pulses[0]
        assert amp == pytest.approx(math.sqrt(3.0), rel=1e-12)
        np.testing.assert_allclose(plan_energy(plan), 1.0)  # back to P_a * T_p

    def test_odd_trailing_bit_is_isolated(self):
        plan = encode_adaptive([1, 1, 1], unit_cfg(), EncoderConfig(beta_br=2.0))
        assert count_transmissions(plan) == 2
        widths = sorted(w for _, w, _ in plan.pulses)
        np.testing.assert_allclose(widths, [0.5, 1.0])

    def test_mixed_stream_event_count(self):
        plan = encode_adaptive([1, 0, 1, 1], unit_cfg(), EncoderConfig(beta_br=2.0))
        assert count_transmissions(plan) == 2

    def test_early_center_variant(self):
        plan = encode_adaptive(
            [1, 1], unit_cfg(), EncoderConfig(beta_br=2.0, early_center=True)
        )
        assert plan.pulses[0][0] == pytest.approx(0.5)

    def test_expected_transmissions_per_bit(self):
        """Disjoint pairing sends p - p^2/2 events per bit on average."""
        rng = np.random.default_rng(2024)
        cfg = unit_cfg()
        enc = EncoderConfig(beta_br=2.0)
        for p in (0.3, 0.5, 0.7):
            n = 20_000
            counts = []
            for _ in range(10):
                bits = (rng.random(n) < p).astype(int)
                counts.append(count_transmissions(encode_adaptive(bits, cfg, enc)))
            want = n * (p - p * p / 2.0)
            got = np.mean(counts)
            std = np.std(counts, ddof=1) / math.sqrt(len(counts))
            assert abs(got - want) <= 4.0 * std + 1.0


class TestAdaptiveRuns:
    def test_triple_run_collapses_once(self):
        enc = EncoderConfig(beta_br=2.0, mode="run-length", n_max=3)
        plan = encode_adaptive([1, 1, 1], unit_cfg(), enc)
        assert count_transmissions(plan) == 1
        center, width, _ = plan.pulses[0]
        assert center == pytest.approx(1.5)  # geometric midpoint of 3 slots
        assert width == pytest.approx(1.0)

    def test_long_run_greedy_split(self):
        enc = EncoderConfig(beta_br=2.0, mode="run-length", n_max=3)
        plan = encode_adaptive([1] * 7, unit_cfg(), enc)
        # 3 + 3 + 1: two collapses and one shrunk single
        assert count_transmissions(plan) == 3
        widths = [w for _, w, _ in plan.pulses]
        np.testing.assert_allclose(sorted(widths), [0.5, 1.0, 1.0])

    def test_isolated_ones_shrink(self):
        enc = EncoderConfig(beta_br=4.0, mode="run-length", n_max=4)
        plan = encode_adaptive([1, 0, 1, 0], unit_cfg(), enc)
        assert all(w == pytest.approx(0.25) for _, w, _ in plan.pulses)

    def test_run_center_early_variant(self):
        enc = EncoderConfig(beta_br=2.0, mode="run-length", n_max=2, early_center=True)
        plan = encode_adaptive([1, 1], unit_cfg(), enc)
        assert plan.pulses[0][0] == pytest.approx(0.5)


class TestSchemeInvariants:
    def test_adaptive_never_sends_more_events(self):
        rng = np.random.default_rng(88)
        cfg = unit_cfg()
        enc = EncoderConfig(beta_br=3.0)
        for _ in range(50):
            bits = rng.integers(0, 2, rng.integers(1, 64))
            conv = encode_conventional(bits, cfg)
            prop = encode_adaptive(bits, cfg, enc)
            assert count_transmissions(prop) <= count_transmissions(conv)

    def test_adaptive_saves_energy_when_broadened(self):
        rng = np.random.default_rng(89)
        cfg = unit_cfg()
        enc = EncoderConfig(beta_br=2.5)
        for _ in range(50):
            bits = rng.integers(0, 2, 32)
            if not bits.any():
                continue
            conv = encode_conventional(bits, cfg)
            prop = encode_adaptive(bits, cfg, enc)
            assert plan_energy(prop) < plan_energy(conv)

    def test_plan_rejects_non_positive_width(self):
        with pytest.raises(ValueError):
            PulsePlan(pulses=((0.5, 0.0, 1.0),), n_bits=1, scheme="x")

    def test_csv_export(self, tmp_path):
        plan = encode_adaptive([1, 1, 0, 1], unit_cfg(), EncoderConfig(beta_br=2.0))
        out = tmp_path / "plan.csv"
        plan.dump_csv(out)
        text = out.read_text().splitlines()
        assert text[0] == "center_s,width_s,amplitude"
        assert len(text) == 1 + len(plan.pulses)
