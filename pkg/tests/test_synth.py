import dataclasses

import numpy as np
import pytest

from tvgmd.errors import BadParameterError, NyquistViolationError
from tvgmd.synth import SynthSpec, generate, paper_preset


class TestPreset:
    def test_node_term_table(self):
        spec = paper_preset()
        assert len(spec.node_terms) == 8
        assert spec.node_terms[0] == ((2.0, 1.0), (128.0, 1.0))
        assert spec.node_terms[1] == ((24.0, -1.0), (48.0, 1.0))
        assert spec.node_terms[4] == (
            (2.0, 1.0),
            (24.0, 1.0),
            (48.0, 1.0),
            (128.0, 1.0),
        )
        assert spec.node_terms[7] == ((2.0, 1.0), (24.0, 1.0), (48.0, -1.0))

    def test_preset_dimensions(self):
        signal, _ = generate(paper_preset())
        assert signal.samples.shape == (8, 1024)
        assert signal.sample_rate_hz == 512.0

    def test_two_hz_partition(self):
        _, truth = generate(paper_preset())
        active, silent = truth.partitions[2.0]
        assert set(active) == {0, 2, 4, 6, 7}
        assert set(silent) == {1, 3, 5}

    def test_twenty_four_hz_partition(self):
        _, truth = generate(paper_preset())
        active, silent = truth.partitions[24.0]
        assert set(active) == {1, 3, 4, 6, 7}
        assert set(silent) == {0, 2, 5}


class TestGenerate:
    def test_clean_signal_is_sum_of_components(self):
        signal, truth = generate(paper_preset())
        total = sum(truth.components.values())
        assert np.array_equal(signal.samples, total)
        assert np.array_equal(truth.clean, total)

    def test_no_noise_without_snr(self):
        a, _ = generate(paper_preset())
        b, _ = generate(dataclasses.replace(paper_preset(), seed=99))
        assert np.array_equal(a.samples, b.samples)

    def test_seed_fixes_noise(self):
        spec = dataclasses.replace(paper_preset(), snr_db=6.0, seed=7)
        a, _ = generate(spec)
        b, _ = generate(spec)
        assert np.array_equal(a.samples, b.samples)
        c, _ = generate(dataclasses.replace(spec, seed=8))
        assert not np.array_equal(a.samples, c.samples)

    def test_snr_calibration(self):
        # measured per-node SNR within +-0.5 dB of the target, averaged
        # over ten seeds
        target_db = 6.0
        ratios = []
        for seed in range(10):
            spec = dataclasses.replace(
                paper_preset(), snr_db=target_db, seed=seed
            )
            signal, truth = generate(spec)
            noise = signal.samples - truth.clean
            ratios.append(
                np.sum(truth.clean**2, axis=1) / np.sum(noise**2, axis=1)
            )
        measured_db = 10 * np.log10(np.mean(ratios, axis=0))
        assert np.all(np.abs(measured_db - target_db) <= 0.5)

    def test_silent_node_gets_fallback_noise(self):
        spec = SynthSpec(
            node_terms=(((4.0, 1.0),), ()),
            sample_rate_hz=32.0,
            duration_s=2.0,
            snr_db=10.0,
            seed=1,
        )
        signal, truth = generate(spec)
        assert np.all(truth.clean[1] == 0.0)
        assert np.any(signal.samples[1] != 0.0)

    def test_silent_node_without_noise_is_zero(self):
        spec = SynthSpec(
            node_terms=(((4.0, 1.0),), ()),
            sample_rate_hz=32.0,
            duration_s=2.0,
        )
        signal, _ = generate(spec)
        assert np.all(signal.samples[1] == 0.0)

    def test_nyquist_violation_rejected(self):
        spec = SynthSpec(
            node_terms=(((16.0, 1.0),), ((1.0, 1.0),)),
            sample_rate_hz=32.0,
            duration_s=1.0,
        )
        with pytest.raises(NyquistViolationError):
            generate(spec)

    def test_non_integral_duration_rejected(self):
        spec = SynthSpec(
            node_terms=(((1.0, 1.0),), ((1.0, 1.0),)),
            sample_rate_hz=32.0,
            duration_s=0.33,
        )
        with pytest.raises(BadParameterError):
            generate(spec)

    def test_integer_cycles_for_preset_tones(self):
        spec = paper_preset()
        t_total = spec.duration_s
        for terms in spec.node_terms:
            for freq, _ in terms:
                cycles = freq * t_total
                assert cycles == int(cycles)
