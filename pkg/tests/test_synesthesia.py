import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omg import synesthesia as syn


class TestToneMapping:
    def test_default_frequencies(self):
        m = syn.default_mapping()
        assert m.frequency("right", "palm") == 196.0
        assert m.frequency("right", "thumb") == 261.63
        assert m.frequency("right", "index") == 293.66
        assert m.frequency("right", "middle") == 329.63
        assert m.frequency("right", "ring") == 392.0
        assert m.frequency("right", "little") == 440.0

    def test_left_hand_octave_below(self):
        m = syn.default_mapping()
        for region in syn.REGIONS:
            assert m.frequency("left", region) == m.frequency("right", region) / 2.0

    def test_injective(self):
        m = syn.default_mapping()
        freqs = [m.frequency("right", r) for r in syn.REGIONS]
        assert len(set(freqs)) == len(freqs)

    def test_unmapped_region(self):
        with pytest.raises(syn.UnmappedRegionError):
            syn.default_mapping().frequency("right", "elbow")

    def test_rejects_silly_frequencies(self):
        with pytest.raises(ValueError):
            syn.ToneMapping({"palm": 0.0})
        with pytest.raises(ValueError):
            syn.ToneMapping({"palm": 40000.0})

    def test_loadable(self, tmp_path):
        import json

        path = tmp_path / "tones.json"
        path.write_text(json.dumps({"palm": 100.0, "index": 200.0}))
        m = syn.load_mapping(path)
        assert m.frequency("right", "index") == 200.0


class TestAttack:
    def test_endpoints(self):
        assert syn.attack_for(0.0, 0.0) == 120.0
        assert syn.attack_for(0.5, 1.0) == pytest.approx(30.0)

    def test_clamped(self):
        assert syn.attack_for(100.0, 1.0) == 5.0
        assert syn.attack_for(0.0, 0.0) == 120.0

    def test_strictly_decreasing_grid(self):
        velocities = [0.0 + 0.1 * k for k in range(21)]  # 0..2 m/s
        hardnesses = [0.0 + 0.05 * k for k in range(21)]  # 0..1
        for h in hardnesses:
            values = [syn.attack_for(v, h) for v in velocities]
            for a, b in zip(values, values[1:]):
                assert b <= a
        for v in velocities:
            values = [syn.attack_for(v, h) for h in hardnesses]
            for a, b in zip(values, values[1:]):
                assert b <= a

    @given(v=st.floats(0.0, 10.0), h=st.floats(0.0, 1.0))
    @settings(max_examples=100, deadline=None)
    def test_always_in_range(self, v, h):
        assert 5.0 <= syn.attack_for(v, h) <= 120.0


class TestEventForContact:
    def test_index_contact(self):
        ev = syn.event_for_contact("right", "index", approach_speed=1.0,
                                   hardness=0.6, start=0.25)
        assert ev.frequency == 293.66
        assert ev.amplitude == 0.5
        assert ev.decay_ms == 250.0
        assert ev.start == 0.25

    def test_amplitude_clamped(self):
        ev = syn.event_for_contact("right", "palm", approach_speed=9.0,
                                   hardness=0.5, start=0.0)
        assert ev.amplitude == 1.0

    def test_rejects_negative_speed(self):
        with pytest.raises(ValueError):
            syn.event_for_contact("right", "palm", approach_speed=-1.0,
                                  hardness=0.5, start=0.0)


class TestRenderPcm:
    def test_silence(self):
        out = syn.render_pcm([], duration=0.5)
        assert out.shape == (24000,)
        assert np.all(out == 0.0)

    def test_envelope_peak_position_and_height(self):
        # quarter-rate tone makes |samples| trace the envelope to +-1 sample
        ev = syn.AudioEvent(frequency=12000.0, attack_ms=30.0, decay_ms=250.0,
                            amplitude=0.5, start=0.0)
        out = syn.render_pcm([ev], duration=0.5)
        peak_idx = int(np.argmax(np.abs(out)))
        expected = int(round(0.030 * syn.SAMPLE_RATE))
        assert abs(peak_idx - expected) <= 1
        assert abs(np.abs(out)[peak_idx] - 0.5) <= 1e-3

    def test_overlapping_events_limited(self):
        evs = [
            syn.AudioEvent(frequency=440.0, attack_ms=10.0, decay_ms=250.0,
                           amplitude=0.8, start=0.1),
            syn.AudioEvent(frequency=440.0, attack_ms=10.0, decay_ms=250.0,
                           amplitude=0.8, start=0.1),
        ]
        out = syn.render_pcm(evs, duration=1.0)
        assert np.max(np.abs(out)) <= 1.0

    def test_no_limiting_when_headroom(self):
        ev = syn.AudioEvent(frequency=440.0, attack_ms=10.0, decay_ms=250.0,
                            amplitude=0.25, start=0.1)
        out = syn.render_pcm([ev], duration=1.0)
        assert np.max(np.abs(out)) == pytest.approx(0.25, abs=0.01)

    def test_deterministic(self):
        evs = [syn.AudioEvent(frequency=330.0, attack_ms=20.0, decay_ms=250.0,
                              amplitude=0.6, start=0.05)]
        a = syn.render_pcm(evs, duration=0.4)
        b = syn.render_pcm(evs, duration=0.4)
        assert np.array_equal(a, b)

    def test_bounds_and_finiteness(self):
        rng = np.random.default_rng(2)
        evs = [
            syn.AudioEvent(frequency=float(rng.uniform(100, 2000)),
                           attack_ms=float(rng.uniform(5, 120)),
                           decay_ms=250.0,
                           amplitude=float(rng.uniform(0, 1)),
                           start=float(rng.uniform(0, 0.8)))
            for _ in range(20)
        ]
        out = syn.render_pcm(evs, duration=1.0)
        assert np.all(np.isfinite(out))
        assert np.max(np.abs(out)) <= 1.0

    def test_event_beyond_duration_rejected(self):
        ev = syn.AudioEvent(frequency=440.0, attack_ms=10.0, decay_ms=250.0,
                            amplitude=0.5, start=2.0)
        with pytest.raises(ValueError):
            syn.render_pcm([ev], duration=1.0)


class TestWav:
    def test_roundtrip(self, tmp_path):
        ev = syn.AudioEvent(frequency=440.0, attack_ms=15.0, decay_ms=250.0,
                            amplitude=0.7, start=0.02)
        out = syn.render_pcm([ev], duration=0.3)
        path = tmp_path / "tone.wav"
        syn.write_wav(path, out)
        back, rate = syn.read_wav(path)
        assert rate == syn.SAMPLE_RATE
        assert back.shape == out.shape
        assert np.max(np.abs(back - out)) <= 1.0 / 32000.0
