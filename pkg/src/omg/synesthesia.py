"""Audio-tactile substitution: contact events become short tones.

Each hand region owns a frequency (left hand one octave below the right),
and the envelope attack sharpens with contact velocity and object hardness,
so a fast poke at a hard object clicks while a slow touch of a soft one
swells. Rendering is offline PCM so the engine stays hardware-free; live
playback belongs to the UI.
"""

from __future__ import annotations

import json
import math
import wave
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import clamp

SAMPLE_RATE = 48000
DECAY_MS = 250.0
ATTACK_MIN_MS = 5.0
ATTACK_MAX_MS = 120.0

REGIONS = ("palm", "thumb", "index", "middle", "ring", "little")


class UnmappedRegionError(KeyError):
    pass


@dataclass(frozen=True)
class ToneMapping:
    """Region -> frequency table (right hand); left hand plays an octave down."""

    frequencies: dict[str, float]

    def __post_init__(self) -> None:
        for region, f in self.frequencies.items():
            if not (0.0 < f < SAMPLE_RATE / 2):
                raise ValueError(f"frequency for {region} outside (0, Nyquist): {f}")
        if len(set(self.frequencies.values())) != len(self.frequencies):
            raise ValueError("region frequencies must be distinct")

    def frequency(self, side: str, region: str) -> float:
        if region not in self.frequencies:
            raise UnmappedRegionError(region)
        f = self.frequencies[region]
        return f * 0.5 if side == "left" else f


def default_mapping() -> ToneMapping:
    text = resources.files("omg.data").joinpath("tone_mapping.json").read_text()
    return ToneMapping(json.loads(text))


def load_mapping(path: str | Path) -> ToneMapping:
    with open(path) as fh:
        return ToneMapping(json.load(fh))


@dataclass(frozen=True)
class AudioEvent:
    frequency: float  # Hz
    attack_ms: float  # 5..120
    decay_ms: float  # fixed 250
    amplitude: float  # 0..1
    start: float  # seconds

    def __post_init__(self) -> None:
        if not (ATTACK_MIN_MS <= self.attack_ms <= ATTACK_MAX_MS):
            raise ValueError(f"attack {self.attack_ms} ms outside [5, 120]")
        if not (0.0 <= self.amplitude <= 1.0):
            raise ValueError(f"amplitude {self.amplitude} outside [0, 1]")


def attack_for(velocity: float, hardness: float) -> float:
    """Envelope attack in ms; faster contact and harder objects sharpen it."""
    return clamp(120.0 / ((1.0 + velocity / 0.5) * (1.0 + hardness)), ATTACK_MIN_MS, ATTACK_MAX_MS)


def event_for_contact(
    side: str,
    region: str,
    approach_speed: float,
    hardness: float,
    start: float,
    mapping: ToneMapping | None = None,
) -> AudioEvent:
    if approach_speed < 0.0:
        raise ValueError("approach speed must be >= 0")
    if not (0.0 <= hardness <= 1.0):
        raise ValueError("hardness must be in [0, 1]")
    mapping = mapping or default_mapping()
    return AudioEvent(
        frequency=mapping.frequency(side, region),
        attack_ms=attack_for(approach_speed, hardness),
        decay_ms=DECAY_MS,
        amplitude=min(approach_speed / 2.0, 1.0),
        start=start,
    )


def envelope(event: AudioEvent, t: np.ndarray) -> np.ndarray:
    """Linear attack to the event amplitude, then exponential decay.

    `t` is seconds relative to the buffer start; zero outside the event.
    """
    rel = t - event.start
    atk = event.attack_ms / 1000.0
    tau = event.decay_ms / 1000.0
    env = np.zeros_like(rel)
    rising = (rel >= 0.0) & (rel < atk)
    env[rising] = event.amplitude * (rel[rising] / atk)
    falling = rel >= atk
    env[falling] = event.amplitude * np.exp(-(rel[falling] - atk) / tau)
    return env


def render_pcm(
    events: list[AudioEvent],
    duration: float,
    sample_rate: int = SAMPLE_RATE,
) -> np.ndarray:
    """Mix events into mono float samples in [-1, 1].

    A master limiter rescales the whole mix only when the raw sum would
    clip, so non-overlapping events render at their true amplitudes.
    """
    n = int(round(duration * sample_rate))
    mix = np.zeros(n, dtype=np.float64)
    t = np.arange(n, dtype=np.float64) / sample_rate
    for ev in events:
        if ev.start > duration:
            raise ValueError(f"event at {ev.start}s starts beyond the {duration}s buffer")
        env = envelope(ev, t)
        mix += env * np.sin(2.0 * math.pi * ev.frequency * (t - ev.start))
    peak = float(np.max(np.abs(mix))) if n else 0.0
    if peak > 1.0:
        mix /= peak
    return mix


def write_wav(path: str | Path, samples: np.ndarray, sample_rate: int = SAMPLE_RATE) -> None:
    """16-bit PCM mono RIFF output."""
    quantized = np.clip(np.rint(samples * 32767.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(quantized.tobytes())


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    with wave.open(str(path), "rb") as wf:
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32767.0
    return samples, rate
