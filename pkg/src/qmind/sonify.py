"""Additive synthesis of measurement histograms.

One sine oscillator per possible outcome; outcome ``i`` drives oscillator
``i + 1`` with amplitude ``count_i / shots``. The summed partials are shaped
by a Hann envelope spanning the whole sound and scaled to a 0.9 peak.
"""
from __future__ import annotations

import wave
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import windows

from .errors import AudioError
from .qsim import ShotHistogram

DEFAULT_FREQS = (55.0, 164.81, 329.63, 440.0, 554.37, 659.26, 783.99, 880.0)
DEFAULT_DURATION = 5.0
DEFAULT_RATE = 44100
PEAK = 0.9


@dataclass(frozen=True)
class OscillatorBank:
    freqs: tuple[float, ...]
    amps: tuple[float, ...]

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.freqs)
        amps = tuple(float(a) for a in self.amps)
        if len(freqs) != len(amps):
            raise AudioError("one amplitude per oscillator required")
        if any(f <= 0 for f in freqs):
            raise AudioError("oscillator frequencies must be positive")
        if any(not 0.0 <= a <= 1.0 for a in amps):
            raise AudioError("amplitudes must lie in [0, 1]")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "amps", amps)

    def __len__(self):
        return len(self.freqs)


@dataclass(frozen=True)
class SoundSpec:
    duration: float = DEFAULT_DURATION
    rate: int = DEFAULT_RATE

    def __post_init__(self):
        if not self.duration > 0:
            raise AudioError(f"duration must be positive, got {self.duration}")
        if self.rate < 8000:
            raise AudioError(f"sample rate must be >= 8000 Hz, got {self.rate}")


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    samples: np.ndarray  # mono, [-1, 1]
    rate: int

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.rate


def histogram_to_bank(hist: ShotHistogram, freqs: Sequence[float] = DEFAULT_FREQS) -> OscillatorBank:
    if hist.shots < 1:
        raise AudioError("histogram has no shots")
    counts = hist.as_array()
    if len(freqs) != counts.size:
        raise AudioError(f"{counts.size} outcomes need {counts.size} frequencies, got {len(freqs)}")
    return OscillatorBank(tuple(freqs), tuple(counts / hist.shots))


def synthesize(bank: OscillatorBank, spec: SoundSpec = SoundSpec()) -> AudioBuffer:
    nyquist = spec.rate / 2
    for f in bank.freqs:
        if f >= nyquist:
            raise AudioError(f"{f} Hz aliases at {spec.rate} Hz sampling")
    n = int(round(spec.duration * spec.rate))
    t = np.arange(n) / spec.rate
    signal = np.zeros(n)
    for f, a in zip(bank.freqs, bank.amps):
        if a:
            signal += a * np.sin(2 * np.pi * f * t)
    # symmetric window: exactly zero at both ends
    signal *= windows.hann(n, sym=True)
    peak = np.max(np.abs(signal)) if n else 0.0
    if peak > 0:
        signal *= PEAK / peak
    return AudioBuffer(signal, spec.rate)


def concatenate(buffers: Sequence[AudioBuffer]) -> AudioBuffer:
    if not buffers:
        raise AudioError("nothing to concatenate")
    rates = {b.rate for b in buffers}
    if len(rates) != 1:
        raise AudioError("buffers have different sample rates")
    return AudioBuffer(np.concatenate([b.samples for b in buffers]), rates.pop())


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    return np.clip(np.round(np.asarray(samples) * 32767.0), -32768, 32767).astype("<i2")


def write_wav(buffer: AudioBuffer, path) -> None:
    """16-bit signed little-endian mono PCM."""
    try:
        with open(path, "wb") as fh, wave.open(fh, "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(2)
            wf.setframerate(int(buffer.rate))
            wf.writeframes(to_pcm16(buffer.samples).tobytes())
    except OSError as exc:
        raise AudioError(f"cannot write {path}: {exc}") from exc


def read_wav(path) -> AudioBuffer:
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1 or wf.getsampwidth() != 2:
            raise AudioError(f"{path}: expected 16-bit mono PCM")
        frames = wf.readframes(wf.getnframes())
        rate = wf.getframerate()
    return AudioBuffer(np.frombuffer(frames, dtype="<i2") / 32767.0, rate)


def measure_partials(buffer: AudioBuffer, freqs: Sequence[float]) -> np.ndarray:
    """Hann-windowed DFT magnitude at each frequency, scaled so the largest is 1."""
    x = np.asarray(buffer.samples, dtype=float)
    if x.size == 0:
        return np.zeros(len(freqs))
    w = windows.hann(x.size, sym=False)
    t = np.arange(x.size) / buffer.rate
    mags = np.array([abs(np.dot(w * x, np.exp(-2j * np.pi * f * t))) for f in freqs])
    top = mags.max()
    return mags / top if top > 0 else np.zeros(len(freqs))
