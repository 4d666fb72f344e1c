"""Acoustic features (log-Mel filterbank, MFCC) and end-of-utterance detection."""

from __future__ import annotations

import wave
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

FRAME_MS = 25
HOP_MS = 10
N_FFT = 512
LOG_FLOOR = 1e-10


class ChunkTooShort(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AudioChunk:
    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D vector")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filter_matrix(n_mels: int, sample_rate: int, n_fft: int = N_FFT) -> np.ndarray:
    """Triangular filters with corner points equally spaced on the mel scale
    between 0 and Nyquist, evaluated at the FFT bin frequencies."""
    corners_hz = mel_to_hz(np.linspace(0.0, float(hz_to_mel(sample_rate / 2)), n_mels + 2))
    bin_hz = np.arange(n_fft // 2 + 1) * (sample_rate / n_fft)
    filters = np.zeros((n_mels, bin_hz.size))
    for m in range(n_mels):
        left, center, right = corners_hz[m], corners_hz[m + 1], corners_hz[m + 2]
        rising = (bin_hz - left) / (center - left)
        falling = (right - bin_hz) / (right - center)
        filters[m] = np.maximum(0.0, np.minimum(rising, falling))
    return filters


def frame_signal(chunk: AudioChunk) -> np.ndarray:
    frame_len = int(round(chunk.sample_rate * FRAME_MS / 1000))
    hop = int(round(chunk.sample_rate * HOP_MS / 1000))
    n = chunk.samples.size
    if n < frame_len:
        raise ChunkTooShort(f"need at least {frame_len} samples, got {n}")
    n_frames = 1 + (n - frame_len) // hop
    index = np.arange(frame_len)[None, :] + hop * np.arange(n_frames)[:, None]
    return chunk.samples[index] * np.hamming(frame_len)


def _power_spectrum(frames: np.ndarray) -> np.ndarray:
    spectrum = np.fft.rfft(frames, n=N_FFT, axis=1)
    return np.abs(spectrum) ** 2


def log_mel_filterbank(chunk: AudioChunk, n_mels: int = 80) -> np.ndarray:
    """Frames x n_mels matrix of natural-log mel energies, floored at 1e-10."""
    power = _power_spectrum(frame_signal(chunk))
    filters = mel_filter_matrix(n_mels, chunk.sample_rate)
    return np.log(np.maximum(power @ filters.T, LOG_FLOOR))


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis, rows indexed by coefficient."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    basis = np.cos(np.pi * k * (2 * i + 1) / (2 * n))
    basis[0] *= np.sqrt(1.0 / n)
    basis[1:] *= np.sqrt(2.0 / n)
    return basis


def mfcc13(chunk: AudioChunk) -> np.ndarray:
    """13 cepstral coefficients per frame from a 26-filter log mel spectrum."""
    log_mel = log_mel_filterbank(chunk, n_mels=26)
    return log_mel @ dct_matrix(26).T[:, :13]


def detect_end_of_utterance(chunks: Sequence[AudioChunk],
                            amp_threshold: float = 0.05,
                            k: int = 25) -> Optional[int]:
    """Index of the k-th consecutive chunk whose peak stays at or below the
    threshold; None if the stream never goes quiet for that long."""
    if k < 1:
        raise ValueError("k must be at least 1")
    quiet_run = 0
    for i, chunk in enumerate(chunks):
        if np.max(np.abs(chunk.samples)) <= amp_threshold:
            quiet_run += 1
            if quiet_run == k:
                return i
        else:
            quiet_run = 0
    return None


def load_wav(path) -> AudioChunk:
    """Mono 16-bit PCM only."""
    with wave.open(str(path), "rb") as wav:
        if wav.getnchannels() != 1:
            raise ValueError("expected mono audio")
        if wav.getsampwidth() != 2:
            raise ValueError("expected 16-bit PCM")
        raw = wav.readframes(wav.getnframes())
        rate = wav.getframerate()
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return AudioChunk(samples=samples, sample_rate=rate)
