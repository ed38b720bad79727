from typing import List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import signal
from scipy.io import wavfile

from src.config import FRAME_MS, TWO_PI
from .exceptions import MULTICHANNEL, UNSUPPORTED_FORMAT, UnsupportedAudioError
from .schemas import AudioClip


PCM16_SCALE = 32768.0


def load_audio(path: str) -> AudioClip:
    """Mono 16-bit PCM (scaled by 1/32768) or 32-bit float WAV."""
    sample_rate, data = wavfile.read(path)
    if data.ndim > 1:
        raise UnsupportedAudioError(MULTICHANNEL % (data.shape[1], path))
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / PCM16_SCALE
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedAudioError(UNSUPPORTED_FORMAT % (data.dtype, path))
    return AudioClip(samples=samples, sample_rate=int(sample_rate))


def write_audio(path: str, samples: NDArray[np.float64], sample_rate: int) -> None:
    "16-bit PCM, clipped to full scale."
    pcm = np.clip(np.round(samples * PCM16_SCALE), -PCM16_SCALE, PCM16_SCALE - 1)
    wavfile.write(path, sample_rate, pcm.astype(np.int16))


def frame_signal(
    series: NDArray[np.float64], sample_rate: int, frame_ms: float = FRAME_MS
) -> List[NDArray[np.float64]]:
    "Consecutive non-overlapping frames; the trailing partial frame is dropped."
    length = int(round(frame_ms * sample_rate / 1000))
    count = len(series) // length if length else 0
    return [series[index * length : (index + 1) * length] for index in range(count)]


def analytic_signal(frame: NDArray[np.float64]) -> NDArray[np.complex128]:
    return signal.hilbert(np.asarray(frame, dtype=float))


def synthesize_voice(
    sample_rate: int,
    duration: float,
    f0: float,
    K: int,
    beta: float = 0.0,
    amplitudes: Optional[Sequence[float]] = None,
    snr_db: Optional[float] = None,
    phases: Optional[Sequence[float]] = None,
    missing: Sequence[int] = (),
    seed: int = 0,
) -> NDArray[np.float64]:
    """Real voiced-like signal with K stiff-string partials of fundamental ``f0`` Hz.

    Phases are drawn from ``seed`` unless given; the noise stream is the same either way.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(int(round(duration * sample_rate)))
    omega = TWO_PI * f0 / sample_rate
    orders = np.arange(1, K + 1)
    frequencies = omega * orders * np.sqrt(1 + beta * orders**2)
    if amplitudes is None:
        amplitudes = 0.3 / orders
    drawn = rng.uniform(0, TWO_PI, K)
    phases = drawn if phases is None else phases
    series = np.zeros(t.size)
    for order, frequency, amplitude, phase in zip(orders, frequencies, amplitudes, phases):
        if order not in missing:
            series += amplitude * np.cos(frequency * t + phase)
    if snr_db is not None:
        power = np.mean(series**2)
        series += rng.standard_normal(t.size) * np.sqrt(power / 10 ** (snr_db / 10))
    return series
