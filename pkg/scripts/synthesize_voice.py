"""Writes the synthetic voiced WAV fixtures used by the speech command.

Only the noise-free voice_stiff_clean.wav is checked in.

    python3 -m scripts.synthesize_voice
"""
import os

from src.speech.utils import synthesize_voice, write_audio

SAMPLE_RATE = 20000
DURATION = 1.024
OUTPUT_DIR = "fixtures"

VOICES = {
    "voice_harmonic.wav": dict(f0=200.0, K=6, beta=0.0, snr_db=30.0, seed=1),
    "voice_stiff.wav": dict(f0=180.0, K=6, beta=1e-2, snr_db=30.0, seed=2),
    "voice_missing.wav": dict(f0=220.0, K=6, missing=(3,), snr_db=30.0, seed=3),
    "voice_stiff_clean.wav": dict(f0=180.0, K=6, beta=1e-2, phases=(0.0,) * 6),
}

os.makedirs(OUTPUT_DIR, exist_ok=True)

for name, parameters in VOICES.items():
    series = synthesize_voice(SAMPLE_RATE, DURATION, **parameters)
    write_audio(os.path.join(OUTPUT_DIR, name), series, SAMPLE_RATE)
    print(f"wrote {name}")
