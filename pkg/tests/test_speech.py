from pathlib import Path

import numpy as np
import pytest
from scipy.io import wavfile

from src.config import CDF_COLUMNS, TWO_PI
from src.speech.exceptions import NoAcceptedFramesError, UnsupportedAudioError
from src.speech.schemas import AudioClip, DetectConfig, FrameAnalysis, FrameRatio
from src.speech.service import (
    analyze_audio,
    analyze_frame,
    assign_orders,
    detect_peaks,
    ratio_cdf,
    rejection_histogram,
    write_frames,
)
from src.speech.utils import analytic_signal, frame_signal, load_audio, synthesize_voice

SAMPLE_RATE = 20000
FRAME = 512
BUNDLED_VOICE = Path(__file__).resolve().parents[1] / "fixtures" / "voice_stiff_clean.wav"


def voiced_frame(**voice) -> np.ndarray:
    voice.setdefault("f0", 400.0)
    voice.setdefault("K", 5)
    voice.setdefault("snr_db", 20.0)
    return analytic_signal(synthesize_voice(SAMPLE_RATE, FRAME / SAMPLE_RATE, **voice))


def test_load_audio_normalizes_pcm(wav_factory):
    path = wav_factory(f0=300.0, K=4, duration=0.5)
    clip = load_audio(path)
    assert clip.sample_rate == 20000
    assert clip.duration == pytest.approx(0.5)
    assert np.max(np.abs(clip.samples)) < 1.0
    raw = wavfile.read(path)[1]
    np.testing.assert_array_equal(clip.samples, raw / 32768.0)


def test_bundled_voice_matches_its_recipe():
    clip = load_audio(str(BUNDLED_VOICE))
    assert clip.sample_rate == SAMPLE_RATE
    expected = synthesize_voice(SAMPLE_RATE, 1.024, 180.0, 6, beta=1e-2, phases=[0.0] * 6)
    np.testing.assert_allclose(clip.samples, expected, atol=1 / 32768)


def test_load_audio_accepts_float(tmp_path):
    path = tmp_path / "float.wav"
    wavfile.write(path, 8000, np.full(800, 0.25, dtype=np.float32))
    clip = load_audio(str(path))
    assert clip.duration == pytest.approx(0.1)
    assert clip.samples[0] == 0.25


def test_load_audio_rejects_stereo_and_int32(tmp_path):
    stereo, wide = tmp_path / "stereo.wav", tmp_path / "wide.wav"
    wavfile.write(stereo, 8000, np.zeros((100, 2), dtype=np.int16))
    wavfile.write(wide, 8000, np.zeros(100, dtype=np.int32))
    with pytest.raises(UnsupportedAudioError, match="mono"):
        load_audio(str(stereo))
    with pytest.raises(UnsupportedAudioError, match="int32"):
        load_audio(str(wide))


def test_frame_signal_drops_partial_frame():
    frames = frame_signal(np.arange(1100.0), SAMPLE_RATE, 25.6)
    assert [frame.size for frame in frames] == [512, 512]
    np.testing.assert_array_equal(frames[1], np.arange(512.0, 1024.0))
    assert frame_signal(np.arange(500.0), SAMPLE_RATE, 25.6) == []


def test_analytic_signal_keeps_real_part():
    t = np.arange(FRAME)
    series = np.cos(TWO_PI * 8 * t / FRAME)
    analytic = analytic_signal(series)
    np.testing.assert_allclose(analytic.real, series, atol=1e-12)
    np.testing.assert_allclose(np.abs(analytic), 1.0, atol=1e-12)


def test_peaks_sit_on_harmonics():
    sample_rate, f0 = 8000, 200.0
    frame = analytic_signal(synthesize_voice(sample_rate, 0.0256, f0, 5, snr_db=30.0))
    peaks = detect_peaks(frame, DetectConfig())
    expected = TWO_PI * f0 * np.arange(1, 6) / sample_rate
    assert peaks.size == 5
    np.testing.assert_allclose(peaks, expected, atol=TWO_PI / frame.size)


def test_assign_orders_by_median_spacing():
    np.testing.assert_array_equal(assign_orders(np.array([0.1, 0.2, 0.4, 0.5])), [1, 2, 4, 5])
    np.testing.assert_array_equal(assign_orders(np.array([0.1, 0.21, 0.3])), [1, 2, 3])


def test_harmonic_frame_is_accepted():
    analysis = analyze_frame(voiced_frame(), DetectConfig(snr_db=[0.0, 10.0]))
    assert analysis.accepted, analysis.reason
    assert analysis.K_detected == 5
    assert analysis.orders == [1, 2, 3, 4, 5]
    assert analysis.omega0 == pytest.approx(TWO_PI * 400 / SAMPLE_RATE, abs=1e-3)
    assert [ratio.snr_db for ratio in analysis.ratios] == [0.0, 10.0]
    assert all(ratio.ratio_mcrlb < 1 for ratio in analysis.ratios)


def test_missing_harmonic_is_rejected():
    analysis = analyze_frame(voiced_frame(K=6, missing=(3,)))
    assert not analysis.accepted
    assert analysis.reason.startswith("missing harmonics")
    assert analysis.orders == [1, 2, 4, 5, 6]


def test_two_components_are_rejected():
    analysis = analyze_frame(voiced_frame(K=2))
    assert not analysis.accepted
    assert analysis.K_detected == 2
    assert analysis.reason.startswith("fewer than 3 components")


def test_silent_frame_is_rejected():
    analysis = analyze_frame(np.zeros(FRAME, dtype=complex), frame_index=7)
    assert analysis.frame_index == 7
    assert analysis.reason == "silent frame"


def test_ratios_do_not_depend_on_gain():
    frame = voiced_frame(beta=1e-3, seed=2)
    reference = analyze_frame(frame)
    assert reference.accepted, reference.reason
    for gain in (10.0, 0.1):
        scaled = analyze_frame(gain * frame)
        for left, right in zip(reference.ratios, scaled.ratios):
            assert right.ratio_mse == pytest.approx(left.ratio_mse, rel=1e-9)
            assert right.ratio_mcrlb == pytest.approx(left.ratio_mcrlb, rel=1e-9)


def test_analysis_is_deterministic():
    clip = AudioClip(
        samples=synthesize_voice(SAMPLE_RATE, 4 * FRAME / SAMPLE_RATE, 350.0, 4, snr_db=25.0),
        sample_rate=SAMPLE_RATE,
    )
    first = analyze_audio(clip, threads=1)
    second = analyze_audio(clip, threads=2)
    assert [a.accepted for a in first] == [a.accepted for a in second]
    assert [a.frame_index for a in first] == [0, 1, 2, 3]


def _accepted(index: int, values) -> FrameAnalysis:
    return FrameAnalysis(
        frame_index=index,
        accepted=True,
        ratios=[FrameRatio(snr_db=10.0, ratio_mse=value, ratio_mcrlb=value / 2) for value in values],
    )


def test_ratio_cdf_is_a_step_function(tmp_path):
    analyses = [
        _accepted(0, [3.0]),
        _accepted(1, [1.0]),
        _accepted(2, [2.0]),
        FrameAnalysis(frame_index=3).rejected("silent frame"),
    ]
    path = tmp_path / "cdf.csv"
    rows = ratio_cdf(analyses, [10.0], path)
    mse = [row for row in rows if row["ratio_kind"] == "mse"]
    assert [row["ratio"] for row in mse] == [1.0, 2.0, 3.0]
    assert [row["cdf"] for row in mse] == pytest.approx([1 / 3, 2 / 3, 1.0])
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CDF_COLUMNS)
    assert len(lines) == 7


def test_ratio_cdf_without_accepted_frames():
    analyses = [
        FrameAnalysis(frame_index=0).rejected("silent frame"),
        FrameAnalysis(frame_index=1).rejected("fewer than 3 components (2 detected)"),
    ]
    assert rejection_histogram(analyses) == {"silent frame": 1, "fewer than 3 components": 1}
    with pytest.raises(NoAcceptedFramesError, match="2 analysed"):
        ratio_cdf(analyses, [10.0])


def test_frames_are_written_as_json_lines(tmp_path):
    path = write_frames([_accepted(0, [1.5]), FrameAnalysis(frame_index=1)], tmp_path / "frames.jsonl")
    lines = path.read_bytes().splitlines()
    assert len(lines) == 2
    assert b'"accepted":true' in lines[0]


def _corpus_mass_above_one(beta: float) -> float:
    clips = [
        synthesize_voice(SAMPLE_RATE, 2 * FRAME / SAMPLE_RATE, f0, 5, beta=beta, snr_db=25.0, seed=seed)
        for seed, f0 in enumerate((320.0, 380.0, 440.0))
    ]
    analyses = analyze_audio(AudioClip(samples=np.concatenate(clips), sample_rate=SAMPLE_RATE))
    ratios = [row["ratio"] for row in ratio_cdf(analyses, [10.0]) if row["ratio_kind"] == "mse"]
    return float(np.mean(np.asarray(ratios) > 1))


def test_inharmonic_corpus_favors_unstructured_model():
    assert _corpus_mass_above_one(beta=2e-3) > 0
    assert _corpus_mass_above_one(beta=0.0) <= 0.05
