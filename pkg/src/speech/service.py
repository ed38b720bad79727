"""Frame-wise bound analysis of recorded voiced audio.

Each frame is turned into its analytic signal, sinusoids are detected from
periodogram peaks and refined by the unstructured MLE, and frames holding
3 to 10 consecutive harmonics are compared against the harmonic model at
imposed SNRs.
"""
from collections import Counter
import csv
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import orjson
from numpy.typing import NDArray
from scipy import signal

from src.bounds.service import compute_bounds
from src.config import CDF_COLUMNS, TWO_PI
from src.estimators.schemas import SinusoidEstimate
from src.estimators.service import unstructured_mle
from src.exceptions import NumericalError
from src.utils import ordered_map, snr_to_noise_variance
from .exceptions import (
    BOUNDS_FAILED,
    FRAMES_ANALYSED,
    MISSING_HARMONICS,
    NO_ACCEPTED_FRAMES,
    NO_PEAKS,
    REFINEMENT_FAILED,
    SILENT_FRAME,
    TOO_FEW_COMPONENTS,
    TOO_MANY_COMPONENTS,
    NoAcceptedFramesError,
)
from .schemas import AudioClip, DetectConfig, FrameAnalysis, FrameRatio
from .utils import analytic_signal, frame_signal


logger = logging.getLogger(__name__)


def detect_peaks(frame: NDArray[np.complex128], detect: DetectConfig) -> NDArray[np.float64]:
    """Positive frequencies (rad/sample) of Hann-windowed periodogram peaks.

    A peak must exceed the median level by ``threshold_db`` and lie within
    ``dynamic_range_db`` of the strongest peak.
    """
    N = frame.size
    freqs, power = signal.periodogram(
        frame,
        window="hann",
        nfft=detect.zero_padding * N,
        detrend=False,
        return_onesided=False,
        scaling="spectrum",
    )
    if not power.max() > 0:
        return np.empty(0)
    threshold = max(
        np.median(power) * 10 ** (detect.threshold_db / 10),
        power.max() * 10 ** (-detect.dynamic_range_db / 10),
    )
    positive = (freqs > 0) & (freqs < 0.5)
    peaks, _ = signal.find_peaks(
        power[positive], height=threshold, distance=3 * detect.zero_padding
    )
    return np.sort(TWO_PI * freqs[positive][peaks])


def assign_orders(frequencies: NDArray[np.float64]) -> NDArray[np.int64]:
    "Harmonic orders nu_k / median spacing, rounded."
    spacing = np.median(np.diff(frequencies)) if frequencies.size > 1 else frequencies[0]
    return np.rint(frequencies / spacing).astype(int)


def analyze_frame(
    frame: NDArray[np.complex128], detect: Optional[DetectConfig] = None, frame_index: int = 0
) -> FrameAnalysis:
    detect = detect or DetectConfig()
    frame = np.asarray(frame, dtype=complex)
    analysis = FrameAnalysis(frame_index=frame_index)
    if not np.any(frame):
        return analysis.rejected(SILENT_FRAME)
    peaks = detect_peaks(frame, detect)
    if not peaks.size:
        return analysis.rejected(NO_PEAKS)
    K = int(peaks.size)
    analysis = analysis.model_copy(update={"K_detected": K})
    if K < detect.min_harmonics:
        return analysis.rejected(TOO_FEW_COMPONENTS % (detect.min_harmonics, K))
    if K > detect.max_harmonics:
        return analysis.rejected(TOO_MANY_COMPONENTS % (detect.max_harmonics, K))

    estimate = unstructured_mle(frame, K, peaks)
    if not estimate.converged:
        return analysis.rejected(REFINEMENT_FAILED % estimate.reason)
    sinusoids: SinusoidEstimate = estimate.params
    orders = assign_orders(np.asarray(sinusoids.frequencies))
    analysis = analysis.model_copy(
        update={
            "sinusoids": sinusoids,
            "orders": orders.tolist(),
            "residual_variance": estimate.residual_variance,
        }
    )
    if not np.array_equal(orders, np.arange(1, K + 1)):
        return analysis.rejected(MISSING_HARMONICS % orders.tolist())

    ratios = []
    omega0 = None
    try:
        for snr_db in detect.snr_db:
            spec = sinusoids.to_spec(snr_to_noise_variance(sinusoids.amplitudes, snr_db))
            report = compute_bounds(spec, detect.bound_samples)
            crlb = report.crlb_unstructured_freqs[0]
            omega0 = report.omega0
            ratios.append(
                FrameRatio(
                    snr_db=snr_db,
                    ratio_mse=report.mse_lower_freqs[0] / crlb,
                    ratio_mcrlb=report.mcrlb_exact_omega / crlb,
                )
            )
    except (NumericalError, ValueError) as exc:
        return analysis.rejected(BOUNDS_FAILED % exc)
    return analysis.model_copy(
        update={"omega0": omega0, "ratios": ratios, "accepted": True, "reason": None}
    )


def analyze_audio(
    clip: AudioClip, detect: Optional[DetectConfig] = None, threads: Optional[int] = None
) -> List[FrameAnalysis]:
    detect = detect or DetectConfig()
    frames = frame_signal(clip.samples, clip.sample_rate, detect.frame_ms)
    analyses = ordered_map(
        lambda item: analyze_frame(analytic_signal(item[1]), detect, item[0]),
        list(enumerate(frames)),
        threads,
    )
    logger.info(FRAMES_ANALYSED, len(analyses), sum(a.accepted for a in analyses))
    return analyses


def rejection_histogram(analyses: Sequence[FrameAnalysis]) -> Counter:
    "Rejection reasons with their parameters stripped, e.g. 'missing harmonics'."
    return Counter(
        analysis.reason.split(" (")[0].split(":")[0]
        for analysis in analyses if not analysis.accepted
    )


def ratio_cdf(
    analyses: Sequence[FrameAnalysis],
    snr_db: Sequence[float],
    out_path: Optional[str | Path] = None,
) -> List[dict]:
    """Empirical CDF rows (snr_db, ratio_kind, ratio, cdf) of the accepted frames."""
    accepted = [analysis for analysis in analyses if analysis.accepted]
    if not accepted:
        raise NoAcceptedFramesError(
            NO_ACCEPTED_FRAMES % (len(analyses), dict(rejection_histogram(analyses)))
        )
    rows = []
    for snr in snr_db:
        ratios = [
            ratio
            for analysis in accepted
            for ratio in analysis.ratios
            if ratio.snr_db == snr
        ]
        for kind in ("mse", "mcrlb"):
            values = np.sort([getattr(ratio, f"ratio_{kind}") for ratio in ratios])
            for index, value in enumerate(values, start=1):
                rows.append(
                    {
                        "snr_db": float(snr),
                        "ratio_kind": kind,
                        "ratio": float(value),
                        "cdf": index / values.size,
                    }
                )
    if out_path is not None:
        path = Path(out_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as buffer:
            writer = csv.writer(buffer)
            writer.writerow(CDF_COLUMNS)
            for row in rows:
                writer.writerow(
                    [repr(row["snr_db"]), row["ratio_kind"], repr(row["ratio"]), repr(row["cdf"])]
                )
    return rows


def write_frames(analyses: Sequence[FrameAnalysis], path: str | Path) -> Path:
    "One JSON document per frame."
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as buffer:
        for analysis in analyses:
            buffer.write(orjson.dumps(analysis.model_dump()) + b"\n")
    return path
