from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from src.config import (
    FRAME_MS,
    MAX_HARMONICS,
    MIN_HARMONICS,
    PEAK_THRESHOLD_DB,
    SPEECH_SNR_DB,
    settings,
)
from src.estimators.schemas import SinusoidEstimate


@dataclass(frozen=True)
class AudioClip:
    samples: NDArray[np.float64]
    sample_rate: int

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


class DetectConfig(BaseModel):
    """Peak picking, acceptance and bound evaluation settings for one frame."""

    model_config = ConfigDict(frozen=True)

    frame_ms: float = Field(FRAME_MS, gt=0)
    threshold_db: float = PEAK_THRESHOLD_DB
    dynamic_range_db: float = Field(30.0, gt=0)
    zero_padding: int = Field(4, ge=1)
    min_harmonics: int = Field(MIN_HARMONICS, ge=1)
    max_harmonics: int = Field(MAX_HARMONICS, ge=1)
    bound_samples: int = Field(settings.BOUND_SAMPLES, ge=1)
    snr_db: List[float] = Field(default_factory=lambda: list(SPEECH_SNR_DB), min_length=1)


class FrameRatio(BaseModel):
    model_config = ConfigDict(frozen=True)

    snr_db: float
    ratio_mse: float = Field(..., gt=0)
    ratio_mcrlb: float = Field(..., gt=0)


class FrameAnalysis(BaseModel):
    model_config = ConfigDict(frozen=True)

    frame_index: int
    K_detected: int = 0
    sinusoids: Optional[SinusoidEstimate] = None
    orders: List[int] = Field(default_factory=list)
    residual_variance: Optional[float] = None
    omega0: Optional[float] = None
    ratios: List[FrameRatio] = Field(default_factory=list)
    accepted: bool = False
    reason: Optional[str] = None

    def rejected(self, reason: str) -> "FrameAnalysis":
        return self.model_copy(update={"accepted": False, "reason": reason})
