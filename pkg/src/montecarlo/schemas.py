from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.bounds.schemas import UnstructuredVariant
from src.config import (
    DEFAULT_AMPLITUDE_WIDTH,
    DEFAULT_BETA,
    DEFAULT_K,
    DEFAULT_OMEGA,
    DEFAULT_SAMPLES,
    DEFAULT_SNR_DB,
    DEFAULT_TRIALS,
    TWO_PI,
    settings,
)
from .exceptions import NEGATIVE_BETA, TOO_FEW_SAMPLES


SweepAxis = Literal["beta", "samples", "snr"]


class SweepConfig(BaseModel):
    """A swept axis with the other two settings held fixed.

    Defaults: K=10, omega=pi/40, Gaussian amplitude
    profile of width 20, 1000 trials at N=200 and SNR 10 dB.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "sweep"
    axis: SweepAxis = "beta"
    values: List[float] = Field(default_factory=list)
    beta: float = Field(DEFAULT_BETA, ge=0)
    samples: int = Field(DEFAULT_SAMPLES, ge=1)
    snr_db: float = DEFAULT_SNR_DB
    trials: int = Field(DEFAULT_TRIALS, ge=1)
    K: int = Field(DEFAULT_K, ge=1)
    omega: float = Field(DEFAULT_OMEGA, gt=0, lt=TWO_PI)
    amplitude_width: float = Field(DEFAULT_AMPLITUDE_WIDTH, gt=0)
    master_seed: int = Field(0, ge=0)
    fixed_phases: bool = False
    run_unstructured: bool = True
    unstructured: UnstructuredVariant = "exact"
    phase_draws: int = Field(settings.PHASE_DRAWS, ge=1)
    threads: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_axis_values(self) -> "SweepConfig":
        for value in self.values:
            if self.axis == "beta" and value < 0:
                raise ValueError(NEGATIVE_BETA % value)
            if self.axis == "samples" and value < 3 * self.K:
                raise ValueError(TOO_FEW_SAMPLES % (3 * self.K, value))
        return self

    def point(self, value: float) -> Tuple[float, int, float]:
        "(beta, N, snr_db) at one axis value."
        match self.axis:
            case "beta":
                return value, self.samples, self.snr_db
            case "samples":
                return self.beta, int(value), self.snr_db
            case "snr":
                return self.beta, self.samples, value


class BoundCurvePoint(BaseModel):
    """Bounds at one axis value, averaged over the phase draws."""

    model_config = ConfigDict(frozen=True)

    axis_value: float
    phase_draws: int
    omega0: float = float("nan")
    bias_1: float = float("nan")
    mse_lb: float = float("nan")
    mcrlb_exact: float = float("nan")
    mcrlb_asymp: float = float("nan")
    crlb_sine: float = float("nan")
    crlb_harmonic: float = float("nan")
    error: Optional[str] = None


class EmpiricalStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    mse: float = float("nan")
    variance: float = float("nan")
    bias_sq: float = float("nan")
    stderr_mean: float = float("nan")
    n_converged: int = 0


class SweepPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    axis_value: float
    harmonic: EmpiricalStats
    unstructured: Optional[EmpiricalStats] = None
    bounds: BoundCurvePoint
    trial_seeds: List[int] = Field(default_factory=list)

    def to_row(self) -> dict:
        return {
            "axis_value": self.axis_value,
            "mse_empirical": self.harmonic.mse,
            "var_empirical": self.harmonic.variance,
            "bias_sq": self.harmonic.bias_sq,
            "mse_lb": self.bounds.mse_lb,
            "mcrlb_exact": self.bounds.mcrlb_exact,
            "mcrlb_asymp": self.bounds.mcrlb_asymp,
            "crlb_sine": self.bounds.crlb_sine,
            "crlb_harmonic": self.bounds.crlb_harmonic,
            "n_converged": self.harmonic.n_converged,
        }


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: SweepConfig
    points: List[SweepPoint] = Field(default_factory=list)
    phase_convention: str

    @property
    def failures(self) -> int:
        return sum(point.bounds.error is not None for point in self.points)
