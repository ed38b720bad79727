from typing import List, Optional, Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from src.signals.schemas import HarmonicParams, TrueSignalSpec, wrap_phase


class SinusoidEstimate(BaseModel):
    """Unstructured estimate, one (amplitude, phase, frequency) triple per sinusoid."""

    model_config = ConfigDict(frozen=True)

    amplitudes: List[float] = Field(..., min_length=1)
    phases: List[float] = Field(..., min_length=1)
    frequencies: List[float] = Field(..., min_length=1)

    @property
    def K(self) -> int:
        return len(self.frequencies)

    @classmethod
    def from_complex(
        cls, frequencies: NDArray[np.float64], amplitudes: NDArray[np.complex128]
    ) -> "SinusoidEstimate":
        order = np.argsort(frequencies)
        return cls(
            amplitudes=np.abs(amplitudes[order]).tolist(),
            phases=[wrap_phase(value) for value in np.angle(amplitudes[order])],
            frequencies=np.asarray(frequencies)[order].tolist(),
        )

    def to_spec(self, noise_variance: float = 0.0) -> TrueSignalSpec:
        return TrueSignalSpec(
            amplitudes=self.amplitudes,
            phases=self.phases,
            frequencies=self.frequencies,
            noise_variance=noise_variance,
        )


class EstimateResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: Union[HarmonicParams, SinusoidEstimate]
    residual_variance: float = Field(..., ge=0)
    converged: bool
    iterations: int = Field(0, ge=0)
    residual_trace: List[float] = Field(default_factory=list)
    reason: Optional[str] = None


class ConsistencyRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: int
    omega0: float
    mean_estimate: float
    gap: float
    stderr_mean: float
    trials: int
    converged: int
