"""Signal-domain types.

The harmonic parameter vector is always flattened as
``[omega, phase_1 .. phase_K, amplitude_1 .. amplitude_K]``; every matrix
built in ``src.bounds`` uses this ordering.
"""
from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import TWO_PI
from .exceptions import (
    ALIASING,
    FREQUENCY_ORDER,
    FREQUENCY_RANGE,
    HARMONIC_ALIASING,
    LENGTH_MISMATCH,
    NON_POSITIVE_AMPLITUDE,
)


ComplexSeries = NDArray[np.complex128]


def wrap_phase(value: float) -> float:
    wrapped = float(np.mod(value, TWO_PI))
    return 0.0 if wrapped >= TWO_PI else wrapped


def circular_distance(a: float, b: float) -> float:
    diff = np.mod(a - b, TWO_PI)
    return float(min(diff, TWO_PI - diff))


def _check_amplitudes(values: List[float]) -> List[float]:
    for order, value in enumerate(values, start=1):
        if not value > 0:
            raise ValueError(NON_POSITIVE_AMPLITUDE % (value, order))
    return values


class TrueSignalSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    amplitudes: List[float] = Field(..., min_length=1)
    phases: List[float] = Field(..., min_length=1)
    frequencies: List[float] = Field(..., min_length=1)
    noise_variance: float = Field(0.0, ge=0)

    @field_validator("amplitudes")
    @classmethod
    def positive_amplitudes(cls, value: List[float]) -> List[float]:
        return _check_amplitudes(value)

    @field_validator("phases")
    @classmethod
    def wrap_phases(cls, value: List[float]) -> List[float]:
        return [wrap_phase(phase) for phase in value]

    @field_validator("frequencies")
    @classmethod
    def ordered_frequencies(cls, value: List[float]) -> List[float]:
        for order, frequency in enumerate(value, start=1):
            if not 0 <= frequency < TWO_PI:
                raise ValueError(FREQUENCY_RANGE % (frequency, order))
        for order in range(1, len(value)):
            if value[order] <= value[order - 1]:
                raise ValueError(
                    FREQUENCY_ORDER
                    % (order + 1, value[order], order, value[order - 1])
                )
        return value

    @model_validator(mode="after")
    def equal_lengths(self) -> "TrueSignalSpec":
        lengths = (len(self.amplitudes), len(self.phases), len(self.frequencies))
        if len(set(lengths)) != 1:
            raise ValueError(LENGTH_MISMATCH % lengths)
        return self

    @property
    def K(self) -> int:
        return len(self.amplitudes)

    @property
    def complex_amplitudes(self) -> NDArray[np.complex128]:
        return np.asarray(self.amplitudes) * np.exp(1j * np.asarray(self.phases))

    @property
    def power(self) -> float:
        return float(np.sum(np.square(self.amplitudes)))

    def with_noise(self, noise_variance: float) -> "TrueSignalSpec":
        return self.model_copy(update={"noise_variance": noise_variance})


class OffsetLaw(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["offset"] = "offset"
    omega: float = Field(..., gt=0, lt=TWO_PI)
    offsets: List[float] = Field(..., min_length=1)


class StiffnessLaw(BaseModel):
    """String-stiffness partials ``omega * k * sqrt(1 + beta * k**2)``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["stiffness"] = "stiffness"
    omega: float = Field(..., gt=0, lt=TWO_PI)
    beta: float = Field(0.0, ge=0)
    max_order: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def reject_aliasing(self) -> "StiffnessLaw":
        if self.max_order:
            orders = np.arange(1, self.max_order + 1)
            frequencies = self.omega * orders * np.sqrt(1 + self.beta * orders**2)
            aliased = np.flatnonzero(frequencies >= TWO_PI)
            if aliased.size:
                order = int(aliased[0]) + 1
                raise ValueError(ALIASING % (order, frequencies[order - 1]))
        return self


InharmonicityLaw = Annotated[Union[OffsetLaw, StiffnessLaw], Field(discriminator="kind")]


class HarmonicParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega: float = Field(..., gt=0, lt=TWO_PI)
    phases: List[float] = Field(..., min_length=1)
    amplitudes: List[float] = Field(..., min_length=1)

    @field_validator("amplitudes")
    @classmethod
    def positive_amplitudes(cls, value: List[float]) -> List[float]:
        return _check_amplitudes(value)

    @field_validator("phases")
    @classmethod
    def wrap_phases(cls, value: List[float]) -> List[float]:
        return [wrap_phase(phase) for phase in value]

    @model_validator(mode="after")
    def harmonics_below_nyquist(self) -> "HarmonicParams":
        if len(self.phases) != len(self.amplitudes):
            raise ValueError(
                LENGTH_MISMATCH
                % (len(self.amplitudes), len(self.phases), len(self.phases))
            )
        if self.omega * self.K >= TWO_PI:
            raise ValueError(HARMONIC_ALIASING % (self.omega, self.K))
        return self

    @property
    def K(self) -> int:
        return len(self.amplitudes)

    @property
    def size(self) -> int:
        return 2 * self.K + 1

    @property
    def orders(self) -> NDArray[np.float64]:
        return np.arange(1, self.K + 1, dtype=float)

    @property
    def complex_amplitudes(self) -> NDArray[np.complex128]:
        return np.asarray(self.amplitudes) * np.exp(1j * np.asarray(self.phases))

    def to_vector(self) -> NDArray[np.float64]:
        return np.concatenate(([self.omega], self.phases, self.amplitudes))

    @classmethod
    def from_vector(cls, vector: NDArray[np.float64]) -> "HarmonicParams":
        vector = np.asarray(vector, dtype=float)
        K = (vector.size - 1) // 2
        return cls(
            omega=float(vector[0]),
            phases=vector[1 : K + 1].tolist(),
            amplitudes=vector[K + 1 :].tolist(),
        )

    @classmethod
    def from_complex(
        cls, omega: float, amplitudes: NDArray[np.complex128]
    ) -> "HarmonicParams":
        return cls(
            omega=float(omega),
            phases=np.angle(amplitudes).tolist(),
            amplitudes=np.abs(amplitudes).tolist(),
        )
