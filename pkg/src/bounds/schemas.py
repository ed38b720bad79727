from typing import Any, Dict, List, Literal, Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import DEFAULT_AMPLITUDE_WIDTH, DEFAULT_SAMPLES, TWO_PI
from src.signals.schemas import OffsetLaw, StiffnessLaw, TrueSignalSpec
from src.signals.service import default_amplitudes, spec_from_law
from src.utils import snr_to_noise_variance
from .exceptions import LAW_REQUIRED, NOISE_REQUIRED, PROFILE_LENGTH


UnstructuredVariant = Literal["exact", "asymptotic"]


class SandwichMatrices(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    F: np.ndarray
    F_tilde: np.ndarray
    A: np.ndarray
    true_variance: float = Field(..., gt=0)
    pseudo_variance: float = Field(..., gt=0)
    condition: float


class AsymptoticTerms(BaseModel):
    """Terms of the closed-form bound; the arrowhead route also fills the intermediates."""

    model_config = ConfigDict(frozen=True)

    C: float = Field(..., gt=0)
    Z: float
    D: float
    E: float
    phase_diffs: List[float]
    freq_diffs: List[float]
    eta_model: Optional[float] = None
    eta_residual: Optional[float] = None
    d: Optional[List[float]] = None
    z_model: Optional[List[float]] = None
    z_residual: Optional[List[float]] = None
    rho: Optional[float] = None
    u_model: Optional[List[float]] = None
    u_residual: Optional[List[float]] = None

    @property
    def denominator(self) -> float:
        return self.C - self.E + self.Z + self.D

    def bound(self, true_variance: float) -> float:
        return true_variance * (self.C + self.E) / self.denominator**2

    def arrowhead(self) -> NDArray[np.float64]:
        """Limit shape [[eta, z^T], [z, diag(d)]] of the score outer product."""
        d = np.asarray(self.d)
        z = np.asarray(self.z_model)
        matrix = np.diag(np.concatenate(([self.eta_model], d)))
        matrix[0, 1:] = matrix[1:, 0] = z
        return matrix


class BoundReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: int
    omega0: float
    true_variance: float
    pseudo_variance: float
    mcrlb_exact_diag: List[float]
    mcrlb_asymptotic_omega: float
    crlb_harmonic_omega: float
    crlb_harmonic_omega_asymptotic: float
    crlb_unstructured_freqs: List[float]
    bias: List[float]
    mse_lower_freqs: List[float]
    unstructured: UnstructuredVariant = "exact"

    @property
    def mcrlb_exact_omega(self) -> float:
        return self.mcrlb_exact_diag[0]

    def to_row(self) -> Dict[str, float]:
        row = {
            "samples": self.samples,
            "omega0": self.omega0,
            "true_variance": self.true_variance,
            "pseudo_variance": self.pseudo_variance,
            "mcrlb_exact_omega": self.mcrlb_exact_omega,
            "mcrlb_asymp_omega": self.mcrlb_asymptotic_omega,
            "crlb_harmonic_omega": self.crlb_harmonic_omega,
        }
        for order, value in enumerate(self.crlb_unstructured_freqs, start=1):
            row[f"crlb_sine_{order}"] = value
        for order, value in enumerate(self.bias, start=1):
            row[f"bias_{order}"] = value
        for order, value in enumerate(self.mse_lower_freqs, start=1):
            row[f"mse_lb_{order}"] = value
        return row

    def to_document(self) -> Dict[str, Any]:
        "The flat row plus the full exact diagonal; JSON and CSV share field names."
        return {
            **self.to_row(),
            "crlb_harmonic_omega_asymptotic": self.crlb_harmonic_omega_asymptotic,
            "mcrlb_exact_diag": self.mcrlb_exact_diag,
            "unstructured": self.unstructured,
        }


class BoundDocument(BaseModel):
    """Serialized ``BoundReport``; per-harmonic ``crlb_sine_k``, ``bias_k`` and ``mse_lb_k`` ride as extra keys."""

    model_config = ConfigDict(extra="allow")

    samples: int
    omega0: float
    true_variance: float
    pseudo_variance: float
    mcrlb_exact_omega: float
    mcrlb_asymp_omega: float
    crlb_harmonic_omega: float
    crlb_harmonic_omega_asymptotic: float
    mcrlb_exact_diag: List[float]
    unstructured: UnstructuredVariant


class BoundsRequest(BaseModel):
    """Signal description shared by the HTTP endpoint and the ``bounds`` command."""

    K: int = Field(..., ge=1, examples=[10])
    omega: float = Field(..., gt=0, lt=TWO_PI, examples=[0.0785398])
    beta: Optional[float] = Field(None, ge=0, examples=[1e-4])
    offsets: Optional[List[float]] = Field(None)
    N: int = Field(DEFAULT_SAMPLES, ge=1, examples=[200])
    snr_db: Optional[float] = Field(None, examples=[10.0])
    sigma2: Optional[float] = Field(None, gt=0)
    amplitudes: Optional[List[float]] = Field(None)
    phases: Optional[List[float]] = Field(None)
    amplitude_width: float = Field(DEFAULT_AMPLITUDE_WIDTH, gt=0)
    seed: int = Field(0, ge=0)
    unstructured: UnstructuredVariant = "exact"

    @model_validator(mode="after")
    def check_choices(self) -> "BoundsRequest":
        if self.beta is not None and self.offsets is not None:
            raise ValueError(LAW_REQUIRED)
        if (self.snr_db is None) == (self.sigma2 is None):
            raise ValueError(NOISE_REQUIRED)
        for name in ("offsets", "amplitudes", "phases"):
            values = getattr(self, name)
            if values is not None and len(values) != self.K:
                raise ValueError(PROFILE_LENGTH % (name, len(values), self.K))
        return self

    def to_spec(self) -> TrueSignalSpec:
        if self.offsets is not None:
            law = OffsetLaw(omega=self.omega, offsets=self.offsets)
        else:
            law = StiffnessLaw(omega=self.omega, beta=self.beta or 0.0)
        amplitudes = (
            np.asarray(self.amplitudes)
            if self.amplitudes is not None
            else default_amplitudes(self.K, self.amplitude_width)
        )
        if self.phases is not None:
            phases = np.asarray(self.phases)
        else:
            phases = np.random.default_rng(self.seed).uniform(0, TWO_PI, self.K)
        sigma2 = (
            self.sigma2
            if self.sigma2 is not None
            else snr_to_noise_variance(amplitudes, self.snr_db)
        )
        return spec_from_law(law, amplitudes.tolist(), phases.tolist(), sigma2)
