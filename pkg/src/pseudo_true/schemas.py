from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import settings
from src.signals.schemas import HarmonicParams
from .exceptions import PSEUDO_BELOW_TRUE


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_hint: Optional[float] = Field(None, gt=0)
    window: Optional[Tuple[float, float]] = Field(None)
    grid_density: int = Field(settings.GRID_DENSITY, ge=1)
    tolerance: float = Field(settings.REFINE_TOL, gt=0)
    max_iterations: int = Field(500, ge=1)

    def with_hint(self, omega_hint: Optional[float]) -> "SearchConfig":
        return self.model_copy(update={"omega_hint": omega_hint})


class PseudoTrueResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta0: HarmonicParams
    pseudo_variance: float = Field(..., ge=0)
    true_variance: float = Field(..., ge=0)
    residual_energy: float = Field(..., ge=0)
    samples: int = Field(..., ge=1)
    converged: bool
    iterations: int = Field(..., ge=0)
    residual_trace: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def variance_decomposition(self) -> "PseudoTrueResult":
        if self.pseudo_variance < self.true_variance:
            raise ValueError(
                PSEUDO_BELOW_TRUE % (self.pseudo_variance, self.true_variance)
            )
        return self
