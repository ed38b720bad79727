from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from src.config import VERSION


class RunManifest(BaseModel):
    """Written next to every output set; ``config`` alone reproduces the outputs."""

    command: str
    version: str = VERSION
    master_seed: Optional[int] = None
    config: Dict[str, Any] = Field(default_factory=dict)
    started_at: str
    finished_at: Optional[str] = None
    outputs: Dict[str, str] = Field(default_factory=dict)
