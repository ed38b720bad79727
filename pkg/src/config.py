from math import pi

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    THREADS: int = 1
    CONDITION_LIMIT: float = 1e12
    GRID_DENSITY: int = 8
    REFINE_TOL: float = 1e-10
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "results"
    PHASE_DRAWS: int = 50
    BOUND_SAMPLES: int = 200

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="INHARMONICA_", extra="ignore"
    )


settings = Settings()

PROJECT_NAME = "inharmonica"
VERSION = "0.1.0"
API_PREFIX = "/api/v1"

TWO_PI = 2 * pi

# experiment defaults: ten partials at a quarter-band fundamental
DEFAULT_K = 10
DEFAULT_OMEGA = pi / 40
DEFAULT_AMPLITUDE_WIDTH = 20.0
DEFAULT_TRIALS = 1000
DEFAULT_SNR_DB = 10.0
DEFAULT_SAMPLES = 200
DEFAULT_BETA = 1e-4

# speech analysis
FRAME_MS = 25.6
MIN_HARMONICS = 3
MAX_HARMONICS = 10
PEAK_THRESHOLD_DB = 10.0
SPEECH_SNR_DB = (0.0, 10.0)

# unstructured refinement
COORDINATE_TOL = 1e-12
MAX_SWEEPS = 50

FIGURE_COLUMNS = (
    "axis_value",
    "mse_empirical",
    "var_empirical",
    "bias_sq",
    "mse_lb",
    "mcrlb_exact",
    "mcrlb_asymp",
    "crlb_sine",
    "crlb_harmonic",
    "n_converged",
)
CDF_COLUMNS = ("snr_db", "ratio_kind", "ratio", "cdf")

ORIGINS = ["*"]
ALLOW_METHODS = ["GET", "POST", "OPTIONS"]
ALLOW_HEADERS = ["Content-Type", "Accept"]
EXPOSE_HEADERS = ["X-Process-Time"]

SWAGGER_PARAMETERS = {
    "syntaxHighlight.theme": "obsidian",
    "tryItOutEnabled": True,
    "displayOperationId": True,
    "filter": True,
    "defaultModelsExpandDepth": -1,
    "docExpansion": "none",
    "displayRequestDuration": True,
}
