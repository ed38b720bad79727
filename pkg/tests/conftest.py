from typing import Callable

import numpy as np
import pytest
from httpx import AsyncClient, ASGITransport

from src.config import DEFAULT_K, DEFAULT_OMEGA, TWO_PI
from src.main import app
from src.pseudo_true.schemas import PseudoTrueResult
from src.pseudo_true.service import solve_pseudo_true
from src.signals.schemas import StiffnessLaw, TrueSignalSpec
from src.signals.service import default_amplitudes, spec_from_law
from src.speech.utils import synthesize_voice, write_audio
from src.utils import snr_to_noise_variance

REFERENCE_N = 200
REFERENCE_SNR_DB = 10.0
REFERENCE_BETA = 1e-4


def make_spec(
    beta: float = 0.0,
    snr_db: float = REFERENCE_SNR_DB,
    K: int = DEFAULT_K,
    omega: float = DEFAULT_OMEGA,
    seed: int = 0,
) -> TrueSignalSpec:
    amplitudes = default_amplitudes(K)
    phases = np.random.default_rng(seed).uniform(0, TWO_PI, K)
    return spec_from_law(
        StiffnessLaw(omega=omega, beta=beta),
        amplitudes.tolist(),
        phases.tolist(),
        snr_to_noise_variance(amplitudes, snr_db),
    )


@pytest.fixture(scope="session")
def harmonic_spec() -> TrueSignalSpec:
    return make_spec(beta=0.0)


@pytest.fixture(scope="session")
def stiff_spec() -> TrueSignalSpec:
    return make_spec(beta=REFERENCE_BETA)


@pytest.fixture(scope="session")
def stiff_pseudo(stiff_spec: TrueSignalSpec) -> PseudoTrueResult:
    return solve_pseudo_true(stiff_spec, REFERENCE_N)


@pytest.fixture(scope="session")
def harmonic_pseudo(harmonic_spec: TrueSignalSpec) -> PseudoTrueResult:
    return solve_pseudo_true(harmonic_spec, REFERENCE_N)


@pytest.fixture
async def ac():
    async with AsyncClient(transport=ASGITransport(app), base_url="http://test") as ac:
        yield ac


@pytest.fixture
def wav_factory(tmp_path) -> Callable[..., str]:
    def factory(name: str = "voice.wav", sample_rate: int = 20000, duration: float = 0.256, **voice) -> str:
        path = tmp_path / name
        series = synthesize_voice(sample_rate, duration, **voice)
        write_audio(str(path), series, sample_rate)
        return str(path)

    return factory
