import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from src.config import DEFAULT_AMPLITUDE_WIDTH, TWO_PI
from .exceptions import INVALID_SAMPLES, OFFSETS_LENGTH, AliasingError
from .schemas import (
    ComplexSeries,
    HarmonicParams,
    InharmonicityLaw,
    OffsetLaw,
    StiffnessLaw,
    TrueSignalSpec,
)


logger = logging.getLogger(__name__)

SeedLike = Optional[int | np.random.Generator]


def default_amplitudes(
    K: int, width: float = DEFAULT_AMPLITUDE_WIDTH
) -> NDArray[np.float64]:
    """Gaussian amplitude profile centred on order K/2."""
    orders = np.arange(1, K + 1, dtype=float)
    return np.exp(-((orders - K / 2) ** 2) / width)


def frequencies_from_law(law: InharmonicityLaw, K: int) -> NDArray[np.float64]:
    orders = np.arange(1, K + 1, dtype=float)
    match law:
        case OffsetLaw():
            if len(law.offsets) != K:
                raise ValueError(OFFSETS_LENGTH % (len(law.offsets), K))
            frequencies = law.omega * orders + np.asarray(law.offsets)
        case StiffnessLaw():
            frequencies = law.omega * orders * np.sqrt(1 + law.beta * orders**2)
    for order, frequency in enumerate(frequencies, start=1):
        if frequency >= TWO_PI:
            raise AliasingError(order, float(frequency))
    return frequencies


def spec_from_law(
    law: InharmonicityLaw,
    amplitudes: Sequence[float],
    phases: Sequence[float],
    noise_variance: float = 0.0,
) -> TrueSignalSpec:
    frequencies = frequencies_from_law(law, len(amplitudes))
    return TrueSignalSpec(
        amplitudes=list(amplitudes),
        phases=list(phases),
        frequencies=frequencies.tolist(),
        noise_variance=noise_variance,
    )


def sample_times(N: int) -> NDArray[np.float64]:
    if N < 1:
        raise ValueError(INVALID_SAMPLES % N)
    return np.arange(N, dtype=float)


def complex_noise(N: int, variance: float, seed: SeedLike) -> ComplexSeries:
    """Circularly symmetric white noise, variance split evenly over real and imaginary parts."""
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((2, N))
    return np.sqrt(variance / 2) * (draws[0] + 1j * draws[1])


def synthesize_true(
    spec: TrueSignalSpec, N: int, seed: SeedLike = None
) -> ComplexSeries:
    t = sample_times(N)
    atoms = np.exp(1j * np.outer(t, spec.frequencies))
    clean = atoms @ spec.complex_amplitudes
    if seed is None or spec.noise_variance == 0:
        return clean
    return clean + complex_noise(N, spec.noise_variance, seed)


def harmonic_atoms(omega: float, K: int, N: int) -> NDArray[np.complex128]:
    "N x K matrix with columns exp(i k omega t)."
    t = sample_times(N)
    return np.exp(1j * omega * np.outer(t, np.arange(1, K + 1)))


def synthesize_model(params: HarmonicParams, N: int) -> ComplexSeries:
    return harmonic_atoms(params.omega, params.K, N) @ params.complex_amplitudes


def model_jacobian(params: HarmonicParams, N: int) -> NDArray[np.complex128]:
    """Rows are the complex gradients of the model waveform for t = 0..N-1."""
    t = sample_times(N)[:, None]
    k = params.orders[None, :]
    r = np.asarray(params.amplitudes)[None, :]
    components = np.exp(1j * (np.asarray(params.phases)[None, :] + k * params.omega * t))
    d_omega = np.sum(1j * k * t * r * components, axis=1, keepdims=True)
    d_phase = 1j * r * components
    return np.hstack((d_omega, d_phase, components))


def model_gradient(params: HarmonicParams, t: float) -> NDArray[np.complex128]:
    k = params.orders
    r = np.asarray(params.amplitudes)
    components = np.exp(1j * (np.asarray(params.phases) + k * params.omega * t))
    d_omega = np.sum(1j * k * t * r * components)
    return np.concatenate(([d_omega], 1j * r * components, components))


def _hessian_blocks(params: HarmonicParams, t: NDArray[np.float64]):
    """Per-sample nonzero second derivatives; arrays of shape (T,) or (T, K)."""
    t = np.asarray(t, dtype=float)[:, None]
    k = params.orders[None, :]
    r = np.asarray(params.amplitudes)[None, :]
    components = np.exp(1j * (np.asarray(params.phases)[None, :] + k * params.omega * t))
    kt = k * t
    omega_omega = np.sum(-(kt**2) * r * components, axis=1)
    omega_phase = -kt * r * components
    omega_amplitude = 1j * kt * components
    phase_phase = -r * components
    phase_amplitude = 1j * components
    return omega_omega, omega_phase, omega_amplitude, phase_phase, phase_amplitude


def _assemble_hessian(K: int, omega_omega, omega_phase, omega_amplitude, phase_phase, phase_amplitude):
    phase = np.arange(1, K + 1)
    amplitude = phase + K
    hessian = np.zeros((2 * K + 1, 2 * K + 1), dtype=np.result_type(omega_omega, complex))
    hessian[0, 0] = omega_omega
    hessian[0, phase] = hessian[phase, 0] = omega_phase
    hessian[0, amplitude] = hessian[amplitude, 0] = omega_amplitude
    hessian[phase, phase] = phase_phase
    hessian[phase, amplitude] = hessian[amplitude, phase] = phase_amplitude
    return hessian


def model_hessian(params: HarmonicParams, t: float) -> NDArray[np.complex128]:
    blocks = _hessian_blocks(params, np.array([t]))
    blocks = [block[0] for block in blocks]
    return _assemble_hessian(params.K, *blocks)


def hessian_contraction(
    params: HarmonicParams, weights: ComplexSeries
) -> NDArray[np.float64]:
    """Sum over t of Re(conj(w_t) * Hessian_t), i.e. w^R H^R + w^I H^I."""
    weights = np.asarray(weights)
    blocks = _hessian_blocks(params, sample_times(weights.size))
    conj = np.conj(weights)
    reduced = [np.real(conj @ block) for block in blocks]
    return _assemble_hessian(params.K, *reduced).real


def model_value(params: HarmonicParams, t: float) -> complex:
    return complex(np.sum(params.complex_amplitudes * np.exp(1j * params.orders * params.omega * t)))


def finite_difference_errors(
    params: HarmonicParams, t: float, step: float = 1e-6
) -> Tuple[float, float]:
    """Relative errors of the analytic gradient and Hessian against central differences."""
    vector = params.to_vector()
    fd_gradient = np.empty(vector.size, dtype=complex)
    fd_hessian = np.empty((vector.size, vector.size), dtype=complex)
    for index in range(vector.size):
        shift = np.zeros(vector.size)
        shift[index] = step
        upper = HarmonicParams.from_vector(vector + shift)
        lower = HarmonicParams.from_vector(vector - shift)
        fd_gradient[index] = (model_value(upper, t) - model_value(lower, t)) / (2 * step)
        fd_hessian[:, index] = (model_gradient(upper, t) - model_gradient(lower, t)) / (
            2 * step
        )
    gradient, hessian = model_gradient(params, t), model_hessian(params, t)
    return (
        float(np.linalg.norm(fd_gradient - gradient) / np.linalg.norm(gradient)),
        float(np.linalg.norm(fd_hessian - hessian) / np.linalg.norm(hessian)),
    )
