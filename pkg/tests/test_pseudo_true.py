import numpy as np
import pytest
from pydantic import ValidationError

from src.pseudo_true.schemas import PseudoTrueResult, SearchConfig
from src.pseudo_true.service import (
    fit_harmonic,
    optimality_gradient,
    pseudo_variance,
    scan_fundamental,
    search_window,
    solve_pseudo_true,
    waveform_diff,
)
from src.signals.schemas import HarmonicParams, TrueSignalSpec, circular_distance
from src.signals.service import model_jacobian, synthesize_true
from src.utils import bracketed_root
from tests.conftest import REFERENCE_N, make_spec


def test_harmonic_truth_is_its_own_pseudo_true(harmonic_spec, harmonic_pseudo):
    theta0 = harmonic_pseudo.theta0
    assert theta0.omega == pytest.approx(harmonic_spec.frequencies[0], abs=1e-9)
    np.testing.assert_allclose(theta0.amplitudes, harmonic_spec.amplitudes, rtol=1e-6)
    for fitted, true in zip(theta0.phases, harmonic_spec.phases):
        assert circular_distance(fitted, true) < 1e-6
    assert harmonic_pseudo.pseudo_variance == pytest.approx(
        harmonic_spec.noise_variance, rel=1e-10
    )


def test_single_sinusoid_is_exact():
    spec = TrueSignalSpec(amplitudes=[0.7], phases=[2.0], frequencies=[1.3], noise_variance=0.1)
    result = solve_pseudo_true(spec, 64)
    assert result.theta0.omega == pytest.approx(1.3, abs=1e-10)
    assert result.residual_energy < 1e-18
    assert result.converged


def test_bracketed_root_widens_until_sign_change():
    root = bracketed_root(lambda x: np.tanh(x - 1.3), 1.3 + 2e-9, 1e-12, 0.0, 3.0)
    assert root == pytest.approx(1.3, abs=1e-14)
    assert bracketed_root(lambda x: x + 5.0, 1.0, 1e-3, 0.0, 2.0) is None


def test_variance_decomposition(stiff_spec, stiff_pseudo):
    recomputed = pseudo_variance(stiff_spec, stiff_pseudo.theta0, REFERENCE_N)
    assert stiff_pseudo.pseudo_variance == pytest.approx(
        stiff_spec.noise_variance + stiff_pseudo.residual_energy / REFERENCE_N, rel=1e-14
    )
    assert recomputed == pytest.approx(stiff_pseudo.pseudo_variance, rel=1e-12)
    assert stiff_pseudo.pseudo_variance > stiff_spec.noise_variance


def test_first_order_optimality(stiff_spec, stiff_pseudo):
    theta0 = stiff_pseudo.theta0
    gradient = optimality_gradient(theta0, stiff_spec, REFERENCE_N)
    scale = np.sqrt(stiff_pseudo.residual_energy) * np.linalg.norm(
        model_jacobian(theta0, REFERENCE_N), axis=0
    )
    assert np.max(np.abs(gradient) / scale) < 1e-6


def test_residual_trace_is_monotone(stiff_pseudo):
    trace = np.asarray(stiff_pseudo.residual_trace)
    assert trace.size > 1
    assert np.all(np.diff(trace) <= 0)


@pytest.mark.parametrize("perturbation", [-0.05, -0.02, 0.01, 0.03, 0.05])
def test_unique_under_perturbed_hints(stiff_spec, stiff_pseudo, perturbation):
    hint = stiff_spec.frequencies[0] * (1 + perturbation)
    result = solve_pseudo_true(stiff_spec, REFERENCE_N, SearchConfig(omega_hint=hint))
    assert result.theta0.omega == pytest.approx(stiff_pseudo.theta0.omega, abs=1e-9)


def _brute_force_omega(spec: TrueSignalSpec, count: int) -> tuple:
    omega = spec.frequencies[0]
    omegas, cost = scan_fundamental(
        synthesize_true(spec, REFERENCE_N), spec.K, 0.9 * omega, 1.1 * omega, count
    )
    return omegas[int(np.argmin(cost))], omegas[1] - omegas[0]


def test_matches_brute_force_grid(stiff_spec, stiff_pseudo):
    best, step = _brute_force_omega(stiff_spec, 20_001)
    assert abs(stiff_pseudo.theta0.omega - best) <= step


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_matches_million_point_grid(seed):
    rng = np.random.default_rng(seed)
    spec = make_spec(beta=10 ** rng.uniform(-6, -3), seed=seed)
    best, step = _brute_force_omega(spec, 1_000_000)
    assert abs(solve_pseudo_true(spec, REFERENCE_N).theta0.omega - best) <= step


def test_waveform_diff_zero_for_identical_waveforms(harmonic_spec):
    params = HarmonicParams(
        omega=harmonic_spec.frequencies[0],
        phases=harmonic_spec.phases,
        amplitudes=harmonic_spec.amplitudes,
    )
    np.testing.assert_allclose(waveform_diff(params, harmonic_spec, 100), 0, atol=1e-12)


def test_waveform_diff_single_sample(stiff_spec):
    params = HarmonicParams(omega=0.05, phases=[0.5] * 10, amplitudes=[1.0] * 10)
    expected = np.sum(params.complex_amplitudes) - np.sum(stiff_spec.complex_amplitudes)
    assert waveform_diff(params, stiff_spec, 1)[0] == pytest.approx(expected)


def test_naive_harmonic_residual_energy(stiff_spec):
    params = HarmonicParams(
        omega=stiff_spec.frequencies[0] / np.sqrt(1 + 1e-4),
        phases=stiff_spec.phases,
        amplitudes=stiff_spec.amplitudes,
    )
    t = np.arange(REFERENCE_N)
    model = sum(
        r * np.exp(1j * (phi + k * params.omega * t))
        for k, (r, phi) in enumerate(zip(params.amplitudes, params.phases), start=1)
    )
    truth = sum(
        r * np.exp(1j * (phi + nu * t))
        for r, phi, nu in zip(stiff_spec.amplitudes, stiff_spec.phases, stiff_spec.frequencies)
    )
    difference = waveform_diff(params, stiff_spec, REFERENCE_N)
    assert np.sum(np.abs(difference) ** 2) == pytest.approx(np.sum(np.abs(model - truth) ** 2), rel=1e-10)
    assert np.sum(np.abs(difference) ** 2) > 0


def test_waveform_diff_rejects_order_mismatch(stiff_spec):
    params = HarmonicParams(omega=0.05, phases=[0.0], amplitudes=[1.0])
    with pytest.raises(ValueError):
        waveform_diff(params, stiff_spec, 10)


def test_pseudo_variance_arithmetic():
    spec = TrueSignalSpec(amplitudes=[1.0], phases=[0.0], frequencies=[0.3])
    params = HarmonicParams(omega=0.3, phases=[0.0], amplitudes=[1.1])
    assert pseudo_variance(spec, params, 100) == pytest.approx(0.01)


def test_too_few_samples(stiff_spec):
    with pytest.raises(ValueError):
        solve_pseudo_true(stiff_spec, 2 * stiff_spec.K)


def test_empty_window():
    with pytest.raises(ValueError):
        search_window(SearchConfig(window=(0.3, 0.2)), 3)


def test_noisy_fit_shares_the_solver(stiff_spec, stiff_pseudo):
    search = SearchConfig(omega_hint=stiff_spec.frequencies[0])
    series = synthesize_true(stiff_spec, REFERENCE_N)
    first, second = fit_harmonic(series, stiff_spec.K, search), fit_harmonic(series, stiff_spec.K, search)
    assert first.omega == second.omega
    assert first.omega == pytest.approx(stiff_pseudo.theta0.omega, abs=1e-9)


def test_pseudo_variance_never_below_true(stiff_pseudo):
    with pytest.raises(ValidationError):
        PseudoTrueResult(
            **{**stiff_pseudo.model_dump(), "pseudo_variance": stiff_pseudo.true_variance / 2}
        )
