import numpy as np
import pytest
from pydantic import ValidationError

from src.signals.exceptions import AliasingError
from src.signals.schemas import (
    HarmonicParams,
    OffsetLaw,
    StiffnessLaw,
    TrueSignalSpec,
    circular_distance,
    wrap_phase,
)
from src.signals.service import (
    default_amplitudes,
    finite_difference_errors,
    frequencies_from_law,
    hessian_contraction,
    model_gradient,
    model_hessian,
    model_jacobian,
    synthesize_model,
    synthesize_true,
)
from src.utils import derive_seed, noise_variance_to_snr, snr_to_noise_variance
from tests.conftest import make_spec


def test_stiffness_law_without_stiffness_is_harmonic():
    frequencies = frequencies_from_law(StiffnessLaw(omega=np.pi / 40, beta=0.0), 3)
    np.testing.assert_allclose(frequencies, [np.pi / 40, 2 * np.pi / 40, 3 * np.pi / 40])


def test_stiffness_law_tenth_partial():
    frequencies = frequencies_from_law(StiffnessLaw(omega=np.pi / 40, beta=1e-4), 10)
    assert frequencies[9] == pytest.approx(np.pi / 4 * np.sqrt(1.01), rel=1e-14)


def test_offset_law():
    frequencies = frequencies_from_law(OffsetLaw(omega=0.1, offsets=[0.0, 0.01]), 2)
    np.testing.assert_allclose(frequencies, [0.1, 0.21])


def test_offset_law_length_mismatch():
    with pytest.raises(ValueError):
        frequencies_from_law(OffsetLaw(omega=0.1, offsets=[0.0]), 2)


def test_aliasing_names_the_order():
    with pytest.raises(AliasingError) as info:
        frequencies_from_law(StiffnessLaw(omega=1.0, beta=0.0), 7)
    assert info.value.order == 7


def test_stiffness_law_rejects_aliasing_with_max_order():
    with pytest.raises(ValidationError):
        StiffnessLaw(omega=1.0, beta=0.0, max_order=7)


@pytest.mark.parametrize(
    "fields",
    [
        dict(amplitudes=[1.0, -1.0], phases=[0, 0], frequencies=[0.1, 0.2]),
        dict(amplitudes=[1.0, 1.0], phases=[0, 0], frequencies=[0.2, 0.1]),
        dict(amplitudes=[1.0], phases=[0], frequencies=[7.0]),
        dict(amplitudes=[1.0], phases=[0, 1], frequencies=[0.1]),
        dict(amplitudes=[1.0], phases=[0], frequencies=[0.1], noise_variance=-1.0),
    ],
)
def test_true_signal_spec_invariants(fields):
    with pytest.raises(ValidationError):
        TrueSignalSpec(**fields)


def test_harmonic_params_reject_aliasing():
    with pytest.raises(ValidationError):
        HarmonicParams(omega=1.0, phases=[0.0] * 7, amplitudes=[1.0] * 7)


def test_harmonic_params_vector_ordering():
    params = HarmonicParams(omega=0.1, phases=[0.1, 0.2], amplitudes=[1.0, 2.0])
    np.testing.assert_allclose(params.to_vector(), [0.1, 0.1, 0.2, 1.0, 2.0])
    assert HarmonicParams.from_vector(params.to_vector()) == params


def test_phases_are_wrapped():
    assert wrap_phase(-np.pi / 2) == pytest.approx(3 * np.pi / 2)
    assert circular_distance(0.1, 2 * np.pi - 0.1) == pytest.approx(0.2)


def test_quarter_step_circle():
    spec = TrueSignalSpec(amplitudes=[1.0], phases=[0.0], frequencies=[np.pi / 2])
    np.testing.assert_allclose(synthesize_true(spec, 4), [1, 1j, -1, -1j], atol=1e-15)


def test_mean_power_matches_finite_sample_cross_terms():
    spec = make_spec(beta=1e-4)
    N = 200
    x = synthesize_true(spec, N)
    c = spec.complex_amplitudes
    gaps = np.subtract.outer(spec.frequencies, spec.frequencies)
    gram = np.mean(np.exp(1j * gaps[None, :, :] * np.arange(N)[:, None, None]), axis=0)
    expected = float(np.real(c @ gram @ np.conj(c)))
    assert np.mean(np.abs(x) ** 2) == pytest.approx(expected, rel=1e-10)


def test_mean_power_over_whole_periods_is_total_amplitude_power():
    # 800 samples hold 20 periods of pi/40, so every cross term cancels.
    spec = make_spec(beta=0.0)
    x = synthesize_true(spec, 800)
    assert np.mean(np.abs(x) ** 2) == pytest.approx(spec.power, rel=1e-9)


def test_noise_variance_from_seed():
    spec = TrueSignalSpec(amplitudes=[1e-300], phases=[0.0], frequencies=[0.1], noise_variance=1.0)
    noise = synthesize_true(spec, 100_000, seed=3)
    assert np.var(noise.real) + np.var(noise.imag) == pytest.approx(1.0, rel=0.02)
    np.testing.assert_array_equal(noise, synthesize_true(spec, 100_000, seed=3))


def test_noise_free_without_seed():
    spec = make_spec(beta=1e-4)
    np.testing.assert_array_equal(synthesize_true(spec, 50), synthesize_true(spec, 50))


def test_model_matches_true_signal_at_zero_stiffness():
    spec = make_spec(beta=0.0)
    params = HarmonicParams(omega=spec.frequencies[0], phases=spec.phases, amplitudes=spec.amplitudes)
    np.testing.assert_allclose(synthesize_model(params, 200), synthesize_true(spec, 200), atol=1e-12)


def test_default_amplitudes_profile():
    amplitudes = default_amplitudes(10)
    assert amplitudes[4] == pytest.approx(1.0)
    assert amplitudes[0] == pytest.approx(np.exp(-16 / 20))


def test_derivatives_against_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(20):
        params = HarmonicParams(
            omega=rng.uniform(0.01, 0.5),
            phases=rng.uniform(0, 2 * np.pi, 4).tolist(),
            amplitudes=rng.uniform(0.5, 2.0, 4).tolist(),
        )
        gradient, hessian = finite_difference_errors(params, float(rng.uniform(0, 40)))
        assert gradient < 1e-5
        assert hessian < 1e-4


def test_jacobian_rows_match_gradients():
    params = HarmonicParams(omega=0.2, phases=[0.3, 1.0], amplitudes=[1.0, 0.5])
    jacobian = model_jacobian(params, 5)
    hessians = np.array([model_hessian(params, t) for t in range(5)])
    weights = np.arange(5) * (1 - 0.5j)
    expected = np.sum(np.real(np.conj(weights)[:, None, None] * hessians), axis=0)
    np.testing.assert_allclose(hessian_contraction(params, weights), expected, atol=1e-12)
    assert jacobian.shape == (5, 5)
    np.testing.assert_allclose(jacobian[:, 3], np.exp(1j * (0.3 + 0.2 * np.arange(5))))


def test_snr_is_total_power_over_noise():
    amplitudes = [1.0, 1.0, np.sqrt(2.0)]
    assert snr_to_noise_variance(amplitudes, 10.0) == pytest.approx(0.4)
    assert noise_variance_to_snr(amplitudes, 0.4) == pytest.approx(10.0)
    assert snr_to_noise_variance(amplitudes, -10.0) == pytest.approx(40.0)


def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(1, 0, 5) == derive_seed(1, 0, 5)
    assert len({derive_seed(1, axis, trial) for axis in range(3) for trial in range(100)}) == 300


def test_true_signal_is_conjugate_symmetric():
    spec = make_spec(beta=1e-4, K=3)
    mirrored = TrueSignalSpec(
        amplitudes=spec.amplitudes[::-1],
        phases=[-phase for phase in spec.phases[::-1]],
        frequencies=[2 * np.pi - frequency for frequency in spec.frequencies[::-1]],
    )
    np.testing.assert_allclose(
        synthesize_true(mirrored, 200), np.conj(synthesize_true(spec, 200)), atol=1e-10
    )


def test_model_is_conjugate_symmetric():
    params = HarmonicParams(omega=0.7, phases=[1.2], amplitudes=[0.8])
    mirrored = HarmonicParams(omega=2 * np.pi - 0.7, phases=[-1.2], amplitudes=[0.8])
    np.testing.assert_allclose(
        synthesize_model(mirrored, 100), np.conj(synthesize_model(params, 100)), atol=1e-10
    )


def test_true_signal_is_sum_of_single_sinusoids():
    spec = make_spec(beta=1e-4, K=4)
    parts = [
        synthesize_true(
            TrueSignalSpec(amplitudes=[amplitude], phases=[phase], frequencies=[frequency]), 150
        )
        for amplitude, phase, frequency in zip(spec.amplitudes, spec.phases, spec.frequencies)
    ]
    np.testing.assert_allclose(synthesize_true(spec, 150), np.sum(parts, axis=0), atol=1e-12)


def test_gradient_at_origin_for_one_sinusoid():
    params = HarmonicParams(omega=0.7, phases=[0.0], amplitudes=[1.0])
    np.testing.assert_array_equal(model_gradient(params, 0), [0, 1j, 1])


def test_hessian_has_no_cross_order_terms():
    params = HarmonicParams(omega=0.3, phases=[0.2, 1.1, 2.5], amplitudes=[1.0, 0.6, 1.4])
    K = params.K
    for t in (0.0, 3.0, 17.0):
        hessian = model_hessian(params, t)
        np.testing.assert_array_equal(hessian, hessian.T)
        for k in range(K):
            for l in range(K):
                assert hessian[1 + K + k, 1 + K + l] == 0
                if k != l:
                    assert hessian[1 + k, 1 + l] == 0
                    assert hessian[1 + k, 1 + K + l] == 0
    assert model_hessian(params, 0.0)[0, 0] == 0
