"""Misspecified and classical Cramer-Rao bounds for harmonic approximations.

All variances are in rad^2/sample^2 and all matrices follow the ordering
``[omega, phases, amplitudes]``.
"""
import csv
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import orjson
from numpy.typing import NDArray

from src.exceptions import INVALID_NOISE, NumericalError
from src.pseudo_true.schemas import PseudoTrueResult, SearchConfig
from src.pseudo_true.service import solve_pseudo_true, waveform_diff
from src.signals.schemas import HarmonicParams, TrueSignalSpec
from src.signals.service import hessian_contraction, model_jacobian, sample_times
from src.utils import checked_inverse
from .exceptions import (
    COINCIDING_FREQUENCIES,
    COLLAPSED_AMPLITUDE,
    DEGENERATE_DENOMINATOR,
    SANDWICH_CONDITION,
    TOO_FEW_SAMPLES,
    UNKNOWN_UNSTRUCTURED,
    DegenerateBoundError,
)
from .schemas import AsymptoticTerms, BoundReport, SandwichMatrices, UnstructuredVariant


logger = logging.getLogger(__name__)

REPORT_NAME = "bounds"


def _require_noise(true_variance: float) -> None:
    if not true_variance > 0:
        raise ValueError(INVALID_NOISE % true_variance)


def _outer_real(jacobian: NDArray[np.complex128]) -> NDArray[np.float64]:
    "sum_t grad^R grad^R^T + grad^I grad^I^T"
    return np.real(jacobian.T @ jacobian.conj())


def build_sandwich(
    theta0: HarmonicParams, spec: TrueSignalSpec, N: int, sigma2: float
) -> SandwichMatrices:
    _require_noise(spec.noise_variance)
    true_variance = spec.noise_variance
    score = _outer_real(model_jacobian(theta0, N))
    F = 2 * true_variance / sigma2**2 * score
    F_tilde = 2 / sigma2 * hessian_contraction(theta0, waveform_diff(theta0, spec, N))
    A = -(sigma2 / true_variance) * F - F_tilde
    condition = float(np.linalg.cond(A))
    logger.debug(SANDWICH_CONDITION, condition)
    return SandwichMatrices(
        F=F,
        F_tilde=F_tilde,
        A=A,
        true_variance=true_variance,
        pseudo_variance=sigma2,
        condition=condition,
    )


def mcrlb_covariance(sm: SandwichMatrices, sigma2_true: float) -> NDArray[np.float64]:
    """sigma2_true * A^-1 (F / sigma2_true) A^-1, the sandwich bound on the covariance."""
    _require_noise(sigma2_true)
    A_inv = checked_inverse(sm.A, "A")
    return sigma2_true * (A_inv @ (sm.F / sigma2_true) @ A_inv)


def mcrlb_exact(sm: SandwichMatrices, sigma2_true: float) -> NDArray[np.float64]:
    return np.diag(mcrlb_covariance(sm, sigma2_true)).copy()


def crlb_harmonic(
    theta: HarmonicParams, sigma2_true: float, N: int
) -> NDArray[np.float64]:
    "Diagonal of the inverse Fisher information of a correctly specified harmonic model."
    _require_noise(sigma2_true)
    fisher = 2 / sigma2_true * _outer_real(model_jacobian(theta, N))
    return np.diag(checked_inverse(fisher, "harmonic Fisher information")).copy()


def crlb_harmonic_asymptotic(
    theta: HarmonicParams, sigma2_true: float, N: int
) -> float:
    orders = theta.orders
    C = N * (N**2 - 1) * np.sum(orders**2 * np.square(theta.amplitudes)) / 6
    return float(sigma2_true / C)


def _differences(
    theta0: HarmonicParams, spec: TrueSignalSpec
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    phase_diffs = np.asarray(theta0.phases) - np.asarray(spec.phases)
    freq_diffs = theta0.orders * theta0.omega - np.asarray(spec.frequencies)
    return phase_diffs, freq_diffs


def mcrlb_asymptotic(
    theta0: HarmonicParams, spec: TrueSignalSpec, N: int
) -> Tuple[float, AsymptoticTerms]:
    """Closed-form large-N bound on the pseudo-true fundamental."""
    _require_noise(spec.noise_variance)
    k2 = theta0.orders**2
    r = np.asarray(theta0.amplitudes)
    r_true = np.asarray(spec.amplitudes)
    phase_diffs, freq_diffs = _differences(theta0, spec)
    t = sample_times(N)[None, :]
    angle = phase_diffs[:, None] + freq_diffs[:, None] * t
    t_cos = np.sum(t * np.cos(angle), axis=1)
    t_sin = np.sum(t * np.sin(angle), axis=1)
    t2_cos = np.sum(t**2 * np.cos(angle), axis=1)

    C = N * (N**2 - 1) * np.sum(k2 * r**2) / 6
    Z = -2 * np.sum(k2 * r**2) * N * (N - 1) * (2 * N - 1) / 6 + 2 * np.sum(
        k2 * r * r_true * t2_cos
    )
    D = 2 * (N - 1) * (
        N * (N - 1) / 2 * np.sum(k2 * r**2) - np.sum(k2 * r * r_true * t_cos)
    )
    E = 2 / N * np.sum(k2 * r_true**2 * t_sin**2) + 2 / N * np.sum(
        k2 * (r_true * t_cos - r * N * (N - 1) / 2) ** 2
    )
    terms = AsymptoticTerms(
        C=float(C),
        Z=float(Z),
        D=float(D),
        E=float(E),
        phase_diffs=phase_diffs.tolist(),
        freq_diffs=freq_diffs.tolist(),
    )
    return _closed_form(terms, spec.noise_variance), terms


def _closed_form(terms: AsymptoticTerms, true_variance: float) -> float:
    denominator = terms.denominator
    if abs(denominator) <= 1e-12 * max(1.0, terms.C):
        raise DegenerateBoundError(DEGENERATE_DENOMINATOR % denominator)
    return terms.bound(true_variance)


def _harmonic_components(
    theta0: HarmonicParams, spec: TrueSignalSpec, N: int
) -> Tuple[NDArray[np.complex128], NDArray[np.complex128], NDArray[np.float64]]:
    "Per-harmonic model rows x~_k,t, waveform differences eps_k,t and (k t) weights."
    t = sample_times(N)[None, :]
    orders = theta0.orders[:, None]
    model = np.asarray(theta0.amplitudes)[:, None] * np.exp(
        1j * (np.asarray(theta0.phases)[:, None] + orders * theta0.omega * t)
    )
    truth = np.asarray(spec.amplitudes)[:, None] * np.exp(
        1j * (np.asarray(spec.phases)[:, None] + np.asarray(spec.frequencies)[:, None] * t)
    )
    return model, model - truth, orders * t


def _contract(left: NDArray[np.complex128], right: NDArray[np.complex128]) -> NDArray[np.float64]:
    "2 sum_t (left^R right^R + left^I right^I), one value per harmonic."
    return 2 * np.sum(np.real(left.conj() * right), axis=1)


def asymptotic_terms_via_arrowhead(
    theta0: HarmonicParams, spec: TrueSignalSpec, N: int
) -> AsymptoticTerms:
    """Arrowhead decomposition of A with Sherman-Morrison-Woodbury.

    Each harmonic is contracted against its own waveform difference, so the
    cross-order correlations that vanish as N grows are left out.
    """
    model, residual, kt = _harmonic_components(theta0, spec, N)
    r = np.asarray(theta0.amplitudes)[:, None]
    d_omega = 1j * kt * model
    d_phase = 1j * model
    d_amplitude = model / r

    eta_model = float(np.sum(_contract(d_omega, d_omega)))
    eta_residual = float(np.sum(_contract(residual, -(kt**2) * model)))
    d = np.concatenate((_contract(d_phase, d_phase), _contract(d_amplitude, d_amplitude)))
    z_model = np.concatenate((_contract(d_phase, d_omega), _contract(d_amplitude, d_omega)))
    z_residual = np.concatenate(
        (_contract(residual, -kt * model), _contract(residual, 1j * kt * d_amplitude))
    )
    for index, value in enumerate(d):
        if not value > 0:
            raise DegenerateBoundError(COLLAPSED_AMPLITUDE % (index, value))

    ratio_model, ratio_residual = z_model / d, z_residual / d
    z = z_model + z_residual
    rho = eta_model + eta_residual - float(z @ (z / d))
    u_model = np.concatenate(([-1.0], ratio_model))
    u_residual = np.concatenate(([0.0], ratio_residual))
    phase_diffs, freq_diffs = _differences(theta0, spec)
    return AsymptoticTerms(
        C=eta_model - float(z_model @ ratio_model),
        E=float(z_residual @ ratio_residual),
        D=-2 * float(z_model @ ratio_residual),
        Z=eta_residual,
        phase_diffs=phase_diffs.tolist(),
        freq_diffs=freq_diffs.tolist(),
        eta_model=eta_model,
        eta_residual=eta_residual,
        d=d.tolist(),
        z_model=z_model.tolist(),
        z_residual=z_residual.tolist(),
        rho=rho,
        u_model=u_model.tolist(),
        u_residual=u_residual.tolist(),
    )


def mcrlb_arrowhead(theta0: HarmonicParams, spec: TrueSignalSpec, N: int) -> float:
    _require_noise(spec.noise_variance)
    return _closed_form(asymptotic_terms_via_arrowhead(theta0, spec, N), spec.noise_variance)


def _unstructured_jacobian(spec: TrueSignalSpec, N: int) -> NDArray[np.complex128]:
    "Columns [amplitudes, phases, frequencies] of the K-sinusoid model."
    t = sample_times(N)[:, None]
    amplitudes = np.asarray(spec.amplitudes)[None, :]
    components = np.exp(
        1j * (np.asarray(spec.phases)[None, :] + np.asarray(spec.frequencies)[None, :] * t)
    )
    return np.hstack(
        (components, 1j * amplitudes * components, 1j * t * amplitudes * components)
    )


def crlb_unstructured(spec: TrueSignalSpec, N: int) -> NDArray[np.float64]:
    _require_noise(spec.noise_variance)
    if N < 3 * spec.K:
        raise ValueError(TOO_FEW_SAMPLES % (3 * spec.K, N))
    fisher = 2 / spec.noise_variance * _outer_real(_unstructured_jacobian(spec, N))
    try:
        inverse = checked_inverse(fisher, "unstructured Fisher information")
    except NumericalError as exc:
        raise DegenerateBoundError(COINCIDING_FREQUENCIES, exc.condition) from exc
    return np.diag(inverse)[2 * spec.K :].copy()


def crlb_unstructured_asymptotic(spec: TrueSignalSpec, N: int) -> NDArray[np.float64]:
    "Decoupled per-sinusoid bound 6 sigma^2 / (r_k^2 N (N^2 - 1))."
    _require_noise(spec.noise_variance)
    return 6 * spec.noise_variance / (np.square(spec.amplitudes) * N * (N**2 - 1))


def mse_lower_bound(bias: NDArray[np.float64], mcrlb_omega: float) -> NDArray[np.float64]:
    bias = np.asarray(bias, dtype=float)
    orders = np.arange(1, bias.size + 1)
    return bias**2 + orders**2 * mcrlb_omega


def arrowhead_offdiag_ratio(F: NDArray[np.float64]) -> float:
    "Largest off-diagonal entry outside the first row and column over the smallest diagonal."
    block = np.abs(F[1:, 1:])
    diagonal = np.diag(block).copy()
    np.fill_diagonal(block, 0.0)
    return float(block.max() / diagonal.min())


def arrowhead_offdiag_envelope(theta: HarmonicParams, N: int) -> float:
    """Phase-free upper bound on ``arrowhead_offdiag_ratio`` of the score matrix.

    Cross-order entries are amplitude-weighted Dirichlet sums, bounded by
    min(N, 1/|sin(m omega/2)|) for an order gap m; the diagonal grows as N.
    """
    if theta.K == 1:
        return 0.0
    r = np.asarray(theta.amplitudes)
    gaps = np.abs(theta.orders[:, None] - theta.orders[None, :])
    half_angle = np.abs(np.sin(gaps * theta.omega / 2))
    dirichlet = np.full(gaps.shape, float(N))
    np.divide(1.0, half_angle, out=dirichlet, where=half_angle > 1.0 / N)
    np.fill_diagonal(dirichlet, 0.0)
    weight = np.maximum(1.0, np.maximum(np.maximum.outer(r, r), np.outer(r, r)))
    return float(np.max(weight * dirichlet) / (N * min(1.0, float(np.min(r**2)))))


def compute_bounds(
    spec: TrueSignalSpec,
    N: int,
    search: Optional[SearchConfig] = None,
    unstructured: UnstructuredVariant = "exact",
    pseudo: Optional[PseudoTrueResult] = None,
) -> BoundReport:
    """Pseudo-true point, sandwich, exact and asymptotic MCRLB, CRLBs and MSE bounds."""
    _require_noise(spec.noise_variance)
    pseudo = pseudo or solve_pseudo_true(spec, N, search)
    theta0 = pseudo.theta0
    sandwich = build_sandwich(theta0, spec, N, pseudo.pseudo_variance)
    exact = mcrlb_exact(sandwich, spec.noise_variance)
    asymptotic, _ = mcrlb_asymptotic(theta0, spec, N)
    match unstructured:
        case "exact":
            sine = crlb_unstructured(spec, N)
        case "asymptotic":
            sine = crlb_unstructured_asymptotic(spec, N)
        case _:
            raise ValueError(UNKNOWN_UNSTRUCTURED % unstructured)
    _, freq_diffs = _differences(theta0, spec)
    return BoundReport(
        samples=N,
        omega0=theta0.omega,
        true_variance=spec.noise_variance,
        pseudo_variance=pseudo.pseudo_variance,
        mcrlb_exact_diag=exact.tolist(),
        mcrlb_asymptotic_omega=asymptotic,
        crlb_harmonic_omega=float(crlb_harmonic(theta0, spec.noise_variance, N)[0]),
        crlb_harmonic_omega_asymptotic=crlb_harmonic_asymptotic(
            theta0, spec.noise_variance, N
        ),
        crlb_unstructured_freqs=sine.tolist(),
        bias=freq_diffs.tolist(),
        mse_lower_freqs=mse_lower_bound(freq_diffs, float(exact[0])).tolist(),
        unstructured=unstructured,
    )


def write_report(report: BoundReport, directory: str | Path) -> List[Path]:
    """Write ``bounds.json`` and the one-row ``bounds.csv``; both use the same field names."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    json_path = directory / f"{REPORT_NAME}.json"
    json_path.write_bytes(
        orjson.dumps(report.to_document(), option=orjson.OPT_INDENT_2)
    )
    row = report.to_row()
    csv_path = directory / f"{REPORT_NAME}.csv"
    with open(csv_path, "w", newline="") as buffer:
        writer = csv.DictWriter(buffer, fieldnames=list(row))
        writer.writeheader()
        writer.writerow(row)
    return [json_path, csv_path]
