"""Variable-projection least squares for the harmonic model.

For a fixed fundamental the complex amplitudes enter linearly, so the
criterion concentrates to a function of omega alone. It is scanned on a
dense grid (chirp-z evaluated) and the best cell is refined with bounded
Brent, then polished on the analytic derivative.
"""
from dataclasses import dataclass, field
import logging
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, optimize, signal

from src.config import TWO_PI, settings
from src.signals.schemas import ComplexSeries, HarmonicParams, TrueSignalSpec
from src.signals.service import (
    harmonic_atoms,
    model_jacobian,
    sample_times,
    synthesize_model,
    synthesize_true,
)
from src.utils import bracketed_root
from .exceptions import (
    DEGENERATE_GRAM,
    EMPTY_WINDOW,
    K_MISMATCH,
    REFINE_NOT_CONVERGED,
    SOLVED,
    TOO_FEW_SAMPLES,
    DegenerateGramError,
)
from .schemas import PseudoTrueResult, SearchConfig


logger = logging.getLogger(__name__)

MIN_OMEGA = 1e-6
GRID_CHUNK = 4096


@dataclass(frozen=True)
class HarmonicFit:
    omega: float
    amplitudes: NDArray[np.complex128]
    residual_energy: float
    converged: bool
    iterations: int
    trace: List[float] = field(default_factory=list)

    @property
    def params(self) -> HarmonicParams:
        return HarmonicParams.from_complex(self.omega, self.amplitudes)


def search_window(search: SearchConfig, K: int) -> Tuple[float, float]:
    upper = TWO_PI / K * (1 - 1e-9)
    if search.window:
        lo, hi = search.window
    elif search.omega_hint:
        lo = max(MIN_OMEGA, 0.5 * search.omega_hint)
        hi = min(upper, 1.5 * search.omega_hint)
    else:
        lo, hi = MIN_OMEGA, upper
    if not lo < hi:
        raise ValueError(EMPTY_WINDOW % (lo, hi))
    return lo, hi


def _dirichlet(theta: NDArray[np.float64], N: int) -> NDArray[np.complex128]:
    "sum_{t<N} exp(i theta t)"
    half = np.sin(theta / 2)
    safe = np.where(np.abs(half) < 1e-12, 1.0, half)
    ratio = np.where(np.abs(half) < 1e-12, float(N), np.sin(N * theta / 2) / safe)
    return np.exp(0.5j * theta * (N - 1)) * ratio


def scan_fundamental(
    series: ComplexSeries, K: int, lo: float, hi: float, count: int
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Concentrated NLS cost on ``count`` uniformly spaced fundamentals in [lo, hi].

    Degenerate grid points (ill-conditioned atoms) get an infinite cost.
    """
    series = np.asarray(series, dtype=complex)
    N = series.size
    omegas = np.linspace(lo, hi, count)
    step = omegas[1] - omegas[0] if count > 1 else 0.0
    orders = np.arange(1, K + 1)
    # rhs[j, k] = sum_t x_t exp(-i k omega_j t)
    rhs = np.empty((count, K), dtype=complex)
    for index, k in enumerate(orders):
        rhs[:, index] = signal.czt(
            series, m=count, w=np.exp(-1j * k * step), a=np.exp(1j * k * lo)
        )
    energy = float(np.vdot(series, series).real)
    lags = orders[None, :] - orders[:, None]
    cost = np.empty(count)
    for start in range(0, count, GRID_CHUNK):
        chunk = slice(start, start + GRID_CHUNK)
        gram = _dirichlet(lags[None, :, :] * omegas[chunk, None, None], N)
        eigenvalues = np.linalg.eigvalsh(gram)
        condition = eigenvalues[:, -1] / np.maximum(eigenvalues[:, 0], 1e-300)
        coefficients = np.linalg.solve(gram, rhs[chunk, :, None])[..., 0]
        projected = np.einsum("gk,gk->g", rhs[chunk].conj(), coefficients).real
        cost[chunk] = np.where(
            (eigenvalues[:, 0] > 0) & (condition < settings.CONDITION_LIMIT),
            energy - projected,
            np.inf,
        )
    return omegas, cost


def project_amplitudes(
    series: ComplexSeries, K: int, omega: float
) -> Tuple[NDArray[np.complex128], float]:
    atoms = harmonic_atoms(omega, K, series.size)
    amplitudes, *_ = linalg.lstsq(atoms, series, check_finite=False)
    residual = series - atoms @ amplitudes
    return amplitudes, float(np.vdot(residual, residual).real)


def _cost_slope(series: ComplexSeries, K: int, omega: float) -> float:
    "d/d omega of the concentrated cost, equal to -2 Re(r^H dA/domega b)."
    atoms = harmonic_atoms(omega, K, series.size)
    amplitudes, *_ = linalg.lstsq(atoms, series, check_finite=False)
    residual = series - atoms @ amplitudes
    t = sample_times(series.size)[:, None]
    derivative = atoms * (1j * np.arange(1, K + 1)[None, :] * t)
    return float(-2 * np.real(np.vdot(residual, derivative @ amplitudes)))


def refine_fundamental(
    series: ComplexSeries, K: int, lo: float, hi: float, search: SearchConfig
) -> HarmonicFit:
    evaluations: List[float] = []

    def objective(omega: float) -> float:
        _, cost = project_amplitudes(series, K, omega)
        evaluations.append(cost)
        return cost

    result = optimize.minimize_scalar(
        objective,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": search.tolerance, "maxiter": search.max_iterations},
    )
    omega, best = float(result.x), float(result.fun)
    converged = bool(result.success)
    if not converged:
        logger.warning(REFINE_NOT_CONVERGED, result.nfev, omega)

    polished = bracketed_root(
        lambda w: _cost_slope(series, K, w), omega, 10 * search.tolerance, lo, hi
    )
    if polished is not None and objective(polished) <= best:
        omega, best = polished, evaluations[-1]

    amplitudes, cost = project_amplitudes(series, K, omega)
    gram_condition = float(np.linalg.cond(harmonic_atoms(omega, K, series.size)) ** 2)
    if gram_condition > settings.CONDITION_LIMIT:
        raise DegenerateGramError(
            DEGENERATE_GRAM % (omega, gram_condition), condition=gram_condition
        )
    trace = np.minimum.accumulate(evaluations).tolist()
    return HarmonicFit(
        omega=omega,
        amplitudes=amplitudes,
        residual_energy=cost,
        converged=converged,
        iterations=int(result.nit),
        trace=trace,
    )


def fit_harmonic(
    series: ComplexSeries, K: int, search: Optional[SearchConfig] = None
) -> HarmonicFit:
    """Least-squares harmonic fit; the Gaussian ML estimate when ``series`` is noisy."""
    search = search or SearchConfig()
    series = np.asarray(series, dtype=complex)
    if series.size < 2 * K + 1:
        raise ValueError(TOO_FEW_SAMPLES % (2 * K + 1, series.size))
    lo, hi = search_window(search, K)
    omegas, cost = scan_fundamental(
        series, K, lo, hi, max(3, search.grid_density * series.size)
    )
    # argmin keeps the first, i.e. smallest omega, on ties
    best = int(np.argmin(cost))
    left, right = omegas[max(best - 1, 0)], omegas[min(best + 1, omegas.size - 1)]
    fit = refine_fundamental(series, K, left, right, search)
    if not fit.converged and cost[best] < fit.residual_energy:
        amplitudes, grid_cost = project_amplitudes(series, K, float(omegas[best]))
        fit = HarmonicFit(
            omega=float(omegas[best]),
            amplitudes=amplitudes,
            residual_energy=grid_cost,
            converged=False,
            iterations=fit.iterations,
            trace=fit.trace,
        )
    return fit


def omega_hint_from_spec(spec: TrueSignalSpec) -> Optional[float]:
    "Least-squares fundamental for nu_k ~ k omega."
    orders = np.arange(1, spec.K + 1)
    hint = float(np.dot(orders, spec.frequencies) / np.dot(orders, orders))
    return hint if hint > 0 else None


def waveform_diff(theta: HarmonicParams, spec: TrueSignalSpec, N: int) -> ComplexSeries:
    if theta.K != spec.K:
        raise ValueError(K_MISMATCH % (theta.K, spec.K))
    return synthesize_model(theta, N) - synthesize_true(spec, N)


def pseudo_variance(spec: TrueSignalSpec, theta0: HarmonicParams, N: int) -> float:
    difference = waveform_diff(theta0, spec, N)
    return spec.noise_variance + float(np.vdot(difference, difference).real) / N


def optimality_gradient(
    theta: HarmonicParams, spec: TrueSignalSpec, N: int
) -> NDArray[np.float64]:
    "sum_t eps^R grad x^R + eps^I grad x^I; zero at the pseudo-true point."
    difference = waveform_diff(theta, spec, N)
    return np.real(np.conj(difference) @ model_jacobian(theta, N))


def solve_pseudo_true(
    spec: TrueSignalSpec, N: int, search: Optional[SearchConfig] = None
) -> PseudoTrueResult:
    search = search or SearchConfig()
    if search.omega_hint is None and search.window is None:
        search = search.with_hint(omega_hint_from_spec(spec))
    fit = fit_harmonic(synthesize_true(spec, N), spec.K, search)
    theta0 = fit.params
    difference = waveform_diff(theta0, spec, N)
    residual_energy = float(np.vdot(difference, difference).real)
    logger.debug(SOLVED, theta0.omega, residual_energy, fit.iterations)
    return PseudoTrueResult(
        theta0=theta0,
        pseudo_variance=spec.noise_variance + residual_energy / N,
        true_variance=spec.noise_variance,
        residual_energy=residual_energy,
        samples=N,
        converged=fit.converged,
        iterations=fit.iterations,
        residual_trace=fit.trace,
    )
