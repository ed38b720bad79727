"""Maximum-likelihood estimators applied to noisy measurements.

Under white circular Gaussian noise both estimators reduce to nonlinear
least squares with the amplitudes projected out.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, optimize

from src.config import COORDINATE_TOL, MAX_SWEEPS
from src.pseudo_true.schemas import SearchConfig
from src.pseudo_true.service import fit_harmonic, solve_pseudo_true
from src.signals.schemas import ComplexSeries, TrueSignalSpec
from src.signals.service import sample_times, synthesize_true
from src.utils import bracketed_root, derive_seed, ordered_map
from .exceptions import (
    CONSISTENCY_ROW,
    FREQUENCY_COLLISION,
    INIT_LENGTH,
    INIT_NOT_DISTINCT,
    NOT_CONVERGED,
    NO_CONVERGED,
)
from .schemas import ConsistencyRow, EstimateResult, SinusoidEstimate


logger = logging.getLogger(__name__)


def harmonic_mle(
    y: ComplexSeries, K: int, search: Optional[SearchConfig] = None
) -> EstimateResult:
    y = np.asarray(y, dtype=complex)
    fit = fit_harmonic(y, K, search)
    return EstimateResult(
        params=fit.params,
        residual_variance=fit.residual_energy / y.size,
        converged=fit.converged,
        iterations=fit.iterations,
        residual_trace=fit.trace,
    )


def _sinusoid_atoms(frequencies: NDArray[np.float64], N: int) -> NDArray[np.complex128]:
    return np.exp(1j * np.outer(sample_times(N), frequencies))


def _projected_fit(
    y: ComplexSeries, frequencies: NDArray[np.float64]
) -> Tuple[NDArray[np.complex128], float]:
    atoms = _sinusoid_atoms(frequencies, y.size)
    amplitudes, *_ = linalg.lstsq(atoms, y, check_finite=False)
    residual = y - atoms @ amplitudes
    return amplitudes, float(np.vdot(residual, residual).real)


def _frequency_slope(
    y: ComplexSeries, frequencies: NDArray[np.float64], index: int
) -> float:
    "d/d nu_index of the projected residual energy."
    atoms = _sinusoid_atoms(frequencies, y.size)
    amplitudes, *_ = linalg.lstsq(atoms, y, check_finite=False)
    residual = y - atoms @ amplitudes
    t = sample_times(y.size)
    derivative = 1j * t * atoms[:, index] * amplitudes[index]
    return float(-2 * np.real(np.vdot(residual, derivative)))


def _polish(
    y: ComplexSeries,
    frequencies: NDArray[np.float64],
    current: float,
    span: float,
    limit: float,
) -> float:
    "Root of the slope near each coordinate; bounded Brent stalls at sqrt(eps) relative."
    for index in range(frequencies.size):
        centre = frequencies[index]
        trial = frequencies.copy()

        def slope(value: float) -> float:
            trial[index] = value
            return _frequency_slope(y, trial, index)

        root = bracketed_root(slope, centre, span, centre - limit, centre + limit)
        if root is None:
            continue
        trial[index] = root
        _, cost = _projected_fit(y, trial)
        if cost <= current:
            frequencies[index], current = trial[index], cost
    return current


def _collision(frequencies: NDArray[np.float64], limit: float) -> Optional[str]:
    order = np.sort(frequencies)
    gaps = np.diff(order)
    if gaps.size and gaps.min() < limit:
        index = int(np.argmin(gaps))
        return FREQUENCY_COLLISION % (order[index], order[index + 1], gaps[index], limit)
    return None


def unstructured_mle(
    y: ComplexSeries,
    K: int,
    init_freqs: Sequence[float],
    tolerance: float = COORDINATE_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> EstimateResult:
    """Cyclic coordinate descent over the K frequencies, each step a bounded Brent search."""
    y = np.asarray(y, dtype=complex)
    N = y.size
    frequencies = np.asarray(init_freqs, dtype=float).copy()
    if frequencies.size != K:
        raise ValueError(INIT_LENGTH % (K, frequencies.size))
    if np.unique(frequencies).size != K:
        raise ValueError(INIT_NOT_DISTINCT % frequencies.tolist())

    half_width = np.pi / N
    collision_limit = np.pi / (4 * N)
    _, current = _projected_fit(y, frequencies)
    trace: List[float] = [current]
    floor = np.finfo(float).eps * float(np.vdot(y, y).real)
    converged, change, sweeps = False, np.inf, 0

    for sweeps in range(1, max_sweeps + 1):
        previous = current
        for index in range(K):
            centre = frequencies[index]
            trial = frequencies.copy()

            def cost(value: float) -> float:
                trial[index] = value
                return _projected_fit(y, trial)[1]

            result = optimize.minimize_scalar(
                cost,
                bounds=(centre - half_width, centre + half_width),
                method="bounded",
                options={"xatol": 1e-14, "maxiter": 500},
            )
            if result.fun < current:
                frequencies[index] = float(result.x)
                current = float(result.fun)
        trace.append(current)
        change = (previous - current) / max(previous, floor, np.finfo(float).tiny)
        if change < tolerance:
            converged = True
            break

    current = _polish(y, frequencies, current, 1e-7, half_width)
    trace.append(current)
    reason = _collision(frequencies, collision_limit)
    if reason:
        logger.warning(reason)
        converged = False
    elif not converged:
        reason = NOT_CONVERGED % (sweeps, change)
        logger.warning(reason)

    amplitudes, residual = _projected_fit(y, frequencies)
    return EstimateResult(
        params=SinusoidEstimate.from_complex(frequencies, amplitudes),
        residual_variance=residual / N,
        converged=converged,
        iterations=sweeps,
        residual_trace=trace,
        reason=reason,
    )


def asymptotic_mle_consistency_check(
    spec: TrueSignalSpec,
    sample_counts: Sequence[int],
    seed: int = 0,
    trials: int = 200,
    search: Optional[SearchConfig] = None,
    threads: Optional[int] = None,
) -> List[ConsistencyRow]:
    """Average converged harmonic MLE of omega against the pseudo-true omega for growing N."""
    rows = []
    for axis_index, N in enumerate(sample_counts):
        pseudo = solve_pseudo_true(spec, N, search)
        trial_search = (search or SearchConfig()).with_hint(pseudo.theta0.omega)

        def run_trial(trial_index: int) -> EstimateResult:
            y = synthesize_true(spec, N, derive_seed(seed, axis_index, trial_index))
            return harmonic_mle(y, spec.K, trial_search)

        estimates = ordered_map(run_trial, range(trials), threads)
        omegas = np.array(
            [estimate.params.omega for estimate in estimates if estimate.converged]
        )
        count = int(omegas.size)
        if not count:
            logger.warning(NO_CONVERGED, N, trials)
        mean = float(np.mean(omegas)) if count else float("nan")
        stderr = float(np.std(omegas, ddof=1) / np.sqrt(count)) if count > 1 else 0.0
        row = ConsistencyRow(
            samples=N,
            omega0=pseudo.theta0.omega,
            mean_estimate=mean,
            gap=abs(mean - pseudo.theta0.omega),
            stderr_mean=stderr,
            trials=trials,
            converged=count,
        )
        logger.info(CONSISTENCY_ROW, N, mean, row.omega0, row.gap, stderr)
        rows.append(row)
    return rows
