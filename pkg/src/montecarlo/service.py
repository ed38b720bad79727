"""Monte Carlo sweeps over stiffness, sample count and SNR.

Every trial owns a seed derived from ``(master_seed, axis_index, trial_index)``
and results are aggregated in trial order, so serial and threaded runs agree
bit for bit.
"""
import csv
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import ValidationError

from src.bounds.schemas import BoundReport
from src.bounds.service import compute_bounds
from src.config import FIGURE_COLUMNS, TWO_PI
from src.estimators.service import harmonic_mle, unstructured_mle
from src.exceptions import CONFIG_INVALID, ConfigurationError, NumericalError
from src.pseudo_true.schemas import SearchConfig
from src.pseudo_true.service import omega_hint_from_spec
from src.signals.schemas import StiffnessLaw, TrueSignalSpec
from src.signals.service import default_amplitudes, spec_from_law, synthesize_true
from src.utils import derive_seed, ordered_map, snr_to_noise_variance
from .exceptions import (
    AXIS_DONE,
    BOUNDS_FAILED,
    NO_CONVERGED_TRIALS,
    SWEEP_DONE,
    TRIAL_FAILED,
)
from .schemas import (
    BoundCurvePoint,
    EmpiricalStats,
    SweepConfig,
    SweepPoint,
    SweepResult,
)


logger = logging.getLogger(__name__)

BOUND_STREAM = 1
FIXED_PHASE_STREAM = 2
ESTIMATOR_FAILURES = (NumericalError, ValueError, np.linalg.LinAlgError)
UNSTRUCTURED_COLUMNS = ("axis_value", "mse_empirical", "var_empirical", "bias_sq", "n_converged")


def _spec(
    config: SweepConfig, beta: float, snr_db: float, phases: NDArray[np.float64]
) -> TrueSignalSpec:
    amplitudes = default_amplitudes(config.K, config.amplitude_width)
    return spec_from_law(
        StiffnessLaw(omega=config.omega, beta=beta),
        amplitudes.tolist(),
        phases.tolist(),
        snr_to_noise_variance(amplitudes, snr_db),
    )


def _draw_phases(seed: int, K: int) -> NDArray[np.float64]:
    return np.random.default_rng(seed).uniform(0, TWO_PI, K)


def _fixed_phases(config: SweepConfig, axis_index: int) -> NDArray[np.float64]:
    "Trial seeds use (master, axis, trial); phase streams append a nonzero stream id."
    return _draw_phases(
        derive_seed(config.master_seed, axis_index, 0, FIXED_PHASE_STREAM), config.K
    )


def bound_curve(config: SweepConfig, axis_index: int, value: float) -> BoundCurvePoint:
    """All bounds at one axis value; averaged over phase draws unless phases are fixed."""
    beta, N, snr_db = config.point(value)
    if config.fixed_phases:
        phase_sets = [_fixed_phases(config, axis_index)]
    else:
        phase_sets = [
            _draw_phases(
                derive_seed(config.master_seed, axis_index, draw, BOUND_STREAM),
                config.K,
            )
            for draw in range(config.phase_draws)
        ]

    def evaluate(phases: NDArray[np.float64]) -> BoundReport:
        spec = _spec(config, beta, snr_db, phases)
        return compute_bounds(spec, N, unstructured=config.unstructured)

    try:
        reports = ordered_map(evaluate, phase_sets, config.threads)
    except (NumericalError, ValueError) as exc:
        logger.warning(BOUNDS_FAILED, config.axis, value, exc)
        return BoundCurvePoint(
            axis_value=value, phase_draws=len(phase_sets), error=str(exc)
        )
    return BoundCurvePoint(
        axis_value=value,
        phase_draws=len(reports),
        omega0=float(np.mean([report.omega0 for report in reports])),
        bias_1=float(np.mean([report.bias[0] for report in reports])),
        mse_lb=float(np.mean([report.mse_lower_freqs[0] for report in reports])),
        mcrlb_exact=float(np.mean([report.mcrlb_exact_omega for report in reports])),
        mcrlb_asymp=float(np.mean([report.mcrlb_asymptotic_omega for report in reports])),
        crlb_sine=float(np.mean([report.crlb_unstructured_freqs[0] for report in reports])),
        crlb_harmonic=float(np.mean([report.crlb_harmonic_omega for report in reports])),
    )


def bounds_only_sweep(config: SweepConfig) -> List[BoundCurvePoint]:
    return [
        bound_curve(config, axis_index, value)
        for axis_index, value in enumerate(config.values)
    ]


def empirical_stats(
    estimates: Sequence[float], converged: Sequence[bool], truth: float
) -> EmpiricalStats:
    """MSE, variance and squared bias of the converged estimates; mse == variance + bias_sq."""
    values = np.asarray(estimates, dtype=float)[np.asarray(converged, dtype=bool)]
    if not values.size:
        return EmpiricalStats()
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return EmpiricalStats(
        mse=float(np.mean((values - truth) ** 2)),
        variance=float(np.mean((values - mean) ** 2)),
        bias_sq=(mean - truth) ** 2,
        stderr_mean=stderr,
        n_converged=int(values.size),
    )


def run_trial(
    config: SweepConfig, axis_index: int, trial_index: int, value: float
) -> Tuple[float, bool, float, bool]:
    "(omega_hat, converged, lowest nu_hat, converged) for one noisy realization."
    beta, N, snr_db = config.point(value)
    rng = np.random.default_rng(derive_seed(config.master_seed, axis_index, trial_index))
    phases = (
        _fixed_phases(config, axis_index)
        if config.fixed_phases
        else rng.uniform(0, TWO_PI, config.K)
    )
    spec = _spec(config, beta, snr_db, phases)
    y = synthesize_true(spec, N, rng)
    search = SearchConfig(omega_hint=omega_hint_from_spec(spec))
    try:
        harmonic = harmonic_mle(y, spec.K, search)
        omega_hat, omega_ok = harmonic.params.omega, harmonic.converged
    except ESTIMATOR_FAILURES as exc:
        logger.warning(TRIAL_FAILED, "harmonic", trial_index, config.axis, value, exc)
        omega_hat, omega_ok = float("nan"), False
    nu_hat, nu_ok = float("nan"), False
    if config.run_unstructured:
        try:
            unstructured = unstructured_mle(y, spec.K, spec.frequencies)
            nu_hat, nu_ok = unstructured.params.frequencies[0], unstructured.converged
        except ESTIMATOR_FAILURES as exc:
            logger.warning(TRIAL_FAILED, "unstructured", trial_index, config.axis, value, exc)
    return omega_hat, omega_ok, nu_hat, nu_ok


def run_sweep(config: SweepConfig) -> SweepResult:
    points = []
    for axis_index, value in enumerate(config.values):
        bounds = bound_curve(config, axis_index, value)
        beta, _, _ = config.point(value)
        truth = config.omega * np.sqrt(1 + beta)
        outcomes = ordered_map(
            lambda trial: run_trial(config, axis_index, trial, value),
            range(config.trials),
            config.threads,
        )
        omega_hat, omega_ok, nu_hat, nu_ok = map(list, zip(*outcomes))
        harmonic = empirical_stats(omega_hat, omega_ok, truth)
        if not harmonic.n_converged:
            logger.warning(NO_CONVERGED_TRIALS, config.axis, value)
        unstructured = (
            empirical_stats(nu_hat, nu_ok, truth) if config.run_unstructured else None
        )
        logger.info(
            AXIS_DONE,
            config.axis,
            value,
            harmonic.n_converged,
            config.trials,
            harmonic.mse,
            bounds.mcrlb_exact,
        )
        points.append(
            SweepPoint(
                axis_value=value,
                harmonic=harmonic,
                unstructured=unstructured,
                bounds=bounds,
                trial_seeds=[
                    derive_seed(config.master_seed, axis_index, trial)
                    for trial in range(config.trials)
                ],
            )
        )
    result = SweepResult(
        config=config,
        points=points,
        phase_convention=(
            "fixed per axis value"
            if config.fixed_phases
            else f"redrawn per trial; bounds averaged over {config.phase_draws} phase draws"
        ),
    )
    logger.info(SWEEP_DONE, config.axis, len(points), result.failures)
    return result


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(value)
    return repr(float(value))


def _write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as buffer:
        writer = csv.writer(buffer)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row[column]) for column in columns])
    return path


def emit_figure_data(result: SweepResult, path: str | Path) -> List[Path]:
    """Write ``<name>.csv`` (harmonic model and bounds) and, if run, ``<name>_unstructured.csv``."""
    directory = Path(path)
    written = [
        _write_csv(
            directory / f"{result.config.name}.csv",
            FIGURE_COLUMNS,
            [point.to_row() for point in result.points],
        )
    ]
    if result.config.run_unstructured:
        rows = [
            {
                "axis_value": point.axis_value,
                "mse_empirical": point.unstructured.mse,
                "var_empirical": point.unstructured.variance,
                "bias_sq": point.unstructured.bias_sq,
                "n_converged": point.unstructured.n_converged,
            }
            for point in result.points
        ]
        written.append(
            _write_csv(
                directory / f"{result.config.name}_unstructured.csv",
                UNSTRUCTURED_COLUMNS,
                rows,
            )
        )
    return written


def read_figure_data(path: str | Path) -> List[dict]:
    with open(path, newline="") as buffer:
        return [
            {
                column: int(value) if column == "n_converged" else float(value)
                for column, value in row.items()
            }
            for row in csv.DictReader(buffer)
        ]


def write_bound_curves(points: Sequence[BoundCurvePoint], path: str | Path) -> Path:
    columns = tuple(
        name for name in BoundCurvePoint.model_fields if name != "error"
    )
    return _write_csv(
        Path(path), columns, [point.model_dump(include=set(columns)) for point in points]
    )


def load_config(path: str | Path, **overrides: Optional[object]) -> SweepConfig:
    "Sweep config from a JSON file; non-None overrides replace file values."
    updates = {key: value for key, value in overrides.items() if value is not None}
    try:
        config = SweepConfig.model_validate_json(Path(path).read_bytes())
        if updates:
            config = SweepConfig.model_validate({**config.model_dump(), **updates})
    except ValidationError as exc:
        raise ConfigurationError(CONFIG_INVALID % exc) from exc
    return config
