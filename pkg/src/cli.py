import logging
from pathlib import Path
from typing import List, Optional, Tuple

import click
import numpy as np
from pydantic import ValidationError

from src.bounds.schemas import BoundReport, BoundsRequest
from src.bounds.service import (
    asymptotic_terms_via_arrowhead,
    arrowhead_offdiag_envelope,
    arrowhead_offdiag_ratio,
    build_sandwich,
    compute_bounds,
    mcrlb_asymptotic,
    write_report,
)
from src.config import PROJECT_NAME, TWO_PI, VERSION, settings
from src.exceptions import ConfigurationError, InharmonicaError
from src.manifest.service import finish_manifest, start_manifest
from src.montecarlo.service import emit_figure_data, load_config, run_sweep
from src.pseudo_true.service import solve_pseudo_true
from src.signals.schemas import HarmonicParams, StiffnessLaw
from src.signals.service import default_amplitudes, finite_difference_errors, spec_from_law
from src.speech.exceptions import NoAcceptedFramesError
from src.speech.schemas import DetectConfig
from src.speech.service import (
    analyze_audio,
    ratio_cdf,
    rejection_histogram,
    write_frames,
)
from src.speech.utils import load_audio
from src.utils import configure_logging


logger = logging.getLogger(__name__)

AXES = {"beta": "beta", "n": "samples", "samples": "samples", "snr": "snr"}


def _floats(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    raise SystemExit(1)


def _to_rad(value: Optional[float], fs: Optional[float]) -> Optional[float]:
    return value if value is None or fs is None else TWO_PI * value / fs


@click.group()
@click.version_option(VERSION, prog_name=PROJECT_NAME)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Logging level; defaults to INHARMONICA_LOG_LEVEL.",
)
def cli(log_level: Optional[str]):
    """Bounds for harmonic approximations of inharmonic signals."""
    configure_logging(log_level)


def print_report(report: BoundReport) -> None:
    click.echo(f"N = {report.samples}, omega0 = {report.omega0:.12g} rad/sample")
    click.echo(
        f"sigma2 true = {report.true_variance:.6g}, pseudo-true = {report.pseudo_variance:.6g}"
    )
    for name, value in (
        ("mcrlb_exact_omega", report.mcrlb_exact_omega),
        ("mcrlb_asymp_omega", report.mcrlb_asymptotic_omega),
        ("crlb_harmonic_omega", report.crlb_harmonic_omega),
    ):
        click.echo(f"{name:<22}{value:.6e}")
    click.echo(f"{'k':>3}{'bias_k':>15}{'mse_lb_k':>15}{'crlb_sine_k':>15}")
    for order, (bias, mse, sine) in enumerate(
        zip(report.bias, report.mse_lower_freqs, report.crlb_unstructured_freqs), start=1
    ):
        click.echo(f"{order:>3}{bias:>15.6e}{mse:>15.6e}{sine:>15.6e}")


@cli.command()
@click.option("--K", "K", type=click.IntRange(min=1), required=True, help="Number of sinusoids.")
@click.option("--omega", type=float, help="Fundamental in rad/sample (or Hz with --fs).")
@click.option("--fs", type=click.FloatRange(min=0, min_open=True), help="Sample rate in Hz.")
@click.option("--beta", type=click.FloatRange(min=0), help="Stiffness coefficient.")
@click.option("--offsets", callback=_floats, help="Comma-separated frequency offsets.")
@click.option("--N", "N", type=click.IntRange(min=1), default=200, show_default=True)
@click.option("--snr-db", type=float, help="SNR over the total sinusoidal power.")
@click.option("--sigma2", type=float, help="Noise variance.")
@click.option("--amplitudes", callback=_floats, help="Comma-separated amplitudes.")
@click.option("--phases", callback=_floats, help="Comma-separated phases in radians.")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option(
    "--unstructured",
    type=click.Choice(["exact", "asymptotic"]),
    default="exact",
    show_default=True,
)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
def bounds(K, omega, fs, beta, offsets, N, snr_db, sigma2, amplitudes, phases, seed, unstructured, out):
    """Pseudo-true fundamental, MCRLBs, CRLBs and MSE bounds for one signal.

    Writes bounds.json, bounds.csv and a manifest into the output directory.
    """
    if omega is None:
        raise click.UsageError("--omega is required")
    try:
        request = BoundsRequest(
            K=K,
            omega=_to_rad(omega, fs),
            beta=beta,
            offsets=[_to_rad(value, fs) for value in offsets] if offsets else None,
            N=N,
            snr_db=snr_db,
            sigma2=sigma2,
            amplitudes=amplitudes,
            phases=phases,
            seed=seed,
            unstructured=unstructured,
        )
        spec = request.to_spec()
    except (ValidationError, ValueError) as exc:
        raise click.UsageError(str(exc))
    directory = Path(out or settings.OUTPUT_DIR)
    manifest = start_manifest("bounds", request.model_dump(), seed)
    try:
        report = compute_bounds(spec, N, unstructured=unstructured)
    except (InharmonicaError, ValueError) as exc:
        _fail(str(exc))
    print_report(report)
    paths = write_report(report, directory)
    finish_manifest(manifest, paths, directory)
    click.echo(f"wrote {', '.join(str(path) for path in paths)}")


@cli.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--axis", type=click.Choice(sorted(AXES)), help="Override the swept axis.")
@click.option("--values", callback=_floats, help="Comma-separated axis values.")
@click.option("--trials", type=click.IntRange(min=1))
@click.option("--seed", type=click.IntRange(min=0), help="Master seed.")
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    envvar="INHARMONICA_THREADS",
    help="Worker cap; also read from INHARMONICA_THREADS.",
)
@click.option("--fixed-phases/--random-phases", default=None)
@click.option("--unstructured/--no-unstructured", "run_unstructured", default=None)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
def sweep(config_path, axis, values, trials, seed, threads, fixed_phases, run_unstructured, out):
    """Monte Carlo sweep from a JSON config; writes figure CSVs and a manifest."""
    try:
        config = load_config(
            config_path,
            axis=AXES[axis] if axis else None,
            values=values,
            trials=trials,
            master_seed=seed,
            threads=threads,
            fixed_phases=fixed_phases,
            run_unstructured=run_unstructured,
        )
    except ConfigurationError as exc:
        raise click.UsageError(str(exc))
    directory = Path(out or settings.OUTPUT_DIR)
    manifest = start_manifest("sweep", config.model_dump(), config.master_seed)
    try:
        result = run_sweep(config)
    except InharmonicaError as exc:
        _fail(str(exc))
    paths = emit_figure_data(result, directory)
    finish_manifest(manifest, paths, directory)
    click.echo(f"{'axis_value':>12}{'mse':>13}{'mcrlb':>13}{'mse_lb':>13}{'crlb_sine':>13}{'conv':>6}")
    for point in result.points:
        row = point.to_row()
        click.echo(
            f"{row['axis_value']:>12.4g}{row['mse_empirical']:>13.4e}{row['mcrlb_exact']:>13.4e}"
            f"{row['mse_lb']:>13.4e}{row['crlb_sine']:>13.4e}{row['n_converged']:>6}"
        )
    click.echo(f"wrote {', '.join(str(path) for path in paths)}")


@cli.command()
@click.argument("audio_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--snr-db", callback=_floats, default="0,10", show_default=True)
@click.option("--frame-ms", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--threshold-db", type=float, default=None)
@click.option("--bound-samples", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), envvar="INHARMONICA_THREADS")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory.")
def speech(audio_path, snr_db, frame_ms, threshold_db, bound_samples, seed, threads, out):
    """Frame-wise bound ratios of a mono WAV file; writes JSON lines, CDF CSV and a manifest."""
    overrides = {
        "snr_db": snr_db,
        "frame_ms": frame_ms,
        "threshold_db": threshold_db,
        "bound_samples": bound_samples,
    }
    try:
        detect = DetectConfig(**{k: v for k, v in overrides.items() if v is not None})
    except ValidationError as exc:
        raise click.UsageError(str(exc))
    directory = Path(out or settings.OUTPUT_DIR)
    manifest = start_manifest(
        "speech", {"audio": str(audio_path), **detect.model_dump()}, seed
    )
    try:
        clip = load_audio(audio_path)
    except InharmonicaError as exc:
        _fail(str(exc))
    analyses = analyze_audio(clip, detect, threads)
    paths = [write_frames(analyses, directory / "frames.jsonl")]
    accepted = sum(analysis.accepted for analysis in analyses)
    click.echo(f"{clip.duration:.3f} s, {len(analyses)} frames, {accepted} accepted")
    for reason, count in sorted(rejection_histogram(analyses).items()):
        click.echo(f"  rejected {count:>5}  {reason}")
    try:
        ratio_cdf(analyses, detect.snr_db, directory / "ratio_cdf.csv")
    except NoAcceptedFramesError as exc:
        _fail(str(exc))
    paths.append(directory / "ratio_cdf.csv")
    finish_manifest(manifest, paths, directory)


def run_selftest(seed: int = 0, points: int = 20) -> List[Tuple[str, bool, str]]:
    """Degeneracy at beta=0, derivative checks, the two asymptotic routes and the off-diagonal envelope."""
    rng = np.random.default_rng(seed)
    checks = []
    K, omega, N = 10, np.pi / 40, 200
    amplitudes = default_amplitudes(K).tolist()
    phases = rng.uniform(0, TWO_PI, K).tolist()

    harmonic = spec_from_law(StiffnessLaw(omega=omega, beta=0.0), amplitudes, phases, 0.1)
    report = compute_bounds(harmonic, N)
    crlb = report.crlb_harmonic_omega
    error = abs(report.mcrlb_exact_omega - crlb) / crlb
    checks.append(("beta=0 MCRLB equals CRLB", error < 1e-8, f"relative error {error:.2e}"))

    worst_gradient = worst_hessian = 0.0
    for _ in range(points):
        params = HarmonicParams(
            omega=rng.uniform(0.01, 0.5),
            phases=rng.uniform(0, TWO_PI, 3).tolist(),
            amplitudes=rng.uniform(0.5, 2.0, 3).tolist(),
        )
        gradient, hessian = finite_difference_errors(params, float(rng.uniform(0, 50)))
        worst_gradient, worst_hessian = max(worst_gradient, gradient), max(worst_hessian, hessian)
    checks.append(("gradient", worst_gradient < 1e-5, f"worst relative error {worst_gradient:.2e}"))
    checks.append(("Hessian", worst_hessian < 1e-4, f"worst relative error {worst_hessian:.2e}"))

    stiff = spec_from_law(StiffnessLaw(omega=omega, beta=1e-4), amplitudes, phases, 0.1)
    pseudo = solve_pseudo_true(stiff, N)
    theta0 = pseudo.theta0
    explicit, _ = mcrlb_asymptotic(theta0, stiff, N)
    arrowhead = asymptotic_terms_via_arrowhead(theta0, stiff, N).bound(stiff.noise_variance)
    gap = abs(explicit - arrowhead) / arrowhead
    checks.append(("asymptotic routes agree", gap < 1e-2, f"relative gap {gap:.2e}"))

    sandwich = build_sandwich(theta0, stiff, N, pseudo.pseudo_variance)
    ratio = arrowhead_offdiag_ratio(sandwich.F)
    envelope = arrowhead_offdiag_envelope(theta0, N)
    checks.append(
        ("arrowhead envelope", ratio <= envelope * (1 + 1e-9), f"ratio {ratio:.3f}, envelope {envelope:.3f}")
    )
    return checks


@cli.command()
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
def selftest(seed):
    """Quick numerical checks of the bound machinery."""
    try:
        checks = run_selftest(seed)
    except InharmonicaError as exc:
        _fail(str(exc))
    for name, passed, detail in checks:
        click.echo(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    if not all(passed for _, passed, _ in checks):
        raise SystemExit(1)


if __name__ == "__main__":
    cli()
