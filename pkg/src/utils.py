from concurrent.futures import ThreadPoolExecutor
import hashlib
import logging
import os
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from fastapi import FastAPI
from numpy.typing import NDArray
from scipy import linalg, optimize

from src.config import settings
from src.exceptions import ILL_CONDITIONED, SINGULAR_MATRIX, NumericalError


T = TypeVar("T")
R = TypeVar("R")

ROOT_RTOL = 4 * np.finfo(float).eps

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(), format=LOG_FORMAT, force=True
    )


async def lifespan(app: FastAPI):
    configure_logging()
    yield


def db_to_linear(value_db: float) -> float:
    return float(10.0 ** (value_db / 10.0))


def linear_to_db(value: float) -> float:
    return float(10.0 * np.log10(value))


def snr_to_noise_variance(amplitudes: Sequence[float], snr_db: float) -> float:
    "SNR is the total sinusoidal power over the noise power."
    power = float(np.sum(np.square(amplitudes)))
    return power / db_to_linear(snr_db)


def noise_variance_to_snr(amplitudes: Sequence[float], noise_variance: float) -> float:
    power = float(np.sum(np.square(amplitudes)))
    return linear_to_db(power / noise_variance)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Deterministic child seed for (master_seed, axis_index, trial_index, ...)."""
    sequence = np.random.SeedSequence([master_seed, *indices])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def resolve_threads(threads: int | None = None) -> int:
    value = threads if threads is not None else settings.THREADS
    return max(1, min(int(value), os.cpu_count() or 1))


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], threads: int | None = None
) -> list[R]:
    """Map preserving input order; results are identical for any worker count."""
    items = list(items)
    workers = resolve_threads(threads)
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def checked_inverse(
    matrix: NDArray[np.float64], name: str, limit: float | None = None
) -> NDArray[np.float64]:
    """Invert a symmetric matrix through a Bunch-Kaufman solve, refusing bad conditioning."""
    limit = limit or settings.CONDITION_LIMIT
    condition = float(np.linalg.cond(matrix))
    if not np.isfinite(condition):
        raise NumericalError(SINGULAR_MATRIX % (name, condition), condition=condition)
    if condition > limit:
        raise NumericalError(
            ILL_CONDITIONED % (name, condition, limit), condition=condition
        )
    identity = np.eye(matrix.shape[0])
    inverse = linalg.solve(matrix, identity, assume_a="sym", check_finite=False)
    return 0.5 * (inverse + inverse.T)


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as buffer:
        for chunk in iter(lambda: buffer.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def bracketed_root(
    func: Callable[[float], float],
    centre: float,
    span: float,
    lower: float,
    upper: float,
    growth: float = 10.0,
) -> float | None:
    """Root of an increasing ``func`` around ``centre``.

    The bracket starts at ``centre +/- span`` and widens by ``growth`` until the
    sign changes or it covers ``[lower, upper]``; ``None`` if it never does.
    """
    span = max(span, np.finfo(float).eps * max(1.0, abs(centre)))
    while True:
        left, right = max(lower, centre - span), min(upper, centre + span)
        if left < right and func(left) < 0 < func(right):
            return float(
                optimize.brentq(func, left, right, xtol=1e-15, rtol=ROOT_RTOL)
            )
        if left <= lower and right >= upper:
            return None
        span *= growth
