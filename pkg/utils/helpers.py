import os
import logging
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# Coordinates beyond this bound could overflow 64-bit doubled-area products.
COORDINATE_LIMIT = 2 ** 30
GENERATOR_EXTENT = 10 ** 6

DEFAULT_PEN = 90.0
DEFAULT_HOPS = 10
DEFAULT_HOOD = 2
SMALL_INSTANCE_LIMIT = 100  # kappa is forced to infinity up to this many points
LONG_EDGE_CELLS = 4
LS_EPSILON = 0.001
START_TRIANGLE_COUNT = 8

RETRY_ALPHA_FACTORS = (1 / 3, 3.0, 1 / 9, 9.0)
RETRY_SIGMA = 0.3
RETRY_SIGMA_ATTEMPTS = 5
RESTART_SIGMA = 0.5

BRUTE_FORCE_LIMIT = 10
SCORE_TOLERANCE = 1e-9
HISTOGRAM_BIN = 0.0025


def _env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer, using %d", name, raw, default)
        return default
    if value < minimum:
        logger.warning("Ignoring %s=%d: below %d, using %d", name, value, minimum, default)
        return default
    return value


def _env_flag(name: str) -> bool:
    return (os.getenv(name) or "").strip().lower() in {"1", "true", "yes", "on"}


POLYG_THREADS = _env_int("POLYG_THREADS", min(4, os.cpu_count() or 1))
POLYG_LOG_LEVEL = (os.getenv("POLYG_LOG_LEVEL") or "INFO").upper()
POLYG_DEBUG = _env_flag("POLYG_DEBUG")
DNC_THRESHOLD = _env_int("POLYG_DNC_THRESHOLD", 200_000)
DNC_GRID = _env_int("POLYG_DNC_GRID", 32)


def worker_count(requested: Optional[int] = None, jobs: Optional[int] = None) -> int:
    workers = requested if requested and requested > 0 else POLYG_THREADS
    if jobs is not None:
        workers = min(workers, max(1, jobs))
    return max(1, workers)


def round_half_up(value: float) -> int:
    return int(value + 0.5)


__all__ = [
    "COORDINATE_LIMIT",
    "GENERATOR_EXTENT",
    "DEFAULT_PEN",
    "DEFAULT_HOPS",
    "DEFAULT_HOOD",
    "SMALL_INSTANCE_LIMIT",
    "LONG_EDGE_CELLS",
    "LS_EPSILON",
    "START_TRIANGLE_COUNT",
    "RETRY_ALPHA_FACTORS",
    "RETRY_SIGMA",
    "RETRY_SIGMA_ATTEMPTS",
    "RESTART_SIGMA",
    "BRUTE_FORCE_LIMIT",
    "SCORE_TOLERANCE",
    "HISTOGRAM_BIN",
    "POLYG_THREADS",
    "POLYG_LOG_LEVEL",
    "POLYG_DEBUG",
    "DNC_THRESHOLD",
    "DNC_GRID",
    "worker_count",
    "round_half_up",
]
