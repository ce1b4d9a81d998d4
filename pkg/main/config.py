import os
import logging
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    return int(value)


class Config:
    """Base config."""
    SECRET_KEY = os.getenv('SECRET_KEY')

    # Size caps for the exhaustive engines
    MAX_POSET_SIZE = _env_int('GTW_MAX_POSET_SIZE', 8)
    MAX_ENUM_SIZE = _env_int('GTW_MAX_ENUM_SIZE', 5)
    MAX_SUBSET_SCAN = _env_int('GTW_MAX_SUBSET_SCAN', 1 << 16)
    MAX_ALGEBRA_SIZE = _env_int('GTW_MAX_ALGEBRA_SIZE', 4096)
    JOIN_IRREDUCIBLE_THRESHOLD = _env_int('GTW_JOIN_IRREDUCIBLE_THRESHOLD', 256)
    EAGER_CHECK_SIZE = _env_int('GTW_EAGER_CHECK_SIZE', 64)
    MAX_VALUATIONS = _env_int('GTW_MAX_VALUATIONS', 1_000_000)
    MAX_MAPS = _env_int('GTW_MAX_MAPS', 200_000)
    MAX_UNIVERSE = _env_int('GTW_MAX_UNIVERSE', 100_000)
    SUBALGEBRA_SCAN = _env_int('GTW_SUBALGEBRA_SCAN', 8)
    WORKERS = _env_int('GTW_WORKERS', 1)
    SHOW_PROGRESS = os.getenv('GTW_PROGRESS', '0') == '1'
    MAX_MEM_MB = _env_int('GTW_MAX_MEM', 0)


class ProductionConfig(Config):
    FLASK_ENV = 'production'
    DEBUG = False
    TESTING = False


class DevelopmentConfig(Config):
    FLASK_ENV = 'development'
    DEBUG = True
    TESTING = True


@dataclass(frozen=True)
class Limits:
    """Snapshot of every size cap; the engines read the active one via get_limits()."""
    max_poset_size: int = Config.MAX_POSET_SIZE
    max_enum_size: int = Config.MAX_ENUM_SIZE
    max_subset_scan: int = Config.MAX_SUBSET_SCAN
    max_algebra_size: int = Config.MAX_ALGEBRA_SIZE
    join_irreducible_threshold: int = Config.JOIN_IRREDUCIBLE_THRESHOLD
    eager_check_size: int = Config.EAGER_CHECK_SIZE
    max_valuations: int = Config.MAX_VALUATIONS
    max_maps: int = Config.MAX_MAPS
    max_universe: int = Config.MAX_UNIVERSE
    subalgebra_scan: int = Config.SUBALGEBRA_SCAN
    workers: int = Config.WORKERS
    show_progress: bool = Config.SHOW_PROGRESS
    max_mem_mb: int = Config.MAX_MEM_MB
    universe_caps: Dict[str, int] = field(
        default_factory=lambda: {'box': 4, 'si': 4, 'im': 3, 'cin': 3})
    # free distributive lattices explode: six free generators already give 7.8M elements
    oracle_caps: Dict[str, int] = field(
        default_factory=lambda: {'box': 8, 'im': 4, 'cin': 2})


_active_limits: ContextVar[Limits] = ContextVar('gtw_limits', default=Limits())


def get_limits() -> Limits:
    return _active_limits.get()


@contextmanager
def override_limits(**caps) -> Iterator[Limits]:
    """Temporarily replace some caps, e.g. ``with override_limits(max_maps=10): ...``"""
    caps = {key: value for key, value in caps.items() if value is not None}
    limits = replace(get_limits(), **caps)
    token = _active_limits.set(limits)
    try:
        yield limits
    finally:
        _active_limits.reset(token)


def warn_memory(what: str, estimated_bytes: int) -> None:
    """GTW_MAX_MEM is a soft budget: exceeding it only logs a warning."""
    budget = get_limits().max_mem_mb
    if budget and estimated_bytes > budget * 1024 * 1024:
        logging.warning(f"{what}: estimated {estimated_bytes // (1024 * 1024)} MB exceeds GTW_MAX_MEM={budget} MB")


@contextmanager
def activate_limits(limits: Limits) -> Iterator[Limits]:
    """Install a complete Limits snapshot, e.g. inside a worker process"""
    token = _active_limits.set(limits)
    try:
        yield limits
    finally:
        _active_limits.reset(token)
