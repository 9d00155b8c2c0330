"""
Runtime settings read from the environment (and a local ``.env`` file).

    LOG_LEVEL       INFO
    LOG_DIR         logs
    LOG_FORMAT      text | json
    LOG_TO_FILE     false
    DSLP_TOL_SCALE  1.0   (multiplies every numeric tolerance)
    DSLP_WORKERS    1     (threads for branch grid evaluation)
"""

import os
from dataclasses import dataclass
from typing import Mapping, Optional

from dotenv import load_dotenv

from src.models import ErrorCode, SLPError
from src.slp_core import DEFAULT_TOLERANCES, Tolerances

_TRUE = {"1", "true", "yes", "on"}


@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    log_dir: str = "logs"
    log_format: str = "text"
    log_to_file: bool = False
    tol_scale: float = 1.0
    workers: int = 1

    @property
    def json_logs(self) -> bool:
        return self.log_format.lower() == "json"

    def tolerances(self, override: Optional[float] = None) -> Tolerances:
        """Default tolerances scaled by ``override`` or DSLP_TOL_SCALE."""
        factor = self.tol_scale if override is None else override
        if factor == 1.0:
            return DEFAULT_TOLERANCES
        return DEFAULT_TOLERANCES.scaled(factor)


def _number(env: Mapping[str, str], name: str, default, cast):
    raw = env.get(name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise SLPError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"{name} must be a {cast.__name__}",
            details={"variable": name, "value": raw},
        ) from exc


def load_settings(env: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Build :class:`Settings` from ``env``.

    With no mapping given, ``.env`` is loaded first and ``os.environ`` is used.
    """
    if env is None:
        load_dotenv()
        env = os.environ

    settings = Settings(
        log_level=env.get("LOG_LEVEL", "INFO"),
        log_dir=env.get("LOG_DIR", "logs"),
        log_format=env.get("LOG_FORMAT", "text"),
        log_to_file=env.get("LOG_TO_FILE", "false").strip().lower() in _TRUE,
        tol_scale=_number(env, "DSLP_TOL_SCALE", 1.0, float),
        workers=_number(env, "DSLP_WORKERS", 1, int),
    )
    if settings.tol_scale <= 0 or settings.workers < 1:
        raise SLPError(
            code=ErrorCode.VALIDATION_ERROR,
            message="DSLP_TOL_SCALE must be positive and DSLP_WORKERS at least 1",
            details={"tol_scale": settings.tol_scale, "workers": settings.workers},
        )
    return settings
