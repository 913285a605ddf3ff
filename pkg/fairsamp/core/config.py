import logging
import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError, field_validator

from fairsamp.core.errors import ConfigurationError

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = 'FAIRSAMP_'

_LOG_LEVELS = {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'}


class WorkbenchSettings(BaseModel):
    """Process-wide defaults read from FAIRSAMP_* environment variables."""
    shots: int = 8192
    repeats: int = 20
    seed: int = 0
    ni_gate: int = 100_000
    ni_anneal: int = 1_000
    fairness_cap: int = 10_000_000
    grid_steps: int = 60
    log_level: str = 'WARNING'

    @field_validator('shots', 'repeats', 'ni_gate', 'ni_anneal', 'fairness_cap', 'grid_steps')
    @classmethod
    def must_be_positive(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v

    @field_validator('seed')
    @classmethod
    def seed_must_be_non_negative(cls, v):
        if v < 0:
            raise ValueError('seed must be non-negative')
        return v

    @field_validator('log_level')
    @classmethod
    def log_level_must_be_valid(cls, v):
        v = v.strip().upper()
        if v not in _LOG_LEVELS:
            raise ValueError(f'log level must be one of {sorted(_LOG_LEVELS)}')
        return v

    @classmethod
    def from_env(cls, overrides: Optional[Dict[str, Any]] = None) -> 'WorkbenchSettings':
        values: Dict[str, Any] = {}
        for field in cls.model_fields:
            raw = os.getenv(f'{ENV_PREFIX}{field.upper()}')
            if raw is not None and raw.strip():
                values[field] = _coerce(field, raw.strip())
        values.update(overrides or {})
        try:
            return cls(**values)
        except ValidationError as e:
            names = ', '.join(f"{ENV_PREFIX}{str(err['loc'][0]).upper()}" for err in e.errors())
            raise ConfigurationError(f'invalid settings ({names}): {e}') from e


def _coerce(field: str, raw: str) -> Any:
    if field == 'log_level':
        return raw
    try:
        # accepts 1e7 style values for the cap
        return int(float(raw)) if any(c in raw for c in 'eE.') else int(raw)
    except ValueError as e:
        raise ConfigurationError(f'{ENV_PREFIX}{field.upper()} must be an integer, got {raw!r}') from e


_settings: Optional[WorkbenchSettings] = None


def get_settings(overrides: Optional[Dict[str, Any]] = None) -> WorkbenchSettings:
    """Return cached settings; explicit overrides always build a fresh instance."""
    global _settings
    if overrides:
        return WorkbenchSettings.from_env(overrides)
    if _settings is None:
        _settings = WorkbenchSettings.from_env()
        logger.debug(f'Loaded settings: {_settings.model_dump()}')
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None
