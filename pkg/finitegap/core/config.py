from functools import lru_cache
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Tolerances(BaseModel):
    """Numeric thresholds used across solvers, checkers and reports."""

    model_config = {"frozen": True}

    residual: float = 1e-8  # operator residual assert
    descent: float = 1e-10  # gluing value/jet conditions, relative
    rank: float = 1e-10  # rank decisions, relative to the largest singular value
    condition_limit: float = 1e12  # NonGenericDivisor cutoff
    coincidence: float = 1e-9  # relative point coincidence
    sample_distance: float = 1e-3  # residual samples vs poles/marked points
    consequence_sigma: float = 1e-8
    consequence_tau: float = 1e-7
    zero_check: float = 1e-9

    def merged(self, overrides: Optional[Dict[str, Any]] = None) -> "Tolerances":
        """Return a copy with the given fields replaced."""
        if not overrides:
            return self
        unknown = set(overrides) - set(type(self).model_fields)
        if unknown:
            raise ValueError(f"Unknown tolerance fields: {', '.join(sorted(unknown))}")
        return self.model_copy(update={k: float(v) for k, v in overrides.items()})


class Settings(BaseSettings):
    """
    Application settings.

    FINITEGAP_THREADS is the supported environment override; tolerances are
    overridden per invocation through the spec document or CLI flags.
    """

    APP_NAME: str = "finitegap"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Worker pool for grid evaluation; 1 means serial
    THREADS: int = Field(default=1, ge=1)

    TOLERANCES: Tolerances = Tolerances()

    # 17 significant digits round-trip doubles
    FLOAT_FORMAT: str = "%.17g"

    model_config = SettingsConfigDict(
        env_prefix="FINITEGAP_",
        case_sensitive=True,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached application settings."""
    return Settings()


def resolve_tolerances(tolerances: Optional[Tolerances] = None) -> Tolerances:
    return tolerances if tolerances is not None else get_settings().TOLERANCES
