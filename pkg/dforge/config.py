from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings, overridable through DFORGE_* environment variables"""
    model_config = SettingsConfigDict(env_prefix="DFORGE_", extra="ignore")

    # Factorization horizon (trial division / sympy factorint beyond this is refused)
    factor_limit: int = 10**8

    # Audits of growth certificates and kernels
    audit_horizon: int = 10**4
    multiplicative_horizon: int = 64

    # Series evaluation
    budget_cap: int = 10**8
    initial_truncation: int = 1000
    divisor_slack: float = 0.25
    chunk_size: int = 1 << 16
    threads: int = 1
    extended_dps: int = 50

    # Peeling schedule: x0 * ratio**i for i < steps
    peel_x0: float = 20.0
    peel_ratio: float = 1.5
    peel_steps: int = 8

    # Decay probes
    probe_x_min: float = 500.0
    probe_x_max: float = 5000.0
    probe_points: int = 16
    probe_tolerance: float = 1e-3

    log_level: str = "WARNING"

    def peel_schedule(self) -> list:
        return [self.peel_x0 * self.peel_ratio**i for i in range(self.peel_steps)]


@lru_cache
def get_settings() -> Settings:
    """Cached settings accessor"""
    return Settings()
