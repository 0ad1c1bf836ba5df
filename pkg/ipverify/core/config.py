from pydantic_settings import BaseSettings, SettingsConfigDict

from ipverify.schemas.quadrature import QuadratureConfig


class Settings(BaseSettings):
    # App
    APP_NAME: str = "ipverify"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Quadrature
    QUAD_REL_TOL: float = 1e-11
    QUAD_ABS_TOL: float = 0.0
    QUAD_MAX_LEVELS: int = 12

    # Sampling
    SAMPLE_CHUNK_SIZE: int = 65536
    MAX_WORKERS: int = 4
    CDF_TABLE_SIZE: int = 1024

    # Statistical checks
    DCORR_SUBSAMPLE: int = 4000
    N_PERMUTATIONS: int = 199
    SIGNIFICANCE: float = 0.01
    KS_CRITICAL_01: float = 1.628  # one-sample c(0.01), scaled by 1/sqrt(n)

    # Deterministic identity checks
    RESIDUAL_TOL: float = 1e-8

    model_config = SettingsConfigDict(env_file=".env", env_prefix="IPVERIFY_", extra="ignore")

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(
            rel_tol=self.QUAD_REL_TOL,
            abs_tol=self.QUAD_ABS_TOL,
            max_subdivisions=self.QUAD_MAX_LEVELS,
        )


settings = Settings()
