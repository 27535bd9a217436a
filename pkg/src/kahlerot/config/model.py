from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..constants import (
    CERTIFY_REFINEMENTS,
    CERTIFY_SAMPLES,
    CONVEXITY_RESOLUTION,
    CONVEXITY_TOL,
    FD_STEP,
    MAP_TOL,
    NEWTON_MAX_HALVINGS,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
    PD_THRESHOLD,
    REFINE_STEP,
    REFINE_STEPS,
    SINKHORN_EPSILON,
    SINKHORN_MAX_ITERS,
    SINKHORN_TOL,
    VERDICT_TOL,
)


class AppConfig(BaseSettings):
    """
    Numerical defaults for every command. Each field can be overridden with a
    ``KAHLEROT_<FIELD>`` environment variable or a line in ``.env``.
    """

    # --- Reproducibility ---
    seed: int = Field(default=0, description="Seed for sampling-based commands.")
    workers: int = Field(
        default=1, ge=1, description="Threads used to evaluate certification samples."
    )

    # --- Domains and verdicts ---
    tolerance: float = Field(default=VERDICT_TOL, gt=0)
    domain_margin: float = Field(default=0.0, ge=0)
    pd_threshold: float = Field(default=PD_THRESHOLD, gt=0)

    # --- Legendre inversion ---
    newton_max_iter: int = NEWTON_MAX_ITER
    newton_max_halvings: int = NEWTON_MAX_HALVINGS
    newton_tol: float = NEWTON_TOL

    # --- Certification ---
    certify_samples: int = Field(default=CERTIFY_SAMPLES, ge=1)
    certify_refinements: int = Field(default=CERTIFY_REFINEMENTS, ge=0)
    refine_steps: int = REFINE_STEPS
    refine_step: float = REFINE_STEP
    fd_step: float = FD_STEP

    # --- c-convexity ---
    convexity_resolution: int = Field(default=CONVEXITY_RESOLUTION, ge=2)
    convexity_tol: float = CONVEXITY_TOL

    # --- Transport ---
    sinkhorn_epsilon: float = Field(default=SINKHORN_EPSILON, gt=0)
    sinkhorn_max_iters: int = SINKHORN_MAX_ITERS
    sinkhorn_tol: float = SINKHORN_TOL
    map_tol: float = MAP_TOL

    # --- Pydantic Settings Configuration ---
    model_config = SettingsConfigDict(
        env_prefix="KAHLEROT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def tolerances(self) -> dict[str, float]:
        """Tolerances echoed into report provenance."""
        return {
            "tolerance": self.tolerance,
            "domain_margin": self.domain_margin,
            "pd_threshold": self.pd_threshold,
            "newton_tol": self.newton_tol,
            "convexity_tol": self.convexity_tol,
            "sinkhorn_tol": self.sinkhorn_tol,
            "map_tol": self.map_tol,
        }
