"""Application settings loaded from environment variables."""

from functools import lru_cache

import numpy as np
from pydantic_settings import BaseSettings, SettingsConfigDict

from tcp_homotopy.homotopy import HomotopyParams
from tcp_homotopy.tensor import FloatArray
from tcp_homotopy.tracer import TracerConfig


class Settings(BaseSettings):
    """Solver defaults; override with ``TCP_HOMOTOPY_<FIELD>`` variables."""

    model_config = SettingsConfigDict(env_prefix="TCP_HOMOTOPY_")

    a: float = 1.0
    b: float = 1.0
    dt0: float = 0.1
    eps1: float = 1e-5
    eps2: float = 1e-12
    dt_min: float = 1e-6
    dt_max: float = 0.5
    max_newton_per_step: int = 20
    final_newton_iters: int = 60
    max_steps: int = 1000
    cond_limit: float = 1e14
    snap_threshold: float = 1e-3
    seed: int = 0
    samples: int = 10_000
    grid_per_axis: int = 11
    refine_iters: int = 30
    oracle_starts: int = 4
    oracle_tol: float = 1e-8
    log_level: str = "WARNING"

    def tracer_config(
        self,
        dim: int,
        a: list[float] | None = None,
        b: list[float] | None = None,
        relaxed: bool = False,
        **overrides: float | int | None,
    ) -> TracerConfig:
        """Build a tracer configuration for an n-dimensional problem.

        Args:
            dim: Problem dimension.
            a: Vector a; a single entry is broadcast. Defaults to ``self.a``.
            b: Vector b; a single entry is broadcast. Defaults to ``self.b``.
            relaxed: Allow zero entries in a.
            **overrides: TracerConfig fields replacing the settings values;
                None values are ignored.

        Raises:
            ShapeError: If a or b has a length other than 1 or ``dim``.
            ParameterError: If the resulting configuration is invalid.
        """
        params = HomotopyParams(
            _broadcast(a if a is not None else [self.a], dim),
            _broadcast(b if b is not None else [self.b], dim),
            relaxed,
        )
        values: dict[str, float | int | None] = {
            "dt0": self.dt0,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "dt_min": self.dt_min,
            "dt_max": self.dt_max,
            "max_newton_per_step": self.max_newton_per_step,
            "final_newton_iters": self.final_newton_iters,
            "max_steps": self.max_steps,
            "cond_limit": self.cond_limit,
            "snap_threshold": self.snap_threshold,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return TracerConfig(params=params, **values)  # type: ignore[arg-type]


def _broadcast(values: list[float], dim: int) -> FloatArray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 1:
        return np.full(dim, float(arr[0]))
    return arr


@lru_cache
def get_settings() -> Settings:
    """Get the cached settings instance."""
    return Settings()
