import os
import yaml
from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import BaseModel, Field
from typing import Optional, Dict, Any, Literal

from orbitope_kit.utils.logging_config import config_logger


class NumericsConfig(BaseModel):
    """Shared tolerances for angle comparisons and certificate checks."""

    angle_eps: float = 1e-9
    min_pair_sine: float = 1e-6
    feasibility_tol: float = 1e-8
    separation_tol: float = 1e-9
    residual_tol: float = 1e-9


class LPConfig(BaseModel):
    """Configuration for the linear programming engine."""

    backend: Literal["simplex", "highs"] = "simplex"
    pivot_rule: Literal["bland", "dantzig"] = "bland"
    pivot_tol: float = 1e-10
    optimality_tol: float = 1e-11
    max_iterations: int = 50000
    degenerate_switch: int = 50


class GaugeConfig(BaseModel):
    """Configuration for the gauge LP and face polishing on B4."""

    grid: int = 720
    min_grid: int = 90
    cluster_steps: int = 3
    polish_tol: float = 1e-12
    polish_max_evaluations: int = 100
    acceptance_tol: float = 1e-10
    weight_floor: float = 1e-9
    # clusters lighter than this are not paired into edge hypotheses
    cluster_mass_floor: float = 1e-3
    scan_points: int = 240


class SearchConfig(BaseModel):
    """Configuration for the Borsuk-Ulam witness searches."""

    circle_grid: int = 360
    workers: int = 1
    batch_size: int = 32
    sphere_samples: int = 200
    sphere_trials: int = 2000
    max_support: int = 16


class PolyConfig(BaseModel):
    """Configuration for raked trigonometric polynomials."""

    sample_count: int = 1024
    root_xtol: float = 1e-10
    residual_tol: float = 1e-9


class ThickeningConfig(BaseModel):
    """Configuration for finitely supported measures and the homotopy."""

    merge_radius: float = 1e-9
    weight_floor: float = 1e-12
    diameter_slack: float = 1e-8
    max_support: int = 6
    probe_workers: int = 1


class LimitsConfig(BaseModel):
    """Upper bounds enforced on CLI parameters."""

    max_k: int = 8
    max_grid: int = 100000
    max_trials: int = 1000000
    max_points: int = 10000


class OutputConfig(BaseModel):
    """Configuration for report encoding."""

    float_digits: int = 17
    indent: int = 2


class LoggingConfig(BaseModel):
    """Configuration for logging behavior and file management."""

    level: str = "INFO"
    file_enabled: bool = False
    log_dir: str = "logs"
    analytics_enabled: bool = False


class DataPaths(BaseModel):
    """Configuration for data file paths used by the application."""

    analytics_log_path: str = "data/run_ledger.log"
    examples_dir: str = "data/examples"


class AppConfig(BaseSettings):
    """
    Main application configuration class that aggregates all sub-configurations.

    This includes environment settings, numerical tolerances, LP engine options,
    search defaults, parameter limits, output encoding, logging and data paths.
    """

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", extra="allow"
    )

    environment: str = Field(default="development")
    debug: bool = False

    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    lp: LPConfig = Field(default_factory=LPConfig)
    gauge: GaugeConfig = Field(default_factory=GaugeConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    poly: PolyConfig = Field(default_factory=PolyConfig)
    thickening: ThickeningConfig = Field(default_factory=ThickeningConfig)
    limits: LimitsConfig = Field(default_factory=LimitsConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    data: DataPaths = Field(default_factory=DataPaths)

    # Verbosity override
    log_level_env: Optional[str] = Field(default=None, alias="ORBITOPE_KIT_LOG")

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self._apply_log_level_from_env()

    def _apply_log_level_from_env(self):
        """Let ORBITOPE_KIT_LOG override the configured log level."""
        if self.log_level_env:
            self.logging.level = self.log_level_env.strip().upper()


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Recursively merge two dictionaries.

    Values from the override dictionary take precedence over those in the base dictionary.
    Nested dictionaries are merged recursively.

    Args:
        base (Dict[str, Any]): The base dictionary to be merged into.
        override (Dict[str, Any]): The dictionary with overriding values.

    Returns:
        Dict[str, Any]: The merged dictionary.
    """
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(base.get(k), dict):
            base[k] = deep_merge(base[k], v)
        else:
            base[k] = v
    return base


def config_dir() -> Path:
    """Directory holding base.yml and the environment overlays."""
    env_dir = os.getenv("ORBITOPE_KIT_CONFIG_DIR")
    if env_dir:
        return Path(env_dir)
    return Path(__file__).resolve().parent.parent / "config"


def load_config(environment: Optional[str] = None) -> AppConfig:
    """
    Load and merge configuration from YAML files and environment variables.

    Loads the base configuration from 'config/base.yml' and environment-specific overrides
    from 'config/{ENVIRONMENT}.yml'. Then overlays these settings with environment variables
    and returns a fully constructed AppConfig instance.

    Args:
        environment (Optional[str]): Overlay name; defaults to $ENVIRONMENT or "development".

    Returns:
        AppConfig: The loaded and merged application configuration.
    """
    env = environment or os.getenv("ENVIRONMENT", "development")
    directory = config_dir()
    base = directory / "base.yml"
    override = directory / f"{env}.yml"

    merged_data: dict[str, Any] = {}

    if base.exists():
        with open(base, "r") as f:
            merged_data = yaml.safe_load(f) or {}

    if override.exists():
        with open(override, "r") as f:
            override_data = yaml.safe_load(f) or {}
            merged_data = deep_merge(merged_data, override_data)

    config_logger.debug(f"Loaded configuration for environment {env!r} from {directory}")

    # Load .env + YAML merged settings
    return AppConfig(**merged_data)


config = load_config()
