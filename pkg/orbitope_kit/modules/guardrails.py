import json
import math
from logging import Logger
from pathlib import Path
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from orbitope_kit.config import AppConfig
from orbitope_kit.errors import OrbitopeKitError
from orbitope_kit.modules.metric_thickening import DiscreteMeasure, make_measure
from orbitope_kit.modules.orbitope_b4 import BoundaryPointB4

CSV_COMMANDS = {"poly-from-roots"}


class RunConfig(BaseModel):
    """One CLI invocation: command, numeric parameters, paths and output format."""

    command: str
    k: Optional[int] = None
    n: Optional[int] = None
    r: Optional[float] = None
    bound: Optional[float] = None
    grid: Optional[int] = None
    seed: int = 0
    trials: Optional[int] = None
    samples: Optional[int] = None
    random_points: Optional[int] = None
    max_diam: Optional[float] = None
    workers: Optional[int] = None
    pad: int = 0
    points_path: Optional[str] = None
    out_path: Optional[str] = None
    output_format: Literal["json", "csv"] = "json"


class ParameterValidator:
    """Validates run parameters before a command is dispatched."""

    def __init__(self, config: AppConfig, logger: Logger):
        """
        Initialize ParameterValidator with configuration and logger.

        Args:
            config (AppConfig): Configuration object holding the parameter limits.
            logger (Logger): Logger instance for logging messages.
        """
        self.config = config
        self.logger = logger

    def _reject(self, message: str) -> None:
        self.logger.warning(f"Rejected run parameters: {message}")
        raise OrbitopeKitError("invalid-parameter", message)

    def validate_run_config(self, run: RunConfig) -> RunConfig:
        """
        Check every numeric parameter against its operation's preconditions
        and the configured limits.

        Args:
            run (RunConfig): Parsed command-line parameters.

        Returns:
            RunConfig: The same run configuration, when valid.

        Raises:
            OrbitopeKitError: invalid-parameter on the first violated check.
        """
        limits = self.config.limits
        self.logger.debug(f"Validating parameters for {run.command}")

        if run.k is not None and not 1 <= run.k <= limits.max_k:
            self._reject(f"k must lie in 1..{limits.max_k}, got {run.k}")
        if run.n is not None and not 2 <= run.n <= limits.max_k * 4:
            self._reject(f"sphere dimension must lie in 2..{limits.max_k * 4}, got {run.n}")
        if run.grid is not None and not 3 <= run.grid <= limits.max_grid:
            self._reject(f"grid must lie in 3..{limits.max_grid}, got {run.grid}")
        if run.trials is not None and not 1 <= run.trials <= limits.max_trials:
            self._reject(f"trials must lie in 1..{limits.max_trials}, got {run.trials}")
        if run.samples is not None and not 0 <= run.samples <= limits.max_points:
            self._reject(f"samples must lie in 0..{limits.max_points}, got {run.samples}")
        if run.random_points is not None and not 1 <= run.random_points <= limits.max_points:
            self._reject(f"random point count must lie in 1..{limits.max_points}")
        if run.workers is not None and run.workers < 1:
            self._reject("workers must be positive")
        if run.pad < 0:
            self._reject("pad must be nonnegative")
        if run.seed < 0:
            self._reject("seed must be nonnegative")

        for name in ("r", "max_diam"):
            value = getattr(run, name)
            if value is not None and (not math.isfinite(value) or value < 0):
                self._reject(f"{name} must be a nonnegative finite number, got {value}")
        if run.bound is not None and (not math.isfinite(run.bound) or run.bound <= 0):
            self._reject(f"bound must be a positive finite number, got {run.bound}")

        if run.output_format == "csv" and run.command not in CSV_COMMANDS:
            self._reject(f"--format csv is only available for {', '.join(sorted(CSV_COMMANDS))}")

        self.logger.debug("Run parameter validation succeeded")
        return run


def _read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise OrbitopeKitError("invalid-input", f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise OrbitopeKitError("invalid-input", f"{path} is not valid JSON: {e.msg}") from e


def load_points_file(path: Union[str, Path]) -> np.ndarray:
    """Angles from a JSON list of numbers or an object with a "points" list."""
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("points")
    if not isinstance(data, list) or not data:
        raise OrbitopeKitError("invalid-input", f"{path} must hold a nonempty list of angles")
    try:
        angles = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise OrbitopeKitError("invalid-input", f"{path} holds non-numeric angles") from e
    if angles.ndim != 1 or not np.all(np.isfinite(angles)):
        raise OrbitopeKitError("invalid-input", f"{path} must hold finite scalar angles")
    return angles


def load_measure_file(path: Union[str, Path], r: float = math.pi) -> DiscreteMeasure:
    """A measure from JSON [{angle, weight}, ...] (or {"atoms": [...]})."""
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("atoms")
    if not isinstance(data, list) or not data:
        raise OrbitopeKitError("invalid-input", f"{path} must hold a nonempty list of atoms")
    try:
        angles = [float(atom["angle"]) for atom in data]
        weights = [float(atom["weight"]) for atom in data]
    except (KeyError, TypeError, ValueError) as e:
        raise OrbitopeKitError("invalid-input", f"{path}: every atom needs angle and weight") from e
    return make_measure(angles, weights, r)


def load_boundary_point_file(path: Union[str, Path]) -> BoundaryPointB4:
    data = _read_json(path)
    try:
        return BoundaryPointB4.model_validate(data)
    except ValidationError as e:
        raise OrbitopeKitError(
            "invalid-input", f"{path} is not a boundary point ({e.error_count()} errors)"
        ) from e
