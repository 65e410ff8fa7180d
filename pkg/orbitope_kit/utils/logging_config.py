# Standard library imports
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional

LOGGER_NAMES = [
    "circle",
    "moment",
    "lp",
    "caratheodory",
    "poly",
    "orbitope",
    "thickening",
    "cli",
    "analytics",
    "config",
    "main",
]


def setup_logging(
    log_dir: Optional[str] = None,
    log_level: Optional[str] = None,
    enable_file_logging: bool = False,
) -> Dict[str, logging.Logger]:
    """
    Configure logging for orbitope-kit.

    Console output goes to stderr; stdout carries the JSON reports.

    Args:
        log_dir: Directory for log files (default: logs/ or LOG_DIR env var)
        log_level: Logging level (default: ORBITOPE_KIT_LOG, then LOG_LEVEL, then INFO)
        enable_file_logging: Whether to write orbitope_kit.log and the error log

    Returns:
        Dict[str, logging.Logger]: Dictionary of configured loggers
    """

    # Determine log level - priority: parameter > ORBITOPE_KIT_LOG > LOG_LEVEL > default
    if log_level is None:
        log_level = os.getenv("ORBITOPE_KIT_LOG") or os.getenv("LOG_LEVEL", "INFO")
    log_level = log_level.upper()
    level = getattr(logging, log_level, logging.INFO)

    # Configure formatters
    detailed_formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
    )
    simple_formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")

    handlers: list[logging.Handler] = []

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(simple_formatter)
    handlers.append(console_handler)

    log_path = Path(log_dir or os.getenv("LOG_DIR", "logs"))
    if enable_file_logging:
        try:
            log_path.mkdir(parents=True, exist_ok=True)

            file_handler = logging.FileHandler(
                log_path / "orbitope_kit.log", encoding="utf-8"
            )
            file_handler.setFormatter(detailed_formatter)
            handlers.append(file_handler)

            # Error log (only errors and critical)
            error_handler = logging.FileHandler(
                log_path / "orbitope_kit_errors.log", encoding="utf-8"
            )
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(detailed_formatter)
            handlers.append(error_handler)
        except OSError as e:
            console_handler.stream.write(
                f"Warning: File logging failed ({e}). Using console logging only.\n"
            )
            enable_file_logging = False

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,  # Override any existing configuration
    )

    loggers: Dict[str, logging.Logger] = {}
    for name in LOGGER_NAMES:
        logger = logging.getLogger(f"orbitope_kit.{name}")
        logger.setLevel(level)
        loggers[name] = logger

    main_logger = loggers["main"]
    main_logger.debug(f"Logging initialized at {log_level}")
    main_logger.debug(
        f"File logging: {'enabled at ' + str(log_path.absolute()) if enable_file_logging else 'disabled'}"
    )

    return loggers


def apply_logging_config(settings: Any) -> Dict[str, logging.Logger]:
    """Reconfigure the named loggers from an AppConfig: level always, file handlers when enabled."""
    return setup_logging(
        log_dir=settings.logging.log_dir,
        log_level=settings.logging.level,
        enable_file_logging=settings.logging.file_enabled,
    )


# Initialize loggers with environment-aware configuration
LOGGERS: Dict[str, logging.Logger] = setup_logging()

# Export loggers for easy import
circle_logger: logging.Logger = LOGGERS["circle"]
moment_logger: logging.Logger = LOGGERS["moment"]
lp_logger: logging.Logger = LOGGERS["lp"]
caratheodory_logger: logging.Logger = LOGGERS["caratheodory"]
poly_logger: logging.Logger = LOGGERS["poly"]
orbitope_logger: logging.Logger = LOGGERS["orbitope"]
thickening_logger: logging.Logger = LOGGERS["thickening"]
cli_logger: logging.Logger = LOGGERS["cli"]
analytics_logger: logging.Logger = LOGGERS["analytics"]
config_logger: logging.Logger = LOGGERS["config"]
main_logger: logging.Logger = LOGGERS["main"]
