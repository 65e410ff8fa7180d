"""
orbitope-kit - numerical checks for Vietoris-Rips metric thickenings of
the circle, Borsuk-Ulam witness searches and the orbitope B4.

Usage: python main.py <command> [options]; see `python main.py --help`.
"""

import sys

from orbitope_kit.cli.commands import main
from orbitope_kit.config import config
from orbitope_kit.utils.logging_config import apply_logging_config, main_logger

if __name__ == "__main__":
    apply_logging_config(config)
    main_logger.debug(f"orbitope-kit starting ({config.environment})")
    sys.exit(main())
