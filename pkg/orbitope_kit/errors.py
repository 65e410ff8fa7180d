"""
Error taxonomy for orbitope_kit.

Precondition failures raise OrbitopeKitError (a ValueError, exit code 2 in
the CLI). Results that contradict a proven statement or an internal check
raise ConsistencyError (exit code 1).
"""

from typing import Optional


class OrbitopeKitError(ValueError):
    """A caller supplied input that violates an operation's preconditions."""

    def __init__(self, code: str, message: Optional[str] = None):
        self.code = code
        self.detail = message
        super().__init__(f"{code}: {message}" if message else code)


class ConsistencyError(RuntimeError):
    """A computed result disagrees with the theory it is supposed to confirm."""

    def __init__(self, code: str, message: Optional[str] = None):
        self.code = code
        self.detail = message
        super().__init__(f"{code}: {message}" if message else code)
