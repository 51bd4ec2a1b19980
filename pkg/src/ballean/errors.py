"""Exception taxonomy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations


class BalleanError(Exception):
    """Base class; ``status`` is the CLI status string, ``exit_code`` its code."""

    status = "error"
    exit_code = 1

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ContractError(BalleanError):
    status = "contract-error"
    exit_code = 1


class InputError(BalleanError, ValueError):
    status = "input-error"
    exit_code = 2


class ResourceError(BalleanError):
    status = "resource-error"
    exit_code = 3
