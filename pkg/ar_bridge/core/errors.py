"""
Error types shared by every module.

Each error carries a stable machine-readable ``code``, a human message, a
``context`` dict and the process exit status the CLI maps it to.
"""

import json
from typing import Any, Dict, Optional


class ArBridgeError(Exception):
    """Base class for all toolkit errors."""

    code = "error"
    exit_code = 2

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "context": self.context}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=str)


class DomainError(ArBridgeError, ValueError):
    code = "domain_error"


class SingularMatrixError(ArBridgeError):
    code = "singular_matrix"

    def __init__(self, message: str, pivot: int, order: Optional[int] = None, **context: Any):
        super().__init__(message, pivot=pivot, order=order, **context)
        self.pivot = pivot
        self.order = order


class DegenerateSequenceError(ArBridgeError):
    code = "degenerate_sequence"

    def __init__(self, message: str, order: int, **context: Any):
        super().__init__(message, order=order, **context)
        self.order = order


class DegenerateProcessError(ArBridgeError):
    code = "degenerate_process"


class UnstableFilterError(ArBridgeError):
    code = "unstable_filter"


class InsufficientDataError(ArBridgeError):
    code = "insufficient_data"


class DegenerateDataError(ArBridgeError):
    code = "degenerate_data"


class SpecError(ArBridgeError):
    code = "spec_error"


class CapTooSmallError(ArBridgeError):
    code = "cap_too_small"


class ContractError(ArBridgeError):
    code = "contract_error"


class ConfigError(ArBridgeError):
    code = "config_error"
    exit_code = 1


class UsageError(ArBridgeError):
    code = "usage_error"
    exit_code = 1
