"""
Data Validators Package

Invariant checks over recorded episode logs.
"""

from .log_validator import validate_logs

__all__ = ["validate_logs"]
