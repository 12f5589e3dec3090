# torus_zeros/exceptions/base.py

import json
from datetime import datetime, timezone
from typing import Any, Dict


class TorusZerosException(Exception):
    """
    Base exception class for the torus_zeros package.

    All custom exceptions inherit from this to ensure consistent
    error handling, logging, and user-facing messages across the library
    and the command line.

    Attributes:
        exit_code: Process exit code used by the CLI (default: 3)
        user_message: Message safe to print on the terminal
        technical_message: Technical details (for logging only)
        extras: Additional context (tau, z, residual, best_candidate...)
        timestamp: When the exception occurred (UTC)
    """

    default_exit_code = 3
    default_user_message = "An unexpected numerical error occurred."
    default_technical_message = "An unexpected error occurred"

    def __init__(
        self,
        user_message: str = None,
        technical_message: str = None,
        exit_code: int = None,
        **kwargs,  # extras: tau, z, rect, original_exception...
    ):
        """
        Initialise the exception.

        Args:
            user_message: Message safe to show to users
            technical_message: Technical details for logging
            exit_code: CLI exit code
            **kwargs: Additional context stored in self.extras
        """
        super().__init__(user_message or self.default_user_message)

        self.exit_code = exit_code or self.default_exit_code
        self.user_message = user_message or self.default_user_message
        self.technical_message = technical_message or self.default_technical_message
        self.extras = kwargs
        self.timestamp = datetime.now(tz=timezone.utc)

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert to dictionary for terminal output (user-safe).

        Technical details stay in the logs; the location of the failure
        (tau or z) is kept because it is what a user needs to rerun.
        """
        result = {
            "error": {
                "type": self.__class__.__name__,
                "message": self.user_message,
                "timestamp": self.timestamp.isoformat(),
            }
        }

        for key in ("tau", "z", "field"):
            if key in self.extras:
                result["error"][key] = str(self.extras[key])

        if hasattr(self, "field") and self.field:
            result["error"]["field"] = self.field

        return result

    def to_log_dict(self) -> Dict[str, Any]:
        """
        Convert to dictionary for logging (includes technical details).
        """
        return {
            "exception_type": self.__class__.__name__,
            "exit_code": self.exit_code,
            "user_message": self.user_message,
            "technical_message": self.technical_message,
            "timestamp": self.timestamp.isoformat(),
            "extras": self.extras,
        }

    def __str__(self) -> str:
        """
        String representation for logging.

        Format: [ExceptionType] exit=3 | user_msg='...' | tech_msg='...' | extras={...}
        """
        parts = [
            f"[{self.__class__.__name__}]",
            f"exit={self.exit_code}",
            f"user_msg='{self.user_message}'",
            f"tech_msg='{self.technical_message}'",
            f"timestamp={self.timestamp.isoformat()}",
        ]

        if self.extras:
            try:
                extras_str = json.dumps(self.extras, default=str, ensure_ascii=False)
                parts.append(f"extras={extras_str}")
            except (TypeError, ValueError):
                # complex numbers and numpy scalars end up here
                parts.append(f"extras={self.extras!r}")

        return " | ".join(parts)
