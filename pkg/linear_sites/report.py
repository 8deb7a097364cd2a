"""Command reports: JSON on stdout, a one-line summary on stderr."""

import json
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from .encode import canonical_json
from .error import EXIT_FAILURE, EXIT_PASS
from .limits import Limits


LOGGER = logging.getLogger(__name__)


class Report(BaseModel):
    """Outcome of one CLI command."""

    command: str
    inputs: Dict[str, str] = {}
    verdicts: Dict[str, bool] = {}
    counterexamples: List[Any] = []
    witnesses: List[Any] = []
    data: Dict[str, Any] = {}
    window_limited: bool = False
    caps: Limits
    timing: Optional[float] = None

    @classmethod
    def start(cls, command: str, **kwargs) -> "Report":
        """Create a report carrying the caps in effect."""
        return cls(command=command, caps=Limits.get(), **kwargs)

    @property
    def passed(self) -> bool:
        """Return whether every verdict holds."""
        return all(self.verdicts.values())

    @property
    def exit_code(self) -> int:
        """Return 0 when every verdict holds, 1 otherwise."""
        return EXIT_PASS if self.passed else EXIT_FAILURE

    def to_json(self) -> str:
        """Return canonical JSON text."""
        return canonical_json(json.loads(self.json(exclude_none=True)), indent=2)


def emit(report: Report, quiet: bool = False) -> int:
    """Print a report and return its exit code."""
    print(report.to_json())
    if not quiet:
        failed = sorted(k for k, v in report.verdicts.items() if not v)
        status = "PASS" if report.passed else "FAIL " + ", ".join(failed)
        suffix = " (window-limited)" if report.window_limited else ""
        print(f"{report.command}: {status}{suffix}", file=sys.stderr)
    LOGGER.debug("Emitted %s report", report.command)
    return report.exit_code
