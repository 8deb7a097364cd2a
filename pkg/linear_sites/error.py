"""Errors and error related utilities."""

from abc import ABC
import functools
import json
import logging
from typing import Callable, ClassVar, Optional, Tuple, Type, Union

from inflection import dasherize, underscore
from pydantic.main import BaseModel, Extra


LOGGER = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_CAP = 3


class LinearSiteError(Exception):
    """Raised when a computation on linear sites cannot proceed."""


class Reportable(Exception, ABC):
    """Abstract Base Class for exceptions that can be emitted as problem reports."""

    code: ClassVar[str]
    exit_code: ClassVar[int] = EXIT_INPUT


class DimensionMismatch(LinearSiteError, Reportable):
    """Raised when vectors, matrices or subspaces have incompatible shapes."""

    code = "dimension-mismatch"


class FieldMismatch(LinearSiteError, Reportable):
    """Raised when two inputs are defined over different fields."""

    code = "field-mismatch"


class UnsupportedField(LinearSiteError, Reportable):
    """Raised when an operation needs a prime field but got the rationals."""

    code = "unsupported-field"


class UnknownObject(LinearSiteError, Reportable):
    """Raised when an object identifier is not part of a category."""

    code = "unknown-object"


class CategoryMismatch(LinearSiteError, Reportable):
    """Raised when sieves, modules or systems live over different categories."""

    code = "category-mismatch"


class CompositionError(LinearSiteError, Reportable):
    """Raised when a composition table turns out to be inconsistent.

    Sieve generation closes under precomposition in one pass for any valid
    category; a second round that still grows the sieve means the structure
    constants are not associative.
    """

    code = "composition-error"


class NotATopology(LinearSiteError, Reportable):
    """Raised when a minimal cover is requested from a system that is no topology."""

    code = "not-a-topology"


class PreconditionFailed(LinearSiteError, Reportable):
    """Raised when the inputs of a check do not satisfy its hypotheses."""

    code = "precondition-failed"


class WindowError(LinearSiteError, Reportable):
    """Raised on window mismatches or windows taller than a degree bound."""

    code = "window-error"


class WorkspaceError(LinearSiteError, Reportable):
    """Raised when a workspace file cannot be parsed or resolved."""

    code = "workspace-error"


class CapExceeded(LinearSiteError, Reportable):
    """Raised when an exhaustive computation would exceed a configured cap."""

    code = "cap-exceeded"
    exit_code = EXIT_CAP

    def __init__(self, cap: str, limit: int, requested: int):
        """Initialize with the name of the cap, its value and the requested size."""
        super().__init__(f"{cap} exceeded: requested {requested}, limit {limit}")
        self.cap = cap
        self.limit = limit
        self.requested = requested


class ProblemReport(BaseModel):
    """Problem report emitted when a command fails."""

    code: str
    en: Optional[str]

    class Config:
        """Config for problem report."""

        extra = Extra.allow

    @classmethod
    def from_error(cls, err: Exception) -> "ProblemReport":
        """Create a problem report describing an exception."""
        code = (
            err.code
            if isinstance(err, Reportable)
            else dasherize(underscore(type(err).__name__))
        )
        extra = {}
        if isinstance(err, CapExceeded):
            extra = {"cap": err.cap, "limit": err.limit, "requested": err.requested}
        return cls(code=code, en=str(err), **extra)


def exit_code_for(err: Exception) -> int:
    """Return the process exit code for an exception."""
    if isinstance(err, Reportable):
        return err.exit_code
    return EXIT_INPUT


def problem_reporter(
    func: Callable = None,
    exceptions: Union[Type[Exception], Tuple[Type[Exception], ...]] = None,
):
    """Decorator printing a problem report and returning an exit code on error."""

    if not exceptions:
        exceptions = Exception
    if not func:
        return lambda f: problem_reporter(f, exceptions)

    @functools.wraps(func)
    def _problem_reporter(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except exceptions as err:
            LOGGER.debug("Command failed", exc_info=True)
            report = ProblemReport.from_error(err)
            print(json.dumps({"problem": report.dict()}, sort_keys=True, indent=2))
            return exit_code_for(err)

    return _problem_reporter
