"""Resource caps for exhaustive computations."""

from contextlib import contextmanager
from contextvars import ContextVar

from pydantic import BaseModel


VAR: ContextVar["Limits"] = ContextVar("Limits")


class Limits(BaseModel):
    """Caps in effect for enumeration-based checks."""

    enum_cap: int = 2**20
    sieve_cap: int = 2**16
    subspace_cap: int = 8
    module_dim_bound: int = 1
    glue_depth: int = 2

    class Config:
        """Config for limits."""

        allow_mutation = False

    @classmethod
    def get(cls) -> "Limits":
        """Return the limits in effect."""
        try:
            return VAR.get()
        except LookupError:
            return cls()

    @classmethod
    def set(cls, value: "Limits"):
        """Set the limits in effect."""
        return VAR.set(value)


@contextmanager
def limits(**overrides):
    """Temporarily override some limits."""
    current = Limits.get()
    token = Limits.set(current.copy(update=overrides))
    try:
        yield Limits.get()
    finally:
        VAR.reset(token)
