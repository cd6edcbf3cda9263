"""Exception types shared across the package.

The distinction matters to the command-line driver, which maps each class
to a distinct exit code: capacity problems are exit 3, domain/usage problems
exit 2, and verification failures exit 1.
"""


class CapacityError(Exception):
    """A requested size exceeds a configured or hard capacity limit."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class VerificationError(Exception):
    """An exact identity or a toleranced check failed."""
